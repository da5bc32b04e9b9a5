/** Character-offset helpers for span highlighting.
 *
 * The UI lets the annotator select evidence text in the passage and in
 * the question; what goes to the server is a half-open character span
 * into the original string.
 */

import { Span } from "./types.js";

/**
 * Normalize a raw text selection into a span: order the endpoints, clamp
 * to the text bounds, and trim surrounding whitespace so a sloppy drag
 * still produces the span of the visibly selected words.
 * Returns null when nothing selectable remains.
 */
export function spanFromSelection(
  text: string,
  anchor: number,
  focus: number,
): Span | null {
  let start = Math.min(anchor, focus);
  let end = Math.max(anchor, focus);
  start = Math.max(0, Math.min(start, text.length));
  end = Math.max(0, Math.min(end, text.length));
  while (start < end && /\s/.test(text[start])) start += 1;
  while (end > start && /\s/.test(text[end - 1])) end -= 1;
  return start < end ? [start, end] : null;
}

export interface Segment {
  text: string;
  highlighted: boolean;
}

/** Split a text into plain/highlighted segments for rendering. */
export function segmentize(text: string, span: Span | null): Segment[] {
  if (span === null) {
    return text ? [{ text, highlighted: false }] : [];
  }
  const [start, end] = span;
  const out: Segment[] = [];
  if (start > 0) out.push({ text: text.slice(0, start), highlighted: false });
  out.push({ text: text.slice(start, end), highlighted: true });
  if (end < text.length)
    out.push({ text: text.slice(end), highlighted: false });
  return out;
}

/** Recover the selected substring; inverse check for round-trip tests. */
export function spanText(text: string, [start, end]: Span): string {
  return text.slice(start, end);
}
