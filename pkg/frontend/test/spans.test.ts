import { describe, expect, it } from "vitest";

import { segmentize, spanFromSelection, spanText } from "../src/spans.js";

const TEXT = "alpha beta gamma";

describe("spanFromSelection", () => {
  it("keeps a clean forward selection as-is", () => {
    expect(spanFromSelection(TEXT, 0, 5)).toEqual([0, 5]);
  });

  it("orders reversed (right-to-left) selections", () => {
    expect(spanFromSelection(TEXT, 5, 0)).toEqual([0, 5]);
  });

  it("clamps endpoints to the text bounds", () => {
    expect(spanFromSelection(TEXT, -3, 999)).toEqual([0, TEXT.length]);
  });

  it("trims surrounding whitespace from a sloppy drag", () => {
    // "a beta g" selected with the spaces around "beta" included
    expect(spanFromSelection(TEXT, 5, 11)).toEqual([6, 10]);
    expect(spanText(TEXT, [6, 10])).toBe("beta");
  });

  it("returns null for collapsed or whitespace-only selections", () => {
    expect(spanFromSelection(TEXT, 4, 4)).toBeNull();
    expect(spanFromSelection(TEXT, 5, 6)).toBeNull();
    expect(spanFromSelection("", 0, 3)).toBeNull();
  });
});

describe("segmentize", () => {
  it("round-trips: concatenated segments reproduce the text", () => {
    for (const span of [null, [0, 5], [6, 10], [11, 16], [0, 16]] as const) {
      const segs = segmentize(TEXT, span ? [span[0], span[1]] : null);
      expect(segs.map((s) => s.text).join("")).toBe(TEXT);
    }
  });

  it("marks exactly the selected substring as highlighted", () => {
    const segs = segmentize(TEXT, [6, 10]);
    expect(segs).toEqual([
      { text: "alpha ", highlighted: false },
      { text: "beta", highlighted: true },
      { text: " gamma", highlighted: false },
    ]);
    const lit = segs.filter((s) => s.highlighted);
    expect(lit).toHaveLength(1);
    expect(lit[0].text).toBe(spanText(TEXT, [6, 10]));
  });

  it("omits empty edge segments", () => {
    expect(segmentize(TEXT, [0, TEXT.length])).toEqual([
      { text: TEXT, highlighted: true },
    ]);
  });

  it("handles no selection and empty text", () => {
    expect(segmentize(TEXT, null)).toEqual([
      { text: TEXT, highlighted: false },
    ]);
    expect(segmentize("", null)).toEqual([]);
  });
});
