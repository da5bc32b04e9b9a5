/** Client-side mirror of the server's annotation validity rules.
 *
 * The checks (and their order) match the server exactly, so anything
 * accepted here is accepted by the API and vice versa; the server remains
 * the authority and the client only uses this for early feedback.
 */

import { AnnotationBody, DIFFICULTIES, Difficulty, Span } from "./types.js";

export interface ValidationResult {
  valid: boolean;
  /** First failing rule, mirroring the server's error categories. */
  error:
    | null
    | "chosen_option"
    | "difficulty"
    | "passage_span"
    | "question_span";
  message: string | null;
}

const OK: ValidationResult = { valid: true, error: null, message: null };

function checkSpan(
  name: "passage_span" | "question_span",
  [start, end]: Span,
  limit: number | null,
): ValidationResult | null {
  if (!Number.isInteger(start) || !Number.isInteger(end)) {
    return {
      valid: false,
      error: name,
      message: `${name} offsets must be integers`,
    };
  }
  if (start < 0 || start >= end) {
    return {
      valid: false,
      error: name,
      message: `${name} must be nonempty: (${start}, ${end})`,
    };
  }
  if (limit !== null && end > limit) {
    return {
      valid: false,
      error: name,
      message: `${name} exceeds text length ${limit}`,
    };
  }
  return null;
}

export function validateAnnotation(
  body: AnnotationBody,
  passageLen: number | null = null,
  questionLen: number | null = null,
): ValidationResult {
  if (
    !Number.isInteger(body.chosen_option) ||
    body.chosen_option < 0 ||
    body.chosen_option > 4
  ) {
    return {
      valid: false,
      error: "chosen_option",
      message: "chosen_option must be in 0..4",
    };
  }
  if (!DIFFICULTIES.includes(body.difficulty as Difficulty)) {
    return {
      valid: false,
      error: "difficulty",
      message: `difficulty must be one of ${DIFFICULTIES.join(", ")}`,
    };
  }
  return (
    checkSpan("passage_span", body.passage_span, passageLen) ??
    checkSpan("question_span", body.question_span, questionLen) ??
    OK
  );
}
