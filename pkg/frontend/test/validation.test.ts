// Rule-parity: the client validator must agree with the server's recorded
// verdicts on every fixture case (fixtures are generated from the live API
// implementation).
import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { validateAnnotation } from "../src/validation.js";
import { AnnotationBody, Difficulty, Span } from "../src/types.js";

interface FixtureCase {
  chosen_option: number;
  passage_span: number[];
  question_span: number[];
  difficulty: string;
  valid: boolean;
  error: string | null;
}

const here = dirname(fileURLToPath(import.meta.url));
const fixture = JSON.parse(
  readFileSync(join(here, "fixtures", "validation-cases.json"), "utf-8"),
) as { passage_len: number; question_len: number; cases: FixtureCase[] };

function toBody(c: FixtureCase): AnnotationBody {
  return {
    question_id: "0",
    annotator_id: "a",
    chosen_option: c.chosen_option,
    passage_span: c.passage_span as Span,
    question_span: c.question_span as Span,
    difficulty: c.difficulty as Difficulty,
  };
}

describe("validation parity with the server", () => {
  it("has a meaningful mix of fixture cases", () => {
    const verdicts = new Set(fixture.cases.map((c) => c.valid));
    expect(verdicts).toEqual(new Set([true, false]));
    expect(fixture.cases.length).toBeGreaterThanOrEqual(10);
  });

  for (const [i, c] of fixture.cases.entries()) {
    it(`case ${i}: ${c.valid ? "accepted" : "rejected"} by both sides`, () => {
      const result = validateAnnotation(
        toBody(c),
        fixture.passage_len,
        fixture.question_len,
      );
      expect(result.valid).toBe(c.valid);
      if (!c.valid && c.error) {
        // the server message names the failing field first
        const serverField = c.error.split(" ")[0];
        expect(result.error).toBe(serverField);
        if (c.error.includes("nonempty") || c.error.includes("exceeds")) {
          expect(result.message).toBe(c.error);
        }
      }
    });
  }

  it("bounds are optional for early pre-submit feedback", () => {
    const body = toBody(fixture.cases[0]);
    expect(validateAnnotation(body).valid).toBe(true);
  });
});
