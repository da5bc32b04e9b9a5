/** Framework-free state machine for one annotator's workflow.
 *
 * load next question -> pick an option, mark evidence spans, rate
 * difficulty -> submit (client-validated first) -> next. The UI layer
 * renders from the state and calls the mutators.
 */

import { AnnotationClient, ApiError } from "./api.js";
import { spanFromSelection } from "./spans.js";
import { validateAnnotation } from "./validation.js";
import { AnnotationBody, Difficulty, Question, Span } from "./types.js";

export type Phase = "loading" | "annotating" | "submitting" | "done" | "error";

export interface SessionState {
  phase: Phase;
  question: Question | null;
  remaining: number;
  chosenOption: number | null;
  passageSpan: Span | null;
  questionSpan: Span | null;
  difficulty: Difficulty | null;
  /** Client-side validation or server error shown to the annotator. */
  message: string | null;
  submitted: number;
}

export class AnnotationSession {
  state: SessionState = {
    phase: "loading",
    question: null,
    remaining: 0,
    chosenOption: null,
    passageSpan: null,
    questionSpan: null,
    difficulty: null,
    message: null,
    submitted: 0,
  };

  constructor(
    private readonly client: AnnotationClient,
    readonly annotatorId: string,
  ) {}

  async loadNext(): Promise<void> {
    this.state.phase = "loading";
    this.state.message = null;
    try {
      const { question, remaining } = await this.client.nextQuestion(
        this.annotatorId,
      );
      this.state.question = question;
      this.state.remaining = remaining;
      this.state.chosenOption = null;
      this.state.passageSpan = null;
      this.state.questionSpan = null;
      this.state.difficulty = null;
      this.state.phase = question === null ? "done" : "annotating";
    } catch (err) {
      this.state.phase = "error";
      this.state.message = err instanceof Error ? err.message : String(err);
    }
  }

  chooseOption(index: number): void {
    this.state.chosenOption = index;
  }

  setDifficulty(d: Difficulty): void {
    this.state.difficulty = d;
  }

  markPassage(anchor: number, focus: number): void {
    const q = this.state.question;
    if (q) this.state.passageSpan = spanFromSelection(q.article, anchor, focus);
  }

  markQuestion(anchor: number, focus: number): void {
    const q = this.state.question;
    if (q)
      this.state.questionSpan = spanFromSelection(q.question, anchor, focus);
  }

  /** Null when the current state would not form a valid submission. */
  draftBody(): AnnotationBody | null {
    const s = this.state;
    if (
      s.question === null ||
      s.chosenOption === null ||
      s.passageSpan === null ||
      s.questionSpan === null ||
      s.difficulty === null
    ) {
      return null;
    }
    return {
      question_id: s.question.id,
      annotator_id: this.annotatorId,
      chosen_option: s.chosenOption,
      passage_span: s.passageSpan,
      question_span: s.questionSpan,
      difficulty: s.difficulty,
    };
  }

  /** Validate locally, submit, and advance; returns true on success. */
  async submit(): Promise<boolean> {
    const body = this.draftBody();
    const q = this.state.question;
    if (body === null || q === null) {
      this.state.message = "pick an option, both spans, and a difficulty";
      return false;
    }
    const check = validateAnnotation(
      body,
      q.article.length,
      q.question.length,
    );
    if (!check.valid) {
      this.state.message = check.message;
      return false;
    }
    this.state.phase = "submitting";
    try {
      await this.client.submitAnnotation(body);
    } catch (err) {
      this.state.phase = "annotating";
      this.state.message =
        err instanceof ApiError && err.reason === "invalid_span"
          ? "the server rejected the evidence spans; reselect and retry"
          : err instanceof Error
            ? err.message
            : String(err);
      return false;
    }
    this.state.submitted += 1;
    await this.loadNext();
    return true;
  }
}
