/** Shared types for the annotation API payloads. */

export type Difficulty = "easy" | "medium" | "hard";

export const DIFFICULTIES: readonly Difficulty[] = ["easy", "medium", "hard"];

/** A question as served by the API (gold label is never included). */
export interface Question {
  id: string;
  article: string;
  question: string;
  option_0: string;
  option_1: string;
  option_2: string;
  option_3: string;
  option_4: string;
}

export function options(q: Question): string[] {
  return [q.option_0, q.option_1, q.option_2, q.option_3, q.option_4];
}

/** Half-open character span [start, end) into a text. */
export type Span = [number, number];

export interface AnnotationBody {
  question_id: string;
  annotator_id: string;
  chosen_option: number;
  passage_span: Span;
  question_span: Span;
  difficulty: Difficulty;
}

export interface NextQuestionResponse {
  question: Question | null;
  remaining: number;
}

export interface SubmitResponse {
  status: string;
  question_id: string;
  annotator_id: string;
}

export interface ExportResponse {
  records: Array<AnnotationBody & { timestamp: string }>;
}

export interface SelectionResponse {
  kept_question_ids: string[];
  rejected: Record<string, string>;
  annotator_stats: Record<string, { n: number; accuracy: number }>;
}
