/** Browser bootstrap: wires the session state machine to the page. */

import { AnnotationClient } from "./api.js";
import { AnnotationSession } from "./session.js";
import { render } from "./render.js";
import { Difficulty } from "./types.js";

function selectionOffsets(container: HTMLElement): [number, number] | null {
  const sel = window.getSelection();
  if (!sel || sel.rangeCount === 0 || sel.isCollapsed) return null;
  const range = sel.getRangeAt(0);
  if (!container.contains(range.commonAncestorContainer)) return null;
  // measure offsets against the container's full text content
  const pre = range.cloneRange();
  pre.selectNodeContents(container);
  pre.setEnd(range.startContainer, range.startOffset);
  const start = pre.toString().length;
  return [start, start + range.toString().length];
}

export function mount(root: HTMLElement, annotatorId: string): void {
  const client = new AnnotationClient({ baseUrl: "" });
  const session = new AnnotationSession(client, annotatorId);

  const repaint = () => {
    root.innerHTML = render(session.state);
  };

  root.addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    if (input.name === "option") session.chooseOption(Number(input.value));
    if (input.name === "difficulty")
      session.setDifficulty(input.value as Difficulty);
  });
  root.addEventListener("mouseup", () => {
    for (const [id, mark] of [
      ["passage", session.markPassage.bind(session)],
      ["question", session.markQuestion.bind(session)],
    ] as const) {
      const el = root.querySelector<HTMLElement>(`#${id}`);
      if (!el) continue;
      const span = selectionOffsets(el);
      if (span) {
        mark(span[0], span[1]);
        repaint();
      }
    }
  });
  root.addEventListener("click", async (ev) => {
    if ((ev.target as HTMLElement).id === "submit") {
      await session.submit();
      repaint();
    }
  });

  void session.loadNext().then(repaint);
}
