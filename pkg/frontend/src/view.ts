/** Pure view layer: a StateDTO in, a DOM description out.
 *
 * The description is plain data so it can be tested without a browser; the
 * dom module materializes it.  The layout mirrors the proof-mode figures:
 * pure context, a solid rule, the □-terminated persistent block, the
 * ∗-terminated spatial block, then the goal — with subgoal tabs and
 * open-invariant badges as chrome above.  `contextLines` is the single
 * source of the text, so the view matches the batch trace output line for
 * line.
 */

import type { StateDTO } from "./dto.js";

export interface VNode {
  tag: string;
  attrs?: Record<string, string>;
  children?: (VNode | string)[];
}

export interface ViewLine {
  cls: string;
  text: string;
}

export const PERSISTENT_RULE = "-".repeat(39) + "□";
export const SPATIAL_RULE = "-".repeat(39) + "∗";
export const SOLID_RULE = "─".repeat(40);
export const DONE_BANNER = "No more subgoals.";

/** The context/goal block, one entry per rendered line; equals the batch
 * trace block for the same state (minus its subgoal-count header). */
export function contextLines(state: StateDTO): ViewLine[] {
  if (state.complete) {
    return [{ cls: "banner-done", text: DONE_BANNER }];
  }
  const lines: ViewLine[] = [];
  const pure = state.entries.filter((e) => e.kind === "pure");
  const persistent = state.entries.filter((e) => e.kind === "persistent");
  const spatial = state.entries.filter((e) => e.kind === "spatial");
  for (const e of pure) {
    lines.push({ cls: "hyp pure", text: `${e.name} : ${e.text}` });
  }
  if (pure.length > 0) {
    lines.push({ cls: "rule solid", text: SOLID_RULE });
  }
  for (const e of persistent) {
    lines.push({ cls: "hyp persistent", text: `"${e.name}" : ${e.text}` });
  }
  if (persistent.length > 0) {
    lines.push({ cls: "rule persistent", text: PERSISTENT_RULE });
  }
  for (const e of spatial) {
    lines.push({ cls: "hyp spatial", text: `"${e.name}" : ${e.text}` });
  }
  if (spatial.length > 0) {
    lines.push({ cls: "rule spatial", text: SPATIAL_RULE });
  }
  lines.push({ cls: "goal", text: state.goals[state.focus] ?? "" });
  if (state.open_invariants.length > 0) {
    lines.push({
      cls: "open-invs",
      text: "open invariants: " + state.open_invariants.join(", "),
    });
  }
  return lines;
}

function line(cls: string, text: string): VNode {
  return { tag: "div", attrs: { class: cls }, children: [text] };
}

export function renderProofView(state: StateDTO): VNode {
  const children: (VNode | string)[] = [];

  if (!state.complete && state.goals.length > 1) {
    const tabs: VNode[] = state.goals.map((_, i) =>
      line(i === state.focus ? "goal-tab focused" : "goal-tab", `${i + 1}/${state.goals.length}`),
    );
    children.push({ tag: "nav", attrs: { class: "goal-tabs" }, children: tabs });
  }
  if (!state.complete && state.open_invariants.length > 0) {
    const badges: VNode[] = state.open_invariants.map((ns) => line("inv-badge", ns));
    children.push({ tag: "div", attrs: { class: "inv-badges" }, children: badges });
  }

  const block: VNode = {
    tag: "div",
    attrs: { class: "context-block" },
    children: contextLines(state).map((l) => line(l.cls, l.text)),
  };
  children.push(block);

  if (state.error) {
    children.push(line("error-inline", `${state.error.code}: ${state.error.message}`));
  }
  return { tag: "section", attrs: { class: "proof-view" }, children };
}

/** Text of the context/goal block only (chrome excluded). */
export function blockText(state: StateDTO): string {
  return contextLines(state)
    .map((l) => l.text)
    .join("\n");
}

/** Flatten a description to its visible text, one line per text node. */
export function viewText(node: VNode | string): string {
  if (typeof node === "string") {
    return node;
  }
  return (node.children ?? []).map(viewText).join("\n");
}
