import { describe, expect, it } from "vitest";

import type { StateDTO } from "../src/dto.js";
import {
  blockText,
  DONE_BANNER,
  PERSISTENT_RULE,
  renderProofView,
  SPATIAL_RULE,
  viewText,
} from "../src/view.js";

function dto(partial: Partial<StateDTO>): StateDTO {
  return {
    version: 1,
    entries: [],
    goals: ["True"],
    focus: 0,
    open_invariants: [],
    complete: false,
    rendered: "True",
    error: null,
    ...partial,
  };
}

const POST_INTROS: StateDTO = dto({
  entries: [
    { name: "ℓ", text: "loc", kind: "pure" },
    { name: "n", text: "Z", kind: "pure" },
    { name: "Φ", text: "val → iProp", kind: "pure" },
    { name: "Hpt", text: "ℓ ↦ #n", kind: "spatial" },
    { name: "HΦ", text: "ℓ ↦ #(n + 1) -∗ Φ #()", kind: "spatial" },
  ],
  goals: ["WP incr #ℓ {{ v, Φ v }}"],
});

describe("renderProofView", () => {
  it("shows spatial hypotheses above the ∗ rule", () => {
    const text = viewText(renderProofView(POST_INTROS));
    const lines = text.split("\n");
    const star = lines.indexOf(SPATIAL_RULE);
    expect(star).toBeGreaterThan(0);
    expect(lines.slice(0, star)).toContain('"Hpt" : ℓ ↦ #n');
    expect(lines.slice(0, star)).toContain('"HΦ" : ℓ ↦ #(n + 1) -∗ Φ #()');
    expect(lines[lines.length - 1]).toBe("WP incr #ℓ {{ v, Φ v }}");
  });

  it("shows persistent hypotheses in the □ block", () => {
    const state = dto({
      entries: [{ name: "HInv", text: "inv N (ℓ ↦ #0)", kind: "persistent" }],
    });
    const lines = viewText(renderProofView(state)).split("\n");
    const box = lines.indexOf(PERSISTENT_RULE);
    expect(box).toBeGreaterThan(0);
    expect(lines.slice(0, box)).toContain('"HInv" : inv N (ℓ ↦ #0)');
  });

  it("renders subgoal tabs with the focus highlighted", () => {
    const state = dto({ goals: ["true = true", "false = false"], focus: 0 });
    const view = renderProofView(state);
    const text = viewText(view);
    expect(text).toContain("1/2");
    expect(text).toContain("2/2");
    const tabs = JSON.stringify(view);
    expect(tabs).toContain("goal-tab focused");
  });

  it("renders the completion banner", () => {
    const state = dto({ complete: true, goals: [], rendered: DONE_BANNER });
    expect(viewText(renderProofView(state))).toContain(DONE_BANNER);
  });

  it("renders inline errors", () => {
    const state = dto({ error: { code: "NoPointsTo", message: "no points-to for ℓ" } });
    expect(viewText(renderProofView(state))).toContain("NoPointsTo: no points-to for ℓ");
  });

  it("shows open-invariant badges", () => {
    const state = dto({ open_invariants: ["N"] });
    expect(JSON.stringify(renderProofView(state))).toContain("inv-badge");
  });

  it("is a pure function of the DTO", () => {
    const a = renderProofView(POST_INTROS);
    const b = renderProofView(POST_INTROS);
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });

  it("block text equals the service-rendered block for single goals", () => {
    // the service's `rendered` field is the same text the batch tracer
    // prints; for single-goal states the block must match it exactly
    const rendered = [
      "ℓ : loc",
      "n : Z",
      "Φ : val → iProp",
      "─".repeat(40),
      '"Hpt" : ℓ ↦ #n',
      '"HΦ" : ℓ ↦ #(n + 1) -∗ Φ #()',
      SPATIAL_RULE,
      "WP incr #ℓ {{ v, Φ v }}",
    ].join("\n");
    expect(blockText(POST_INTROS)).toBe(rendered);
  });
});
