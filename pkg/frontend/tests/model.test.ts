import { describe, expect, it } from "vitest";

import type { SessionApi } from "../src/api.js";
import type { StateDTO, TacticError } from "../src/dto.js";
import { spliceProof, UiSessionModel } from "../src/model.js";

function dto(goals: string[], error: TacticError | null = null): StateDTO {
  return {
    version: 1,
    entries: [],
    goals,
    focus: 0,
    open_invariants: [],
    complete: goals.length === 0,
    rendered: goals.join("\n") || "No more subgoals.",
    error,
  };
}

/** A fake service: every "ok." tactic discharges one goal; "bad." errors. */
function fakeApi(): SessionApi {
  const stack: StateDTO[] = [dto(["g1", "g2"])];
  const api = {
    corpus: async () => [],
    createSession: async () => {
      stack.length = 0;
      stack.push(dto(["g1", "g2"]));
      return { id: "s1", state: stack[0]! };
    },
    applyTactic: async (_id: string, text: string) => {
      const cur = stack[stack.length - 1]!;
      if (text.startsWith("bad")) {
        return { state: { ...cur, error: { code: "Boom", message: "no" } }, error: { code: "Boom", message: "no" } };
      }
      const next = dto(cur.goals.slice(1));
      stack.push(next);
      return { state: next, error: null };
    },
    undo: async () => {
      if (stack.length <= 1) throw new Error("409");
      stack.pop();
      return { state: stack[stack.length - 1]! };
    },
    getState: async () => ({ state: stack[stack.length - 1]! }),
  };
  return api as unknown as SessionApi;
}

const SCRIPT = `Definition d : expr := #1.

Lemma demo : {{{ True }}} #1 {{{ RET #1; True }}}.
Proof.
old_tactic.
Qed.
`;

describe("UiSessionModel", () => {
  it("appends successful tactics to the transcript", async () => {
    const m = new UiSessionModel(fakeApi());
    await m.load(SCRIPT, "demo");
    await m.submitTactic("ok one.");
    await m.submitTactic("ok two.");
    expect(m.transcript.map((t) => t.sent)).toEqual(["ok one.", "ok two."]);
    expect(m.state?.complete).toBe(true);
  });

  it("records rejected tactics and keeps the goal view", async () => {
    const m = new UiSessionModel(fakeApi());
    await m.load(SCRIPT, "demo");
    await m.submitTactic("bad idea.");
    expect(m.transcript).toHaveLength(1);
    expect(m.transcript[0]?.ok).toBe(false);
    expect(m.transcript[0]?.errorCode).toBe("Boom");
    expect(m.state?.goals).toEqual(["g1", "g2"]);
  });

  it("expands backslash input before sending", async () => {
    const m = new UiSessionModel(fakeApi());
    await m.load(SCRIPT, "demo");
    await m.submitTactic("ok \\mapsto.");
    expect(m.transcript[0]?.sent).toBe("ok ↦.");
  });

  it("undo pops the last successful transcript entry", async () => {
    const m = new UiSessionModel(fakeApi());
    await m.load(SCRIPT, "demo");
    await m.submitTactic("ok one.");
    expect(m.canUndo).toBe(true);
    await m.undo();
    expect(m.transcript).toEqual([]);
    expect(m.state?.goals).toEqual(["g1", "g2"]);
    expect(m.canUndo).toBe(false);
  });

  it("rejects overlapping requests", async () => {
    const m = new UiSessionModel(fakeApi());
    await m.load(SCRIPT, "demo");
    const first = m.submitTactic("ok one.");
    await expect(m.submitTactic("ok two.")).rejects.toThrow("in flight");
    await first;
  });

  it("resync replays the transcript onto a fresh session", async () => {
    const m = new UiSessionModel(fakeApi());
    await m.load(SCRIPT, "demo");
    await m.submitTactic("ok one.");
    const before = JSON.stringify(m.state);
    const after = await m.resync();
    expect(JSON.stringify(after)).toBe(before);
  });

  it("exports the successful transcript as a runnable script", async () => {
    const m = new UiSessionModel(fakeApi());
    await m.load(SCRIPT, "demo");
    await m.submitTactic("ok one.");
    await m.submitTactic("bad.");
    await m.submitTactic("ok two.");
    const out = m.exportTranscript();
    expect(out).toContain("Proof.\nok one.\nok two.\nQed.");
    expect(out).not.toContain("old_tactic");
    expect(out).not.toContain("bad.");
    expect(out).toContain("Definition d : expr := #1.");
  });
});

describe("spliceProof", () => {
  it("replaces only the target lemma's proof block", () => {
    const two = `${SCRIPT}
Lemma other : {{{ True }}} #2 {{{ RET #2; True }}}.
Proof.
keep_me.
Qed.
`;
    const out = spliceProof(two, "demo", ["done"]);
    expect(out).toContain("Proof.\ndone.\nQed.");
    expect(out).toContain("keep_me.");
  });

  it("keeps structural items unterminated", () => {
    const out = spliceProof(SCRIPT, "demo", ["{", "iNext", "}", "-"]);
    expect(out).toContain("{\niNext.\n}\n-");
  });
});
