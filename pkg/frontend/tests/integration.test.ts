/**
 * Scripted end-to-end round trip against the real session service: load the
 * incr script, drive the proof tactic by tactic through the model (the same
 * path the browser uses), watch the completion banner appear, export the
 * transcript, and batch-check the exported file.  Also checks that the
 * UI-rendered context text equals the batch trace output, prefix by prefix,
 * on the incr and bank proofs.
 */
import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { UiSessionModel } from "../src/model.js";
import { blockText, DONE_BANNER, renderProofView, viewText } from "../src/view.js";

const PORT = 17831 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO = join(__dirname, "..", "..");

let server: ChildProcess;

async function waitForService(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${BASE}/healthz`);
      if (res.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "mini_iris.cli", "serve", "--port", String(PORT), "--host", "127.0.0.1"],
    { cwd: REPO, stdio: "ignore" },
  );
  await waitForService();
}, 30_000);

afterAll(() => {
  server?.kill();
});

const INCR_TACTICS = [
  'iIntros (Φ) "Hpt HΦ".',
  "wp_pures.",
  "wp_load.",
  "wp_let.",
  "wp_op.",
  "wp_store.",
  "iModIntro.",
  'iApply "HΦ".',
  "iFrame.",
];

describe("UI round trip", () => {
  it("completes incr interactively, sees the banner, and the exported file checks", async () => {
    const api = new SessionApi(BASE);
    const corpus = await api.corpus();
    const incr = corpus.find((e) => e.name === "incr");
    expect(incr).toBeDefined();

    const model = new UiSessionModel(api);
    await model.load(incr!.text, "incr_spec");
    expect(model.state?.complete).toBe(false);

    for (const t of INCR_TACTICS) {
      const state = await model.submitTactic(t);
      expect(state.error).toBeNull();
    }
    expect(model.state?.complete).toBe(true);
    expect(viewText(renderProofView(model.state!))).toContain(DONE_BANNER);

    const exported = model.exportTranscript();
    const dir = mkdtempSync(join(tmpdir(), "mini-iris-ui-"));
    const file = join(dir, "transcript.v");
    writeFileSync(file, exported, "utf-8");
    const out = execFileSync("python3", ["-m", "mini_iris.cli", "check", file], {
      cwd: REPO,
      encoding: "utf-8",
    });
    expect(out).toContain("incr_spec: proved");
  }, 30_000);

  it("errors surface inline and leave the proof view unchanged", async () => {
    const api = new SessionApi(BASE);
    const corpus = await api.corpus();
    const incr = corpus.find((e) => e.name === "incr")!;
    const model = new UiSessionModel(api);
    await model.load(incr.text, "incr_spec");
    await model.submitTactic('iIntros (Φ) "Hpt HΦ".');
    const before = blockText(model.state!);
    const state = await model.submitTactic("wp_store.");
    expect(state.error?.code).toBeTruthy();
    const text = viewText(renderProofView(state));
    expect(text).toContain(state.error!.code);
    expect(blockText(state)).toBe(before);
  }, 30_000);

  it("undo is disabled at depth zero and pops one step otherwise", async () => {
    const api = new SessionApi(BASE);
    const corpus = await api.corpus();
    const incr = corpus.find((e) => e.name === "incr")!;
    const model = new UiSessionModel(api);
    await model.load(incr.text, "incr_spec");
    expect(model.canUndo).toBe(false);
    const s0 = blockText(model.state!);
    await model.submitTactic('iIntros (Φ) "Hpt HΦ".');
    expect(model.canUndo).toBe(true);
    await model.undo();
    expect(blockText(model.state!)).toBe(s0);
  }, 30_000);
});

describe("DTO fidelity", () => {
  async function checkFidelity(name: string, lemma: string): Promise<void> {
    const api = new SessionApi(BASE);
    const corpus = await api.corpus();
    const script = corpus.find((e) => e.name === name)!;
    const model = new UiSessionModel(api);
    await model.load(script.text, lemma);
    // batch trace from the CLI, one block per tactic
    const trace = execFileSync(
      "python3",
      ["-c",
        [
          "import sys",
          "from mini_iris import script as s, corpus_files",
          `text = dict(corpus_files())[${JSON.stringify(name)}]`,
          "sc = s.parse_script(text)",
          "senv = s.ScriptEnv()",
          "for d in sc.definitions: senv.add_definition(d)",
          `lem = [l for l in sc.lemmas if l.name == ${JSON.stringify(lemma)}][0]`,
          "res = s.run_lemma(lem, senv, trace=True)",
          "sys.stdout.write('\\n====\\n'.join(res.trace))",
        ].join("\n"),
      ],
      { cwd: REPO, encoding: "utf-8" },
    ).split("\n====\n");
    // replay the full proof through the session, comparing the UI block
    // text with the trace block after every tactic sentence
    const sentences = sentencesOf(script.text, lemma);
    let k = 0;
    for (const s of sentences) {
      const state = await model.submitTactic(s);
      expect(state.error, `tactic ${s} failed`).toBeNull();
      if (s === "{" || s === "}" || /^[-+*]+$/.test(s)) {
        continue;
      }
      const expected = (trace[k] ?? "").replace(/^\d+ subgoals\n/, "");
      expect(blockText(state), `prefix ${k}: ${s}`).toBe(expected);
      k += 1;
    }
    expect(k).toBe(trace.length);
  }

  it("incr context text equals trace output for every prefix", async () => {
    await checkFidelity("incr", "incr_spec");
  }, 60_000);

  it("bank context text equals trace output for every prefix", async () => {
    await checkFidelity("bank", "bank_spec");
  }, 60_000);
});

/** Extract the proof sentences (including braces/bullets) of a lemma from
 * script text — mirroring what a user would type. */
function sentencesOf(script: string, lemma: string): string[] {
  const start = script.search(new RegExp(`(Lemma|Theorem)\\s+${lemma}\\b`));
  const proofAt = script.indexOf("Proof.", start);
  const qedAt = script.indexOf("Qed.", proofAt);
  const body = script.slice(proofAt + "Proof.".length, qedAt);
  const out: string[] = [];
  let cur = "";
  let inStr = false;
  for (const ch of body) {
    if (ch === '"') inStr = !inStr;
    if (!inStr && (ch === "{" || ch === "}") && cur.trim() === "") {
      out.push(ch);
      cur = "";
      continue;
    }
    cur += ch;
    if (!inStr && ch === ".") {
      const t = cur.trim();
      if (t === "-" || t === "+" || t === "*") {
        out.push(t);
      } else if (t.length > 0) {
        // a leading bullet may be glued to the sentence
        const m = t.match(/^([-+*]+)\s+(.*)$/s);
        if (m) {
          out.push(m[1]!);
          out.push(m[2]!);
        } else {
          out.push(t);
        }
      }
      cur = "";
    }
  }
  return out;
}
