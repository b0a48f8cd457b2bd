/** Session model: transcript, optimistic request lock, export, resync.
 *
 * All proof transformations go through the service; the model just records
 * what was sent and what came back.  One request is in flight per session
 * at most, and stale responses are discarded by sequence number.
 */

import { ApiError, SessionApi } from "./api.js";
import type { StateDTO } from "./dto.js";
import { expandInput } from "./palette.js";

export interface TranscriptItem {
  sent: string;
  ok: boolean;
  errorCode?: string;
}

export class UiSessionModel {
  id: string | null = null;
  state: StateDTO | null = null;
  transcript: TranscriptItem[] = [];
  pending = false;
  lastNetworkError: string | null = null;

  private seq = 0;
  private script = "";
  private lemma = "";

  constructor(readonly api: SessionApi) {}

  async load(script: string, lemma: string): Promise<StateDTO> {
    const res = await this.api.createSession(script, lemma);
    this.id = res.id;
    this.state = res.state;
    this.script = script;
    this.lemma = lemma;
    this.transcript = [];
    this.pending = false;
    this.seq += 1;
    return res.state;
  }

  /** Send one tactic sentence; on tactic errors the view shows the message
   * and the transcript records the rejected attempt. */
  async submitTactic(raw: string): Promise<StateDTO> {
    if (this.id === null || this.state === null) {
      throw new Error("no session loaded");
    }
    if (this.pending) {
      throw new Error("a request is already in flight");
    }
    const text = expandInput(raw.trim());
    this.pending = true;
    const mySeq = ++this.seq;
    try {
      const res = await this.api.applyTactic(this.id, text);
      if (mySeq !== this.seq) {
        return this.state; // stale response: a newer action superseded it
      }
      this.state = res.state;
      this.transcript.push({
        sent: text,
        ok: res.error === null,
        ...(res.error ? { errorCode: res.error.code } : {}),
      });
      this.lastNetworkError = null;
      return res.state;
    } catch (err) {
      if (err instanceof ApiError) {
        throw err;
      }
      this.lastNetworkError = String(err); // retry affordance; transcript unchanged
      throw err;
    } finally {
      this.pending = false;
    }
  }

  get canUndo(): boolean {
    return this.transcript.some((t) => t.ok);
  }

  async undo(): Promise<StateDTO> {
    if (this.id === null) {
      throw new Error("no session loaded");
    }
    const res = await this.api.undo(this.id);
    this.seq += 1;
    this.state = res.state;
    for (let i = this.transcript.length - 1; i >= 0; i--) {
      const item = this.transcript[i];
      if (item && item.ok) {
        this.transcript.splice(i, 1);
        break;
      }
    }
    return res.state;
  }

  /** Replay the successful transcript against a fresh session; the result
   * must reproduce the current state (the invariant the resync button
   * relies on). */
  async resync(): Promise<StateDTO> {
    const sent = this.transcript.filter((t) => t.ok).map((t) => t.sent);
    const res = await this.api.createSession(this.script, this.lemma);
    this.id = res.id;
    this.state = res.state;
    for (const text of sent) {
      const r = await this.api.applyTactic(this.id, text);
      this.state = r.state;
    }
    this.seq += 1;
    return this.state;
  }

  /** The transcript as a runnable script: the original file with this
   * lemma's proof replaced by the successfully applied sentences. */
  exportTranscript(): string {
    const sentences = this.transcript.filter((t) => t.ok).map((t) => t.sent);
    return spliceProof(this.script, this.lemma, sentences);
  }
}

/** Replace the Proof…Qed block of `lemma` inside `script` with the given
 * sentences (text surgery only; the checker re-validates the result). */
export function spliceProof(script: string, lemma: string, sentences: string[]): string {
  const header = new RegExp(`(Lemma|Theorem)\\s+${lemma}\\b`);
  const start = script.search(header);
  if (start < 0) {
    throw new Error(`lemma ${lemma} not found in script`);
  }
  const proofAt = script.indexOf("Proof.", start);
  const qedAt = script.indexOf("Qed.", proofAt);
  if (proofAt < 0 || qedAt < 0) {
    throw new Error(`no Proof/Qed block for ${lemma}`);
  }
  const body = sentences
    .map((s) => (s.endsWith(".") || s === "{" || s === "}" || /^[-+*]+$/.test(s) ? s : `${s}.`))
    .join("\n");
  return `${script.slice(0, proofAt)}Proof.\n${body}\n${script.slice(qedAt)}`;
}
