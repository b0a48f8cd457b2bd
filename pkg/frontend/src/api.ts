/** Thin typed client for the session service; no proof logic lives here. */

import type { CorpusEntry, CreateResponse, StateDTO, TacticResponse } from "./dto.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service error ${status}`);
  }
}

async function expectJson<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail: unknown = null;
    try {
      detail = await res.json();
    } catch {
      /* no body */
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class SessionApi {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async corpus(): Promise<CorpusEntry[]> {
    return expectJson(await fetch(this.url("/corpus")));
  }

  async createSession(script: string, lemma: string): Promise<CreateResponse> {
    const res = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ script, lemma }),
    });
    return expectJson(res);
  }

  async applyTactic(id: string, text: string): Promise<TacticResponse> {
    const res = await fetch(this.url(`/sessions/${id}/tactic`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
    return expectJson(res);
  }

  async undo(id: string): Promise<{ state: StateDTO }> {
    const res = await fetch(this.url(`/sessions/${id}/undo`), { method: "POST" });
    return expectJson(res);
  }

  async getState(id: string): Promise<{ state: StateDTO }> {
    const res = await fetch(this.url(`/sessions/${id}/state`));
    return expectJson(res);
  }
}
