/** Wire types for the session service (schema/state_dto_v1.json). */

export type EntryKind = "pure" | "persistent" | "spatial";

export interface ContextEntry {
  name: string;
  text: string;
  kind: EntryKind;
}

export interface TacticError {
  code: string;
  message: string;
}

export interface StateDTO {
  version: 1;
  entries: ContextEntry[];
  goals: string[];
  focus: number;
  open_invariants: string[];
  complete: boolean;
  rendered: string;
  error: TacticError | null;
}

export interface CorpusEntry {
  name: string;
  text: string;
}

export interface CreateResponse {
  id: string;
  state: StateDTO;
}

export interface TacticResponse {
  state: StateDTO;
  error: TacticError | null;
}
