// Wire types mirroring the engine's HTTP JSON API, plus the view model.

export type Expression = 'smile' | 'surprised';

export interface TurnAnnotations {
  expression: Expression;
  nod_cue: boolean;
  look_at_monitor: boolean;
  provenance: 'fixed' | 'generated' | 'retrieved';
}

export interface AgentTurn {
  ts: string;
  text: string;
  phase: string;
  annotations: TurnAnnotations;
}

export interface CreateSessionResponse {
  session_id: string;
  first_turns: AgentTurn[];
  phase: string;
  elapsed: number;
  time_budget: number;
}

export interface UtteranceResponse {
  turns: AgentTurn[];
  phase: string;
  elapsed: number;
  time_budget: number;
}

/** One line of the ndjson transcript document. */
export interface TranscriptRecord {
  ts: string;
  speaker: 'agent' | 'customer';
  phase: string;
  text: string;
  annotations?: TurnAnnotations;
}

export interface Candidates {
  candidateA: string;
  candidateB: string;
  recommended: string;
}

export interface UiMessage {
  speaker: 'agent' | 'customer';
  text: string;
  expression?: Expression;
}

export interface AvatarState {
  expression: Expression;
  nodding: boolean;
  lookingAtMonitor: boolean;
}

export interface SightCard {
  sightId: string;
  name: string | null;
  summary: string | null;
}
