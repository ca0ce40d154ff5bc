// Client-side session state: the message list mirrors the server transcript,
// one request is in flight at a time, and the avatar follows the latest
// agent annotations. The server is the source of truth throughout.

import type {
  AgentTurn,
  AvatarState,
  Candidates,
  CreateSessionResponse,
  SightCard,
  TranscriptRecord,
  UiMessage,
  UtteranceResponse,
} from './types';

/** The slice of the API client the session consumes (stubbable in tests). */
export interface SessionApi {
  createSession(candidates: Candidates): Promise<CreateSessionResponse>;
  sendUtterance(sessionId: string, text: string): Promise<UtteranceResponse>;
  fetchTranscript(sessionId: string): Promise<TranscriptRecord[]>;
}

// Brief-explanation turns introduce both sights as "First, <name>: <summary>";
// the cards are filled from those lines since the API exposes no sight lookup.
const CARD_LINE = /^(?:First|And second), ([^:]+): (.+)$/;

export type SessionListener = () => void;

export class ChatSession {
  readonly messages: UiMessage[] = [];
  readonly cards: SightCard[] = [];
  sessionId = '';
  phase = '';
  avatar: AvatarState = { expression: 'smile', nodding: false, lookingAtMonitor: false };
  awaitingInput = false;

  private inFlightFlag = false;
  private timeBudget = 0;
  private serverElapsed = 0;
  private anchoredAt = 0;
  private listeners: SessionListener[] = [];

  constructor(
    private readonly api: SessionApi,
    private readonly now: () => number = () => Date.now(),
  ) {}

  onChange(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  get inFlight(): boolean {
    return this.inFlightFlag;
  }

  get done(): boolean {
    return this.phase === 'done';
  }

  get inputEnabled(): boolean {
    return this.sessionId !== '' && !this.inFlightFlag && !this.done;
  }

  /** Countdown anchored on the server's elapsed figure, not a local clock. */
  get remainingSeconds(): number {
    if (this.sessionId === '') return 0;
    const drift = (this.now() - this.anchoredAt) / 1000;
    return Math.max(0, this.timeBudget - (this.serverElapsed + drift));
  }

  async start(candidates: Candidates): Promise<void> {
    if (this.sessionId !== '') throw new Error('session already started');
    this.cards.push(
      { sightId: candidates.candidateA, name: null, summary: null },
      { sightId: candidates.candidateB, name: null, summary: null },
    );
    this.inFlightFlag = true;
    this.notify();
    try {
      const created = await this.api.createSession(candidates);
      this.sessionId = created.session_id;
      this.applyServerState(created.phase, created.elapsed, created.time_budget);
      this.appendAgentTurns(created.first_turns);
    } catch (error) {
      // no partial session: leave the view empty for the error banner
      this.cards.length = 0;
      throw error;
    } finally {
      this.inFlightFlag = false;
      this.notify();
    }
  }

  async send(text: string): Promise<void> {
    if (!this.inputEnabled) throw new Error('input is disabled');
    this.inFlightFlag = true;
    this.awaitingInput = false;
    this.avatar = { ...this.avatar, nodding: false };
    this.messages.push({ speaker: 'customer', text }); // optimistic echo
    this.notify();
    try {
      const reply = await this.api.sendUtterance(this.sessionId, text);
      this.applyServerState(reply.phase, reply.elapsed, reply.time_budget);
      this.appendAgentTurns(reply.turns);
    } catch (error) {
      this.messages.pop(); // roll the echo back; the list must mirror the server
      throw error;
    } finally {
      this.inFlightFlag = false;
      this.notify();
    }
  }

  /** Re-fetch the transcript and rebuild the list (e.g. after a reload). */
  async refreshFromTranscript(): Promise<void> {
    const records = await this.api.fetchTranscript(this.sessionId);
    this.messages.length = 0;
    for (const record of records) {
      this.messages.push(messageFromRecord(record));
      if (record.speaker === 'agent') this.fillCards(record.text);
    }
    this.notify();
  }

  private applyServerState(phase: string, elapsed: number, timeBudget: number): void {
    this.phase = phase;
    this.serverElapsed = elapsed;
    this.timeBudget = timeBudget;
    this.anchoredAt = this.now();
  }

  private appendAgentTurns(turns: AgentTurn[]): void {
    for (const turn of turns) {
      this.messages.push({
        speaker: 'agent',
        text: turn.text,
        expression: turn.annotations.expression,
      });
      this.fillCards(turn.text);
    }
    const last = turns[turns.length - 1];
    if (last !== undefined) {
      this.awaitingInput = last.annotations.nod_cue && !this.done;
      this.avatar = {
        expression: last.annotations.expression,
        nodding: this.awaitingInput,
        lookingAtMonitor: last.annotations.look_at_monitor,
      };
    }
    this.notify();
  }

  private fillCards(text: string): void {
    // "First, A: ..." arrives before "And second, B: ...", matching card order.
    const match = CARD_LINE.exec(text);
    if (!match) return;
    const [, name, summary] = match;
    const blank = this.cards.find((card) => card.name === null);
    if (blank) {
      blank.name = name;
      blank.summary = summary;
    }
  }
}

export function messageFromRecord(record: TranscriptRecord): UiMessage {
  const message: UiMessage = { speaker: record.speaker, text: record.text };
  if (record.annotations) message.expression = record.annotations.expression;
  return message;
}
