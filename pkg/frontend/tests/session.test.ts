import { describe, expect, it } from 'vitest';

import { ChatSession } from '../src/session';
import type { SessionApi } from '../src/session';
import type { AgentTurn, CreateSessionResponse, UtteranceResponse } from '../src/types';

function turn(text: string, overrides: Partial<AgentTurn['annotations']> = {}, phase = 'icebreaker'): AgentTurn {
  return {
    ts: '2026-01-01T09:00:00.000000+00:00',
    text,
    phase,
    annotations: {
      expression: text.includes('!') ? 'surprised' : 'smile',
      nod_cue: false,
      look_at_monitor: false,
      provenance: 'fixed',
      ...overrides,
    },
  };
}

const CANDIDATES = { candidateA: 'daiba_park', candidateB: 'trick_art_museum', recommended: 'trick_art_museum' };

class StubApi implements SessionApi {
  created: CreateSessionResponse = {
    session_id: 'sess1',
    first_turns: [turn('Hello.', {}, 'greeting'), turn('What do you do?', { nod_cue: true })],
    phase: 'icebreaker',
    elapsed: 0,
    time_budget: 300,
  };
  replies: UtteranceResponse[] = [];
  failNext = false;
  pending: Array<() => void> = [];
  sent: string[] = [];

  async createSession(): Promise<CreateSessionResponse> {
    return this.created;
  }

  async sendUtterance(_id: string, text: string): Promise<UtteranceResponse> {
    this.sent.push(text);
    if (this.failNext) {
      this.failNext = false;
      throw new Error('boom');
    }
    const reply = this.replies.shift();
    if (!reply) throw new Error('no scripted reply left');
    return reply;
  }

  async fetchTranscript() {
    return [];
  }
}

describe('ChatSession', () => {
  it('renders greeting turns and enables input after start', async () => {
    const session = new ChatSession(new StubApi());
    await session.start(CANDIDATES);
    expect(session.messages.map((m) => m.text)).toEqual(['Hello.', 'What do you do?']);
    expect(session.inputEnabled).toBe(true);
    expect(session.awaitingInput).toBe(true);
  });

  it('echoes the customer optimistically and appends agent turns', async () => {
    const api = new StubApi();
    api.replies.push({ turns: [turn('Nice!')], phase: 'icebreaker', elapsed: 5, time_budget: 300 });
    const session = new ChatSession(api);
    await session.start(CANDIDATES);
    await session.send('I paint.');
    expect(session.messages.map((m) => m.text)).toEqual(['Hello.', 'What do you do?', 'I paint.', 'Nice!']);
    expect(session.messages[2].speaker).toBe('customer');
  });

  it('maps exclamation turns to the surprised avatar', async () => {
    const api = new StubApi();
    api.replies.push({ turns: [turn('How lovely!')], phase: 'icebreaker', elapsed: 5, time_budget: 300 });
    const session = new ChatSession(api);
    await session.start(CANDIDATES);
    expect(session.avatar.expression).toBe('smile');
    await session.send('hello');
    expect(session.avatar.expression).toBe('surprised');
  });

  it('keeps exactly one request in flight', async () => {
    const api = new StubApi();
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));
    api.sendUtterance = async (_id, text) => {
      api.sent.push(text);
      await gate;
      return { turns: [turn('Done.')], phase: 'icebreaker', elapsed: 5, time_budget: 300 };
    };
    const session = new ChatSession(api);
    await session.start(CANDIDATES);

    const pending = session.send('first');
    expect(session.inFlight).toBe(true);
    expect(session.inputEnabled).toBe(false);
    await expect(session.send('second')).rejects.toThrow('input is disabled');
    release();
    await pending;
    expect(session.inFlight).toBe(false);
    expect(api.sent).toEqual(['first']);
  });

  it('rolls the optimistic echo back when the request fails', async () => {
    const api = new StubApi();
    api.failNext = true;
    const session = new ChatSession(api);
    await session.start(CANDIDATES);
    await expect(session.send('lost line')).rejects.toThrow('boom');
    expect(session.messages.map((m) => m.text)).toEqual(['Hello.', 'What do you do?']);
    expect(session.inputEnabled).toBe(true);
  });

  it('disables input permanently once the phase is done', async () => {
    const api = new StubApi();
    api.replies.push({
      turns: [turn('Farewell.', {}, 'closing')],
      phase: 'done',
      elapsed: 100,
      time_budget: 300,
    });
    const session = new ChatSession(api);
    await session.start(CANDIDATES);
    await session.send('no questions');
    expect(session.done).toBe(true);
    expect(session.inputEnabled).toBe(false);
    expect(session.awaitingInput).toBe(false);
  });

  it('derives the countdown from the server elapsed figure', async () => {
    let nowMs = 100_000;
    const api = new StubApi();
    api.created = { ...api.created, elapsed: 30, time_budget: 300 };
    const session = new ChatSession(api, () => nowMs);
    await session.start(CANDIDATES);
    expect(session.remainingSeconds).toBeCloseTo(270, 5);
    nowMs += 10_000; // local clock only drifts on top of the server anchor
    expect(session.remainingSeconds).toBeCloseTo(260, 5);
  });

  it('fills sight cards from the explanation turns', async () => {
    const api = new StubApi();
    api.replies.push({
      turns: [
        turn('First, Daiba Park: Daiba Park preserves an old battery.', {}, 'brief_explanation'),
        turn('And second, Tokyo Trick Art Museum: Tokyo Trick Art Museum fills rooms with illusions.', {}, 'brief_explanation'),
      ],
      phase: 'brief_explanation',
      elapsed: 20,
      time_budget: 300,
    });
    const session = new ChatSession(api);
    await session.start(CANDIDATES);
    await session.send('no');
    expect(session.cards[0].name).toBe('Daiba Park');
    expect(session.cards[1].name).toBe('Tokyo Trick Art Museum');
    expect(session.cards[1].summary).toContain('illusions');
  });

  it('no partial session remains when creation fails', async () => {
    const api = new StubApi();
    api.createSession = async () => {
      throw new Error('400: unknown sight');
    };
    const session = new ChatSession(api);
    await expect(session.start(CANDIDATES)).rejects.toThrow('unknown sight');
    expect(session.sessionId).toBe('');
    expect(session.messages).toHaveLength(0);
    expect(session.cards).toHaveLength(0);
    expect(session.inputEnabled).toBe(false);
  });
});
