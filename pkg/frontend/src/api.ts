// Thin fetch client for the dialog-engine HTTP API.

import type {
  Candidates,
  CreateSessionResponse,
  TranscriptRecord,
  UtteranceResponse,
} from './types';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(`API ${status}: ${detail}`);
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  async createSession(candidates: Candidates): Promise<CreateSessionResponse> {
    const response = await fetch(`${this.baseUrl}/sessions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({
        candidate_a: candidates.candidateA,
        candidate_b: candidates.candidateB,
        recommended: candidates.recommended,
      }),
    });
    await raiseForStatus(response);
    return (await response.json()) as CreateSessionResponse;
  }

  async sendUtterance(sessionId: string, text: string): Promise<UtteranceResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/utterance`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    });
    await raiseForStatus(response);
    return (await response.json()) as UtteranceResponse;
  }

  /** GET the ndjson transcript and parse it line by line. */
  async fetchTranscript(sessionId: string): Promise<TranscriptRecord[]> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/transcript`);
    await raiseForStatus(response);
    const text = await response.text();
    return text
      .split('\n')
      .filter((line) => line.trim().length > 0)
      .map((line) => JSON.parse(line) as TranscriptRecord);
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(`${this.baseUrl}/healthz`);
      return response.ok;
    } catch {
      return false;
    }
  }
}
