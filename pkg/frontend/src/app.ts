// DOM wiring: renders the ChatSession view model into the page and feeds
// customer input back. All state lives in ChatSession; this file only paints.

import { ApiClient } from './api';
import { NodScheduler, seedFromSessionId } from './nod';
import { ChatSession } from './session';
import type { Candidates } from './types';

const PHASE_LABELS: Record<string, string> = {
  greeting: 'Greeting',
  icebreaker: 'Icebreak',
  brief_explanation: 'Explanation',
  interview: 'Interview',
  recommendation: 'Recommendation',
  qa: 'Questions',
  closing: 'Closing',
  done: 'Finished',
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function mountApp(root: Document, baseUrl: string, candidates: Candidates): ChatSession {
  const api = new ApiClient(baseUrl);
  const session = new ChatSession(api);

  const messagesBox = el<HTMLDivElement>('messages');
  const input = el<HTMLInputElement>('utterance');
  const sendButton = el<HTMLButtonElement>('send');
  const phaseBadge = el<HTMLSpanElement>('phase');
  const timerLabel = el<HTMLSpanElement>('timer');
  const face = el<HTMLDivElement>('avatar-face');
  const cardsBox = el<HTMLDivElement>('cards');
  const banner = el<HTMLDivElement>('banner');

  let nodScheduler: NodScheduler | null = null;

  function render(): void {
    messagesBox.replaceChildren(
      ...session.messages.map((message) => {
        const bubble = root.createElement('div');
        bubble.className = `msg ${message.speaker}`;
        if (message.expression === 'surprised') bubble.classList.add('surprised');
        bubble.textContent = message.text;
        return bubble;
      }),
    );
    messagesBox.scrollTop = messagesBox.scrollHeight;

    const enabled = session.inputEnabled;
    input.disabled = !enabled;
    sendButton.disabled = !enabled;
    phaseBadge.textContent = PHASE_LABELS[session.phase] ?? session.phase;

    face.className = `face ${session.avatar.expression}`;
    face.classList.toggle('monitor', session.avatar.lookingAtMonitor);

    cardsBox.replaceChildren(
      ...session.cards.map((card) => {
        const node = root.createElement('div');
        node.className = 'card';
        const title = root.createElement('h3');
        title.textContent = card.name ?? card.sightId;
        const body = root.createElement('p');
        body.textContent = card.summary ?? '';
        const imageSlot = root.createElement('div');
        imageSlot.className = 'image-slot';
        node.append(title, body, imageSlot);
        return node;
      }),
    );

    if (session.awaitingInput && !session.inFlight) {
      nodScheduler?.start();
    } else {
      nodScheduler?.stop();
      face.classList.remove('nod');
    }
  }

  function tickTimer(): void {
    timerLabel.textContent = `${Math.ceil(session.remainingSeconds)}s`;
  }

  session.onChange(render);
  setInterval(tickTimer, 500);

  async function submit(): Promise<void> {
    const text = input.value.trim();
    if (!text || !session.inputEnabled) return;
    input.value = '';
    try {
      await session.send(text);
    } catch (error) {
      banner.textContent = String(error);
      banner.hidden = false;
    }
  }

  sendButton.addEventListener('click', () => void submit());
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') void submit();
  });

  void session
    .start(candidates)
    .then(() => {
      nodScheduler = new NodScheduler(seedFromSessionId(session.sessionId), () => {
        face.classList.add('nod');
        setTimeout(() => face.classList.remove('nod'), 350);
      });
      render();
    })
    .catch((error) => {
      banner.textContent = String(error);
      banner.hidden = false;
    });

  return session;
}
