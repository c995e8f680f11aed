/** Central UI state: what is selected, which panels are live.
 *
 * The chat panel is enabled only while a session exists, and the documents
 * panel always reflects the most recent retrieval. Selection state mirrors
 * into the URL query so views are shareable.
 */

export interface WordTimePair {
  word: string;
  time: number;
}

export interface UiState {
  topic: number | null;
  trendWords: string[];
  pair: WordTimePair | null;
  sessionId: string | null;
}

export type Listener = (state: UiState) => void;

export function initialState(): UiState {
  return { topic: null, trendWords: [], pair: null, sessionId: null };
}

export class Store {
  private state: UiState;
  private listeners: Listener[] = [];

  constructor(state: UiState = initialState()) {
    this.state = state;
  }

  get(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(next: UiState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  selectTopic(topic: number): void {
    // A new topic invalidates the pair-scoped panels and any chat session.
    this.emit({ topic, trendWords: [], pair: null, sessionId: null });
  }

  setTrendWords(words: string[]): void {
    this.emit({ ...this.state, trendWords: words });
  }

  toggleTrendWord(word: string): void {
    const current = this.state.trendWords;
    const next = current.includes(word)
      ? current.filter((w) => w !== word)
      : [...current, word];
    this.setTrendWords(next);
  }

  selectPair(pair: WordTimePair): void {
    // New retrieval target: any existing chat session is no longer grounded
    // in the shown documents, so it is dropped.
    this.emit({ ...this.state, pair, sessionId: null });
  }

  setSession(sessionId: string): void {
    this.emit({ ...this.state, sessionId });
  }

  chatEnabled(): boolean {
    return this.state.sessionId !== null;
  }
}

export function stateToQuery(state: UiState): string {
  const params = new URLSearchParams();
  if (state.topic !== null) params.set("topic", String(state.topic));
  if (state.trendWords.length > 0) params.set("words", state.trendWords.join(","));
  if (state.pair) {
    params.set("word", state.pair.word);
    params.set("time", String(state.pair.time));
  }
  const query = params.toString();
  return query ? `?${query}` : "";
}

export function stateFromQuery(query: string): UiState {
  const params = new URLSearchParams(query);
  const state = initialState();
  const topic = params.get("topic");
  if (topic !== null && /^\d+$/.test(topic)) state.topic = Number(topic);
  const words = params.get("words");
  if (words) state.trendWords = words.split(",").filter((w) => w.length > 0);
  const word = params.get("word");
  const time = params.get("time");
  if (word && time !== null && /^\d+$/.test(time)) {
    state.pair = { word, time: Number(time) };
  }
  return state;
}
