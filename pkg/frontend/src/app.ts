/** Panel orchestration: topic list, trend chart, documents, summary, chat.
 *
 * Every user action maps to exactly one service call; no score or metric is
 * recomputed client-side. Highlights come from the server's byte spans.
 * Failures surface as a toast, never silently.
 */

import { Api, ApiError } from "./api.js";
import { renderLegend, renderTrendChart } from "./chart.js";
import { renderHighlighted } from "./highlight.js";
import { Store, stateToQuery } from "./state.js";
import type { RetrieveResponse, SalientScore, Topic } from "./types.js";

const REFUSAL_SENTINEL = "The information is not available in the documents provided.";
const DEFAULT_TREND_WORDS = 5;

export interface AppOptions {
  salientPool?: number;
  salientLimit?: number;
  retrieveLimit?: number;
  syncUrl?: boolean;
}

export class App {
  private topics: Topic[] = [];
  private salient: SalientScore[] = [];
  private lastRetrieval: RetrieveResponse | null = null;
  private trendSeq = 0;
  private retrieveSeq = 0;

  constructor(
    private readonly doc: Document,
    private readonly api: Api,
    readonly store: Store,
    private readonly options: AppOptions = {},
  ) {}

  private el<T extends HTMLElement>(id: string): T {
    const node = this.doc.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  toast(message: string): void {
    const box = this.el("toast");
    box.textContent = message;
    box.classList.add("visible");
    setTimeout(() => box.classList.remove("visible"), 5000);
  }

  private async runGuarded(action: () => Promise<void>): Promise<void> {
    try {
      await action();
    } catch (err) {
      this.toast(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
    }
  }

  async init(): Promise<void> {
    this.el<HTMLFormElement>("chat-form").addEventListener("submit", (event) => {
      event.preventDefault();
      void this.sendChat();
    });
    this.el<HTMLButtonElement>("summarize-btn").addEventListener("click", () => {
      void this.summarize();
    });
    this.el<HTMLButtonElement>("chat-btn").addEventListener("click", () => {
      void this.startChat();
    });
    this.store.subscribe(() => this.syncUrl());

    await this.runGuarded(async () => {
      const meta = await this.api.meta();
      this.el("meta-line").textContent =
        `${meta.model_name || "model"}: ${meta.num_topics} topics, ` +
        `${meta.timestamps[0]}..${meta.timestamps[meta.timestamps.length - 1]}, ` +
        `${meta.num_docs} docs`;
      this.topics = await this.api.topics();
      this.renderTopicList();
    });

    void this.runGuarded(async () => {
      const metrics = await this.api.metrics();
      this.el("metrics-block").textContent =
        `TTC ${metrics.ttc.toFixed(3)} / TTS ${metrics.tts.toFixed(3)} / ` +
        `TTQ ${metrics.ttq.toFixed(3)}`;
    });
  }

  private syncUrl(): void {
    if (this.options.syncUrl === false) return;
    const win = this.doc.defaultView;
    win?.history?.replaceState?.(null, "", win.location.pathname + stateToQuery(this.store.get()));
  }

  renderTopicList(): void {
    const list = this.el("topic-list");
    list.replaceChildren();
    const selected = this.store.get().topic;
    for (const topic of this.topics) {
      const item = this.doc.createElement("li");
      item.className = "topic-row" + (topic.id === selected ? " selected" : "");
      item.dataset.topic = String(topic.id);

      const name = this.doc.createElement("button");
      name.type = "button";
      name.className = "topic-name";
      name.textContent = topic.label ?? `unlabeled #${topic.id}`;
      name.addEventListener("click", () => void this.selectTopic(topic.id));
      item.appendChild(name);

      if (topic.label === null) {
        const labelBtn = this.doc.createElement("button");
        labelBtn.type = "button";
        labelBtn.className = "label-btn";
        labelBtn.textContent = "label";
        labelBtn.title = "Generate a label for this topic";
        labelBtn.addEventListener("click", () => void this.labelTopic(topic));
        item.appendChild(labelBtn);
      }
      list.appendChild(item);
    }
  }

  private async labelTopic(topic: Topic): Promise<void> {
    await this.runGuarded(async () => {
      const result = await this.api.label(topic.id);
      topic.label = result.label;
      this.renderTopicList();
    });
  }

  async selectTopic(topicId: number): Promise<void> {
    await this.runGuarded(async () => {
      this.store.selectTopic(topicId);
      this.renderTopicList();
      this.el("documents-panel").hidden = true;
      this.el("summary-panel").hidden = true;
      this.el("chat-panel").hidden = true;

      const response = await this.api.salient(
        topicId,
        this.options.salientPool ?? 500,
        this.options.salientLimit ?? 10,
      );
      this.salient = response.scores;
      const words = this.salient.slice(0, DEFAULT_TREND_WORDS).map((s) => s.word);
      this.store.setTrendWords(words);
      await this.refreshTrend();
      this.el("trends-panel").hidden = false;
    });
  }

  private async refreshTrend(): Promise<void> {
    const { topic, trendWords } = this.store.get();
    if (topic === null) return;
    renderLegend(
      this.doc,
      this.el("legend"),
      this.salient.map((s) => s.word),
      trendWords,
      (word) => {
        this.store.toggleTrendWord(word);
        void this.runGuarded(() => this.refreshTrend());
      },
    );
    const chart = this.el("chart");
    if (trendWords.length === 0) {
      chart.replaceChildren();
      return;
    }
    const seq = ++this.trendSeq;
    const trend = await this.api.trend(topic, trendWords);
    if (seq !== this.trendSeq) return; // a newer request superseded this one
    renderTrendChart(this.doc, chart, trend, {
      onPointClick: (word, time) => void this.showDocuments(word, time),
    });
  }

  async showDocuments(word: string, time: number): Promise<void> {
    await this.runGuarded(async () => {
      this.store.selectPair({ word, time });
      const seq = ++this.retrieveSeq;
      const retrieved = await this.api.retrieve(
        word,
        time,
        this.options.retrieveLimit ?? 10,
      );
      if (seq !== this.retrieveSeq) return;
      this.lastRetrieval = retrieved;

      this.el("documents-title").textContent =
        `Documents for "${word}" @ ${retrieved.timestamp} (${retrieved.results.length})`;
      const list = this.el("doc-list");
      list.replaceChildren();
      for (const result of retrieved.results) {
        const item = this.doc.createElement("li");
        item.className = "doc-row";
        item.dataset.docId = result.id;
        const head = this.doc.createElement("div");
        head.className = "doc-head";
        head.textContent = `${result.id} (relevance ${result.relevance.toFixed(3)})`;
        const body = this.doc.createElement("p");
        body.className = "doc-body";
        body.appendChild(renderHighlighted(this.doc, result.text, result.highlights));
        item.append(head, body);
        list.appendChild(item);
      }
      this.el("documents-panel").hidden = false;
      this.el("summary-panel").hidden = true;
      this.el("chat-panel").hidden = true;
      this.el("summary-body").replaceChildren();
      this.el("chat-log").replaceChildren();
    });
  }

  async summarize(): Promise<void> {
    const retrieved = this.lastRetrieval;
    if (!retrieved || retrieved.results.length === 0) return;
    const button = this.el<HTMLButtonElement>("summarize-btn");
    button.disabled = true;
    try {
      await this.runGuarded(async () => {
        const { summary } = await this.api.summarize(
          retrieved.results.map((r) => r.id),
          [retrieved.word],
          retrieved.time_index,
        );
        const body = this.el("summary-body");
        const bullets = this.doc.createElement("ul");
        for (const line of summary.split("\n")) {
          const cleaned = line.replace(/^\s*[-*•]\s*/, "").trim();
          if (!cleaned) continue;
          const bullet = this.doc.createElement("li");
          bullet.textContent = cleaned;
          bullets.appendChild(bullet);
        }
        body.replaceChildren(bullets);
        this.el("summary-panel").hidden = false;
      });
    } finally {
      button.disabled = false;
    }
  }

  async startChat(): Promise<void> {
    const retrieved = this.lastRetrieval;
    if (!retrieved || retrieved.results.length === 0) return;
    await this.runGuarded(async () => {
      const session = await this.api.createSession(retrieved.results.map((r) => r.id));
      this.store.setSession(session.session_id);
      this.el("chat-log").replaceChildren();
      this.el("chat-panel").hidden = false;
    });
  }

  private appendChatBubble(role: "user" | "assistant", text: string): void {
    const log = this.el("chat-log");
    const bubble = this.doc.createElement("li");
    bubble.className = `chat-${role}` + (text === REFUSAL_SENTINEL ? " notice" : "");
    bubble.textContent = text;
    log.appendChild(bubble);
  }

  async sendChat(): Promise<void> {
    const sessionId = this.store.get().sessionId;
    if (sessionId === null) return; // panel is disabled without a session
    const input = this.el<HTMLInputElement>("chat-input");
    const message = input.value.trim();
    if (!message) return;
    input.value = "";
    this.appendChatBubble("user", message);
    await this.runGuarded(async () => {
      const turn = await this.api.chat(sessionId, message);
      this.appendChatBubble("assistant", turn.reply);
    });
  }
}
