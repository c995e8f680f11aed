import type {
  ChatTurn,
  LabelResponse,
  Meta,
  MetricsResponse,
  RetrieveResponse,
  SalientResponse,
  SessionCreated,
  Topic,
  TrendResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Thin typed wrapper over the service endpoints; one method per UI action. */
export class Api {
  constructor(
    readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, "network", `service unreachable: ${String(err)}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON body: fall through to the status check
    }
    if (!response.ok) {
      const payload = (body ?? {}) as { code?: string; message?: string };
      throw new ApiError(
        response.status,
        payload.code ?? `http_${response.status}`,
        payload.message ?? `request failed with HTTP ${response.status}`,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  meta(): Promise<Meta> {
    return this.request("/api/meta");
  }

  topics(): Promise<Topic[]> {
    return this.request("/api/topics");
  }

  label(topic: number): Promise<LabelResponse> {
    return this.post(`/api/topics/${topic}/label`, {});
  }

  salient(topic: number, pool = 500, limit = 10): Promise<SalientResponse> {
    return this.request(`/api/topics/${topic}/salient?pool=${pool}&limit=${limit}`);
  }

  trend(topic: number, words: string[]): Promise<TrendResponse> {
    const csv = encodeURIComponent(words.join(","));
    return this.request(`/api/topics/${topic}/trend?words=${csv}`);
  }

  metrics(): Promise<MetricsResponse> {
    return this.request("/api/metrics");
  }

  retrieve(word: string, time: number, limit = 10): Promise<RetrieveResponse> {
    return this.request(
      `/api/retrieve?word=${encodeURIComponent(word)}&time=${time}&limit=${limit}`,
    );
  }

  summarize(docIds: string[], words: string[], timeIndex: number): Promise<{ summary: string }> {
    return this.post("/api/summarize", {
      doc_ids: docIds,
      words,
      time_index: timeIndex,
    });
  }

  createSession(docIds: string[]): Promise<SessionCreated> {
    return this.post("/api/sessions", { doc_ids: docIds });
  }

  chat(sessionId: string, message: string): Promise<ChatTurn> {
    return this.post(`/api/sessions/${sessionId}/chat`, { message });
  }
}
