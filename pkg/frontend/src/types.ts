/** JSON payload shapes of the exploration service. */

export interface Meta {
  num_times: number;
  num_topics: number;
  vocab_size: number;
  num_docs: number;
  model_name: string;
  timestamps: string[];
}

export interface TopicTimeRow {
  time_index: number;
  timestamp: string;
  words: string[];
}

export interface Topic {
  id: number;
  label: string | null;
  top_words: TopicTimeRow[];
}

export interface SalientScore {
  topic: number;
  term_id: number;
  word: string;
  s_burst: number;
  s_spec: number;
  s_uniq: number;
  s_final: number;
}

export interface SalientResponse {
  topic: number;
  scores: SalientScore[];
}

export interface TrendSeries {
  word: string;
  values: number[];
}

export interface TrendResponse {
  topic: number;
  timestamps: string[];
  series: TrendSeries[];
}

export type ByteSpan = [number, number];

export interface RetrievedDoc {
  id: string;
  relevance: number;
  highlights: ByteSpan[];
  text: string;
}

export interface RetrieveResponse {
  word: string;
  time_index: number;
  timestamp: string;
  results: RetrievedDoc[];
}

export interface TopicMetrics {
  topic: number;
  ttc: number;
  tts: number;
  ttq: number;
}

export interface MetricsResponse {
  per_topic: TopicMetrics[];
  ttc: number;
  tts: number;
  ttq: number;
  top_n?: number;
}

export interface SessionCreated {
  session_id: string;
  num_docs: number;
}

export interface ChatTurn {
  session_id: string;
  reply: string;
  turn: number;
}

export interface LabelResponse {
  id: number;
  label: string;
}
