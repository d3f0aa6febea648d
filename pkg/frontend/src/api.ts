// Typed client for the teaching service. Every request goes through url(),
// which pins the /v1 prefix: the UI never talks to anything else.

export interface ArticleView {
  article_id: number;
  title: string;
  body: string;
  category: string | null; // null while testing: no peeking at gold labels
  mode: "teaching" | "testing";
  position: number;
  total: number;
}

export interface SessionOpened {
  session_id: string;
  created_at: string;
  mode: "teaching" | "testing";
  prediction_mode: string;
  replies: string[];
  article: ArticleView;
}

export interface EffectRow {
  kind: string;
  [key: string]: unknown;
}

export interface Classification {
  article_id: number;
  predicted: number;
  predicted_label: string;
  correct: boolean;
  mode: string;
  scores: Record<string, number>;
}

export interface UtteranceReply {
  replies: string[];
  effects: EffectRow[];
  mode: "teaching" | "testing";
  classification?: Classification;
  article?: ArticleView;
}

export interface HighlightReply {
  ok: boolean;
  lemma: string;
  class: number;
  category: string;
  polarity: string;
  origin: string;
}

export interface ModeReply {
  mode: "teaching" | "testing";
  changed: boolean;
}

export interface ClassMetricsRow {
  precision: number;
  recall: number;
  f1: number;
}

export interface MetricsReply {
  sample_n: number;
  prediction_mode: string;
  keywords_taught: number;
  per_class: Record<string, ClassMetricsRow>;
  macro_precision: number;
  macro_recall: number;
  macro_f1: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function parseError(res: Response): Promise<never> {
  let detail = res.statusText || `HTTP ${res.status}`;
  try {
    const body = await res.json();
    if (typeof body?.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(private base = "") {}

  private url(path: string): string {
    return `${this.base}/v1${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.url(path));
    if (!res.ok) await parseError(res);
    return (await res.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) await parseError(res);
    return (await res.json()) as T;
  }

  createSession(seed?: number, predictionMode?: string): Promise<SessionOpened> {
    const body: Record<string, unknown> = {};
    if (seed !== undefined) body.seed = seed;
    if (predictionMode !== undefined) body.prediction_mode = predictionMode;
    return this.postJson("/sessions", body);
  }

  article(sessionId: string): Promise<ArticleView> {
    return this.getJson(`/sessions/${sessionId}/article`);
  }

  utterance(sessionId: string, text: string): Promise<UtteranceReply> {
    return this.postJson(`/sessions/${sessionId}/utterance`, { text });
  }

  highlight(sessionId: string, articleId: number, word: string): Promise<HighlightReply> {
    return this.postJson(`/sessions/${sessionId}/highlight`, {
      word,
      article_id: articleId,
    });
  }

  setMode(sessionId: string, mode: "teaching" | "testing"): Promise<ModeReply> {
    return this.postJson(`/sessions/${sessionId}/mode`, { mode });
  }

  classify(sessionId: string, articleId: number): Promise<Classification> {
    return this.postJson(`/sessions/${sessionId}/classify`, { article_id: articleId });
  }

  metrics(sessionId: string, sampleN = 40): Promise<MetricsReply> {
    return this.getJson(`/sessions/${sessionId}/metrics?sample_n=${sampleN}`);
  }

  async eventLog(sessionId: string): Promise<string> {
    const res = await fetch(this.url(`/sessions/${sessionId}/log`));
    if (!res.ok) await parseError(res);
    return res.text();
  }
}
