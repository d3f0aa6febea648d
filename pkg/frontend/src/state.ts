// Client-side session view-model. Plain data plus the few transition
// rules the interface relies on; no classification logic lives here,
// the server decides everything and this just mirrors its answers.

import type { ArticleView, Classification, MetricsReply } from "./api.js";

export type ResultState = "untested" | "correct" | "incorrect";

export interface ChatEntry {
  who: "teacher" | "agent" | "note";
  text: string;
}

export interface TestItem {
  articleId: number;
  title: string;
  state: ResultState;
}

export interface SessionView {
  sessionId: string;
  mode: "teaching" | "testing";
  article: ArticleView | null;
  transcript: ChatEntry[];
  tests: TestItem[];
  metrics: MetricsReply | null;
}

export function emptyView(sessionId: string): SessionView {
  return {
    sessionId,
    mode: "teaching",
    article: null,
    transcript: [],
    tests: [],
    metrics: null,
  };
}

export function appendEntry(view: SessionView, who: ChatEntry["who"], text: string): void {
  view.transcript.push({ who, text });
}

// Track the current article; while testing, every article seen joins the
// test list (untested until a classify response says otherwise).
export function setArticle(view: SessionView, article: ArticleView): void {
  view.article = article;
  if (article.mode === "testing") {
    const existing = view.tests.find((t) => t.articleId === article.article_id);
    if (!existing) {
      view.tests.push({
        articleId: article.article_id,
        title: article.title,
        state: "untested",
      });
    }
  }
}

// The only code path that moves a test article out of "untested":
// result state transitions come from classify responses alone.
export function applyClassification(view: SessionView, result: Classification): void {
  const item = view.tests.find((t) => t.articleId === result.article_id);
  if (item) {
    item.state = result.correct ? "correct" : "incorrect";
  }
}

// Rebuild the transcript from an exported event log, newest last, so a
// resumed session shows the same conversation order the server recorded.
export function transcriptFromLog(ndjson: string): ChatEntry[] {
  const entries: ChatEntry[] = [];
  for (const line of ndjson.split("\n")) {
    if (!line.trim()) continue;
    let event: { kind?: string; payload?: { text?: unknown } };
    try {
      event = JSON.parse(line);
    } catch {
      continue; // tolerate a truncated trailing line
    }
    if (event.kind === "utterance_in" && typeof event.payload?.text === "string") {
      entries.push({ who: "teacher", text: event.payload.text });
    } else if (event.kind === "agent_reply" && typeof event.payload?.text === "string") {
      entries.push({ who: "agent", text: event.payload.text });
    }
  }
  return entries;
}
