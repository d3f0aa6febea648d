// DOM rendering. Everything goes through textContent, never innerHTML,
// so article text and chat replies render as data, not markup.

import type { ArticleView, MetricsReply } from "./api.js";
import type { ChatEntry, ResultState, TestItem } from "./state.js";
import { tokenSpans } from "./tokens.js";

export function resultClass(state: ResultState): string {
  // green means the learner got it right, red wrong, grey untested
  if (state === "correct") return "result-correct";
  if (state === "incorrect") return "result-incorrect";
  return "result-untested";
}

export function renderTranscript(container: HTMLElement, entries: ChatEntry[]): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const entry of entries) {
    const row = doc.createElement("div");
    row.className = `msg msg-${entry.who}`;
    const bubble = doc.createElement("div");
    bubble.className = "bubble";
    bubble.textContent = entry.text;
    row.appendChild(bubble);
    container.appendChild(row);
  }
  container.scrollTop = container.scrollHeight;
}

export function renderArticle(
  container: HTMLElement,
  article: ArticleView | null,
  selectable: boolean,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (!article) return;

  const head = doc.createElement("div");
  head.className = "article-head";
  const counter = doc.createElement("span");
  counter.className = "article-counter";
  counter.textContent = `Article ${article.position + 1} of ${article.total}`;
  head.appendChild(counter);
  if (article.category) {
    const chip = doc.createElement("span");
    chip.className = "category-chip";
    chip.textContent = article.category;
    head.appendChild(chip);
  }
  container.appendChild(head);

  const title = doc.createElement("h2");
  title.className = "article-title";
  const body = doc.createElement("p");
  body.className = "article-body";
  if (selectable) {
    title.appendChild(tokenSpans(article.title, doc));
    body.appendChild(tokenSpans(article.body, doc));
    container.classList.add("selectable");
  } else {
    title.textContent = article.title;
    body.textContent = article.body;
    container.classList.remove("selectable");
  }
  container.appendChild(title);
  container.appendChild(body);
}

export function renderTestStrip(
  container: HTMLElement,
  items: TestItem[],
  currentId: number | null,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const item of items) {
    const cell = doc.createElement("button");
    cell.type = "button";
    cell.className = `test-cell ${resultClass(item.state)}`;
    if (item.articleId === currentId) cell.classList.add("current");
    cell.dataset.articleId = String(item.articleId);
    cell.title = item.title;
    cell.textContent = item.title.length > 28 ? item.title.slice(0, 27) + "…" : item.title;
    container.appendChild(cell);
  }
}

function metricsText(m: MetricsReply): string {
  return (
    `macro F1 ${m.macro_f1.toFixed(2)} ` +
    `(${m.sample_n} sampled, ${m.keywords_taught} keywords, ${m.prediction_mode})`
  );
}

// Returns true when the readout changed; identical polls leave the DOM
// untouched so repeated refreshes cause no visual churn.
export function renderMetrics(el: HTMLElement, metrics: MetricsReply | null, failed = false): boolean {
  const next = failed
    ? "metrics unavailable, retrying"
    : metrics
      ? metricsText(metrics)
      : "metrics pending";
  if (el.textContent === next && el.classList.contains("metrics-error") === failed) {
    return false;
  }
  el.textContent = next;
  el.classList.toggle("metrics-error", failed);
  return true;
}

export function renderModeToggle(button: HTMLElement, mode: "teaching" | "testing"): void {
  button.textContent = mode === "teaching" ? "Switch to testing" : "Switch to teaching";
  button.dataset.mode = mode;
}
