import { describe, expect, it } from "vitest";

import type { ArticleView, MetricsReply } from "../src/api.js";
import type { TestItem } from "../src/state.js";
import {
  renderArticle,
  renderMetrics,
  renderTestStrip,
  renderTranscript,
  resultClass,
} from "../src/view.js";

const METRICS: MetricsReply = {
  sample_n: 40,
  prediction_mode: "combined",
  keywords_taught: 3,
  per_class: {},
  macro_precision: 0.5,
  macro_recall: 0.46,
  macro_f1: 0.48,
};

function article(overrides: Partial<ArticleView> = {}): ArticleView {
  return {
    article_id: 17,
    title: "Stocks rally",
    body: "Markets rose sharply on Monday.",
    category: "Business",
    mode: "teaching",
    position: 2,
    total: 20,
    ...overrides,
  };
}

describe("result coloring", () => {
  it("is green exactly when the classification was correct", () => {
    expect(resultClass("correct")).toBe("result-correct");
    expect(resultClass("incorrect")).toBe("result-incorrect");
    expect(resultClass("untested")).toBe("result-untested");
  });

  it("colors strip cells from their result state", () => {
    const items: TestItem[] = [
      { articleId: 1, title: "a", state: "correct" },
      { articleId: 2, title: "b", state: "incorrect" },
      { articleId: 3, title: "c", state: "untested" },
    ];
    const strip = document.createElement("div");
    renderTestStrip(strip, items, 2);
    const cells = [...strip.querySelectorAll("button")];
    expect(cells.map((c) => c.classList.contains("result-correct"))).toEqual([true, false, false]);
    expect(cells.map((c) => c.classList.contains("result-incorrect"))).toEqual([false, true, false]);
    expect(cells.map((c) => c.classList.contains("result-untested"))).toEqual([false, false, true]);
    expect(cells[1]!.classList.contains("current")).toBe(true);
    expect(cells[0]!.dataset.articleId).toBe("1");
  });
});

describe("article pane", () => {
  it("shows the category chip while teaching", () => {
    const pane = document.createElement("div");
    renderArticle(pane, article(), true);
    expect(pane.querySelector(".category-chip")?.textContent).toBe("Business");
    expect(pane.querySelector(".article-counter")?.textContent).toBe("Article 3 of 20");
  });

  it("wraps words in tokens only when selectable", () => {
    const pane = document.createElement("div");
    renderArticle(pane, article(), true);
    expect(pane.querySelectorAll("span.tok").length).toBeGreaterThan(0);
    renderArticle(pane, article({ category: null, mode: "testing" }), false);
    expect(pane.querySelectorAll("span.tok").length).toBe(0);
    expect(pane.querySelector(".category-chip")).toBeNull();
  });

  it("renders article text as data, not markup", () => {
    const pane = document.createElement("div");
    renderArticle(pane, article({ body: "<img src=x onerror=alert(1)>" }), false);
    expect(pane.querySelector("img")).toBeNull();
    expect(pane.querySelector(".article-body")?.textContent).toContain("<img");
  });
});

describe("transcript", () => {
  it("renders entries in order with speaker classes", () => {
    const log = document.createElement("div");
    renderTranscript(log, [
      { who: "agent", text: "Hello" },
      { who: "teacher", text: "hi there" },
      { who: "note", text: "Taught \"nato\"" },
    ]);
    const rows = [...log.children];
    expect(rows.map((r) => r.className)).toEqual(["msg msg-agent", "msg msg-teacher", "msg msg-note"]);
    expect(rows.map((r) => r.textContent)).toEqual(["Hello", "hi there", 'Taught "nato"']);
  });
});

describe("metrics readout", () => {
  it("renders the macro F1 with its sample size", () => {
    const el = document.createElement("span");
    renderMetrics(el, METRICS);
    expect(el.textContent).toContain("0.48");
    expect(el.textContent).toContain("40 sampled");
    expect(el.textContent).toContain("3 keywords");
  });

  it("does not rewrite the DOM for an identical poll", () => {
    const el = document.createElement("span");
    expect(renderMetrics(el, METRICS)).toBe(true);
    expect(renderMetrics(el, { ...METRICS })).toBe(false);
    expect(renderMetrics(el, { ...METRICS, macro_f1: 0.52 })).toBe(true);
  });

  it("shows an inline retry notice on server errors and recovers", () => {
    const el = document.createElement("span");
    renderMetrics(el, METRICS);
    renderMetrics(el, METRICS, true);
    expect(el.textContent).toContain("retrying");
    expect(el.classList.contains("metrics-error")).toBe(true);
    renderMetrics(el, METRICS, false);
    expect(el.classList.contains("metrics-error")).toBe(false);
    expect(el.textContent).toContain("0.48");
  });
});
