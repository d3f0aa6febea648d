import { describe, expect, it } from "vitest";

import type { ArticleView, Classification } from "../src/api.js";
import {
  applyClassification,
  emptyView,
  setArticle,
  transcriptFromLog,
} from "../src/state.js";

function testArticle(id: number): ArticleView {
  return {
    article_id: id,
    title: `article ${id}`,
    body: "body",
    category: null,
    mode: "testing",
    position: 0,
    total: 2000,
  };
}

function classification(id: number, correct: boolean): Classification {
  return {
    article_id: id,
    predicted: 2,
    predicted_label: "Sports",
    correct,
    mode: "combined",
    scores: {},
  };
}

describe("test list bookkeeping", () => {
  it("collects visited test articles as untested", () => {
    const view = emptyView("s");
    view.mode = "testing";
    setArticle(view, testArticle(5));
    setArticle(view, testArticle(9));
    expect(view.tests.map((t) => [t.articleId, t.state])).toEqual([
      [5, "untested"],
      [9, "untested"],
    ]);
  });

  it("does not list teaching articles", () => {
    const view = emptyView("s");
    setArticle(view, { ...testArticle(5), mode: "teaching", category: "World" });
    expect(view.tests).toEqual([]);
  });

  it("keeps an article's result when it is revisited", () => {
    const view = emptyView("s");
    view.mode = "testing";
    setArticle(view, testArticle(5));
    applyClassification(view, classification(5, true));
    setArticle(view, testArticle(9));
    setArticle(view, testArticle(5)); // wrapped around the queue
    expect(view.tests.find((t) => t.articleId === 5)?.state).toBe("correct");
    expect(view.tests).toHaveLength(2);
  });

  it("changes result state only through classify responses", () => {
    const view = emptyView("s");
    view.mode = "testing";
    setArticle(view, testArticle(5));
    expect(view.tests[0]!.state).toBe("untested");
    applyClassification(view, classification(5, false));
    expect(view.tests[0]!.state).toBe("incorrect");
    applyClassification(view, classification(5, true));
    expect(view.tests[0]!.state).toBe("correct");
    // a classification for an unknown article changes nothing
    applyClassification(view, classification(77, false));
    expect(view.tests).toHaveLength(1);
  });
});

describe("transcript from the event log", () => {
  it("mirrors server event order and speakers", () => {
    const log = [
      '{"seq": 0, "ts": "t", "kind": "agent_reply", "payload": {"text": "Hello!"}}',
      '{"seq": 1, "ts": "t", "kind": "utterance_in", "payload": {"text": "hi"}}',
      '{"seq": 2, "ts": "t", "kind": "keyword", "payload": {"lemma": "nato"}}',
      '{"seq": 3, "ts": "t", "kind": "agent_reply", "payload": {"text": "Noted."}}',
      "",
    ].join("\n");
    expect(transcriptFromLog(log)).toEqual([
      { who: "agent", text: "Hello!" },
      { who: "teacher", text: "hi" },
      { who: "agent", text: "Noted." },
    ]);
  });

  it("skips malformed lines instead of dying", () => {
    const log = 'not json\n{"kind": "agent_reply", "payload": {"text": "ok"}}\n';
    expect(transcriptFromLog(log)).toEqual([{ who: "agent", text: "ok" }]);
  });
});
