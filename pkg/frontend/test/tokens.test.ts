import { describe, expect, it } from "vitest";

import { selectedWord, tokenSpans } from "../src/tokens.js";

describe("tokenSpans", () => {
  it("reads back as the original text", () => {
    const text = 'Wall St. "bears" claw back, markets re-open (Reuters).';
    const host = document.createElement("div");
    host.appendChild(tokenSpans(text));
    expect(host.textContent).toBe(text);
  });

  it("wraps each word in a span carrying its surface form", () => {
    const host = document.createElement("div");
    host.appendChild(tokenSpans("Oil prices rose 4.2% on Monday"));
    const words = [...host.querySelectorAll("span.tok")].map(
      (s) => (s as HTMLElement).dataset.word,
    );
    expect(words).toEqual(["Oil", "prices", "rose", "4", "2", "on", "Monday"]);
  });

  it("keeps intra-word apostrophes and hyphens inside one token", () => {
    const host = document.createElement("div");
    host.appendChild(tokenSpans("Intel's next-gen chip"));
    const words = [...host.querySelectorAll("span.tok")].map(
      (s) => (s as HTMLElement).dataset.word,
    );
    expect(words).toEqual(["Intel's", "next-gen", "chip"]);
  });

  it("leaves punctuation and whitespace as plain text nodes", () => {
    const host = document.createElement("div");
    host.appendChild(tokenSpans("go, team!"));
    expect(host.querySelectorAll("span").length).toBe(2);
    expect(host.childNodes.length).toBe(4); // span, ", ", span, "!"
  });
});

describe("selectedWord", () => {
  function pane(): HTMLElement {
    const host = document.createElement("div");
    host.appendChild(tokenSpans("the referee blew the whistle"));
    return host;
  }

  it("resolves a selection anchored inside a token", () => {
    const host = pane();
    const span = host.querySelectorAll("span.tok")[1]!;
    const sel = { isCollapsed: false, anchorNode: span.firstChild, focusNode: span.firstChild };
    expect(selectedWord(sel)).toBe("referee");
  });

  it("falls back to the focus end when the anchor is outside any token", () => {
    const host = pane();
    const gap = host.childNodes[1]!; // whitespace text node
    const span = host.querySelectorAll("span.tok")[4]!;
    const sel = { isCollapsed: false, anchorNode: gap, focusNode: span.firstChild };
    expect(selectedWord(sel)).toBe("whistle");
  });

  it("resolves a caret click on a token", () => {
    const host = pane();
    const span = host.querySelectorAll("span.tok")[0]!;
    const sel = { isCollapsed: true, anchorNode: span.firstChild, focusNode: span.firstChild };
    expect(selectedWord(sel)).toBe("the");
  });

  it("returns null away from any token", () => {
    const host = pane();
    const gap = host.childNodes[1]!;
    expect(selectedWord({ isCollapsed: false, anchorNode: gap, focusNode: gap })).toBeNull();
    expect(selectedWord(null)).toBeNull();
  });
});
