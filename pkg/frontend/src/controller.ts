// Gesture wiring. Each user gesture issues exactly one API request and
// the response is folded back into the view-model before re-rendering;
// nothing is predicted locally.

import { ApiClient, ApiError } from "./api.js";
import type { UtteranceReply } from "./api.js";
import {
  SessionView,
  appendEntry,
  applyClassification,
  emptyView,
  setArticle,
  transcriptFromLog,
} from "./state.js";
import { selectedWord } from "./tokens.js";
import type { SelectionLike } from "./tokens.js";
import {
  renderArticle,
  renderMetrics,
  renderModeToggle,
  renderTestStrip,
  renderTranscript,
} from "./view.js";

export interface Elements {
  chatLog: HTMLElement;
  chatForm: HTMLFormElement;
  chatInput: HTMLInputElement;
  articlePane: HTMLElement;
  teachOffer: HTMLButtonElement;
  modeToggle: HTMLButtonElement;
  nextButton: HTMLButtonElement;
  classifyButton: HTMLButtonElement;
  testStrip: HTMLElement;
  metrics: HTMLElement;
}

// just the client surface the controller touches, so tests can hand in stubs
export type Api = Pick<
  ApiClient,
  | "createSession"
  | "article"
  | "utterance"
  | "highlight"
  | "setMode"
  | "classify"
  | "metrics"
  | "eventLog"
>;

const POLL_INTERVAL_MS = 5000;

export class Controller {
  view: SessionView = emptyView("");
  offerWord: string | null = null;
  private busy = false;
  private pollInFlight = false;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: Api,
    private els: Elements,
    private win: { location: { hash: string } } = window,
  ) {}

  async start(): Promise<void> {
    const existing = this.sessionFromHash();
    if (existing) {
      try {
        await this.resume(existing);
      } catch {
        await this.create(); // stale id in the URL; open a fresh session
      }
    } else {
      await this.create();
    }
    this.bind();
    this.render();
    this.startPolling();
    await this.pollMetrics();
  }

  stop(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
    this.pollTimer = null;
  }

  private sessionFromHash(): string | null {
    const match = /#s=([A-Za-z0-9-]+)/.exec(this.win.location.hash);
    return match?.[1] ?? null;
  }

  private async create(): Promise<void> {
    const opened = await this.api.createSession();
    this.view = emptyView(opened.session_id);
    this.view.mode = opened.mode;
    for (const reply of opened.replies) appendEntry(this.view, "agent", reply);
    setArticle(this.view, opened.article);
    this.win.location.hash = `s=${opened.session_id}`;
  }

  private async resume(sessionId: string): Promise<void> {
    const article = await this.api.article(sessionId);
    this.view = emptyView(sessionId);
    this.view.mode = article.mode;
    setArticle(this.view, article);
    this.view.transcript = transcriptFromLog(await this.api.eventLog(sessionId));
  }

  private bind(): void {
    this.els.chatForm.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.sendUtterance(this.els.chatInput.value);
    });
    this.els.articlePane.addEventListener("mouseup", () => {
      this.onSelection(
        (this.els.articlePane.ownerDocument.defaultView ?? window).getSelection(),
      );
    });
    this.els.teachOffer.addEventListener("click", () => void this.teachOffered());
    this.els.modeToggle.addEventListener("click", () => void this.toggleMode());
    this.els.nextButton.addEventListener("click", () => void this.sendUtterance("next"));
    this.els.classifyButton.addEventListener("click", () => {
      if (this.view.article) void this.classify(this.view.article.article_id);
    });
    this.els.testStrip.addEventListener("click", (ev) => {
      const cell = (ev.target as HTMLElement).closest("[data-article-id]");
      if (cell instanceof HTMLElement && cell.dataset.articleId) {
        void this.classify(Number(cell.dataset.articleId));
      }
    });
    this.els.metrics.addEventListener("click", () => void this.pollMetrics());
  }

  async sendUtterance(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || this.busy) return;
    this.busy = true;
    this.els.chatInput.value = "";
    appendEntry(this.view, "teacher", trimmed);
    this.render();
    try {
      const reply = await this.api.utterance(this.view.sessionId, trimmed);
      this.fold(reply);
    } catch (err) {
      appendEntry(this.view, "note", describe(err));
    } finally {
      this.busy = false;
      this.render();
    }
  }

  private fold(reply: UtteranceReply): void {
    for (const text of reply.replies) appendEntry(this.view, "agent", text);
    this.view.mode = reply.mode;
    if (reply.article) setArticle(this.view, reply.article);
    if (reply.classification) {
      applyClassification(this.view, reply.classification);
    }
  }

  // Selection in the article pane offers one-word teaching; the request
  // only goes out when the offer button is pressed.
  onSelection(sel: SelectionLike | null): void {
    this.offerWord = this.view.mode === "teaching" ? selectedWord(sel) : null;
    this.render();
  }

  async teachOffered(): Promise<void> {
    const word = this.offerWord;
    const article = this.view.article;
    if (!word || !article || this.busy) return;
    this.busy = true;
    this.offerWord = null;
    try {
      const res = await this.api.highlight(this.view.sessionId, article.article_id, word);
      appendEntry(this.view, "note", `Taught "${res.lemma}" as relevant for ${res.category}.`);
    } catch (err) {
      appendEntry(this.view, "note", describe(err));
    } finally {
      this.busy = false;
      this.render();
    }
  }

  // Mode changes ride the conversation so one gesture stays one request
  // and the switch shows up in the transcript like any other turn.
  async toggleMode(): Promise<void> {
    const target = this.view.mode === "teaching" ? "testing" : "teaching";
    await this.sendUtterance(`switch to ${target}`);
  }

  async classify(articleId: number): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      const result = await this.api.classify(this.view.sessionId, articleId);
      applyClassification(this.view, result);
      const verdict = result.correct ? "correct" : "incorrect";
      appendEntry(this.view, "note", `Prediction: ${result.predicted_label} (${verdict}).`);
    } catch (err) {
      appendEntry(this.view, "note", describe(err));
    } finally {
      this.busy = false;
      this.render();
    }
  }

  async pollMetrics(): Promise<void> {
    if (this.pollInFlight) return;
    this.pollInFlight = true;
    try {
      this.view.metrics = await this.api.metrics(this.view.sessionId);
      renderMetrics(this.els.metrics, this.view.metrics, false);
    } catch {
      renderMetrics(this.els.metrics, this.view.metrics, true);
    } finally {
      this.pollInFlight = false;
    }
  }

  private startPolling(): void {
    this.pollTimer = setInterval(() => void this.pollMetrics(), POLL_INTERVAL_MS);
  }

  render(): void {
    const teaching = this.view.mode === "teaching";
    renderTranscript(this.els.chatLog, this.view.transcript);
    renderArticle(this.els.articlePane, this.view.article, teaching);
    renderModeToggle(this.els.modeToggle, this.view.mode);
    renderTestStrip(
      this.els.testStrip,
      this.view.tests,
      this.view.article?.article_id ?? null,
    );
    this.els.testStrip.hidden = teaching;
    this.els.classifyButton.hidden = teaching;
    const offer = teaching && this.offerWord !== null;
    this.els.teachOffer.hidden = !offer;
    if (offer) {
      this.els.teachOffer.textContent = `Teach "${this.offerWord}" as relevant`;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.detail;
  return "Request failed; the server may be unreachable.";
}
