// Entry point: grab the static layout, build the controller, go.

import { ApiClient } from "./api.js";
import { Controller, Elements } from "./controller.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in index.html`);
  return node as T;
}

const els: Elements = {
  chatLog: el("chat-log"),
  chatForm: el<HTMLFormElement>("chat-form"),
  chatInput: el<HTMLInputElement>("chat-input"),
  articlePane: el("article"),
  teachOffer: el<HTMLButtonElement>("teach-offer"),
  modeToggle: el<HTMLButtonElement>("mode-toggle"),
  nextButton: el<HTMLButtonElement>("next-button"),
  classifyButton: el<HTMLButtonElement>("classify-button"),
  testStrip: el("test-strip"),
  metrics: el("metrics"),
};

const controller = new Controller(new ApiClient(), els);
controller.start().catch((err) => {
  els.chatLog.textContent = `Could not reach the teaching service: ${err}`;
});
