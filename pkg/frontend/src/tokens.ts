// Token-wrapping for the article pane. Words become <span class="tok">
// elements so a text selection can be resolved back to one word; the
// joining whitespace and punctuation stay as plain text nodes, so the
// wrapped fragment reads back as the original string.

const WORD_RE = /[A-Za-z0-9À-ɏ]+(?:['’-][A-Za-z0-9À-ɏ]+)*/g;

export function tokenSpans(text: string, doc: Document = document): DocumentFragment {
  const frag = doc.createDocumentFragment();
  let cursor = 0;
  for (const match of text.matchAll(WORD_RE)) {
    const start = match.index ?? 0;
    if (start > cursor) {
      frag.appendChild(doc.createTextNode(text.slice(cursor, start)));
    }
    const span = doc.createElement("span");
    span.className = "tok";
    span.dataset.word = match[0];
    span.textContent = match[0];
    frag.appendChild(span);
    cursor = start + match[0].length;
  }
  if (cursor < text.length) {
    frag.appendChild(doc.createTextNode(text.slice(cursor)));
  }
  return frag;
}

// The structural subset of Selection the resolver needs; tests can pass
// a stub without faking a full browser Selection object.
export interface SelectionLike {
  isCollapsed: boolean;
  anchorNode: Node | null;
  focusNode: Node | null;
}

function enclosingToken(node: Node | null): HTMLElement | null {
  let cur: Node | null = node;
  while (cur) {
    if (cur instanceof HTMLElement && cur.classList.contains("tok")) return cur;
    cur = cur.parentNode;
  }
  return null;
}

// Resolve a selection to the first token it touches, teaching one word
// per gesture. Collapsed selections (plain clicks) resolve to the token
// under the caret, which makes single-click teaching work too.
export function selectedWord(sel: SelectionLike | null): string | null {
  if (!sel) return null;
  const anchor = enclosingToken(sel.anchorNode);
  const focus = enclosingToken(sel.focusNode);
  const hit = anchor ?? focus;
  return hit?.dataset.word ?? null;
}
