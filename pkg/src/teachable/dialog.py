"""Rule-based conversational engine for the teaching sessions.

A small hierarchical state machine: the outer layer is the teach/test
mode, the inner layer (teaching only) rotates through three guidance
contexts that decide how taught words are interpreted; on top of both
sits a conversation tree whose edges are keyed by recognized intents.
Unrecognized input walks a three-step fallback: ask to paraphrase,
repeat the question, then skip to the next article.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib.resources import as_file, files
from pathlib import Path
from typing import Union

from .corpus import ClassLabel
from .learner import KeywordOrigin, KeywordPolarity
from .pipeline import PipelineConfig, default_config, normalize, normalize_word, tokenize

RULES_VERSION = 1
TREE_VERSION = 1


class Mode(str, Enum):
    TEACHING = "teaching"
    TESTING = "testing"


class HeuristicContext(str, Enum):
    EXTERNALLY_RELEVANT = "externally_relevant"
    INTERNALLY_RELEVANT = "internally_relevant"
    INTERNALLY_IRRELEVANT = "internally_irrelevant"
    NEUTRAL = "neutral"


class Intent(str, Enum):
    TEACH_WORDS = "teach_words"
    SWITCH_TO_TESTING = "switch_to_testing"
    SWITCH_TO_TEACHING = "switch_to_teaching"
    REQUEST_REPEAT = "request_repeat"
    REQUEST_REPHRASE = "request_rephrase"
    NEXT_ARTICLE = "next_article"
    CLASSIFY_CURRENT = "classify_current"
    AFFIRM = "affirm"
    DENY = "deny"
    UNKNOWN = "unknown"


# the guidance questions, one per non-neutral context
_HEURISTIC_TEMPLATES = {
    HeuristicContext.EXTERNALLY_RELEVANT: (
        "Can you tell me few more words that should describe the {category} "
        "but are not in the text?"
    ),
    HeuristicContext.INTERNALLY_RELEVANT: (
        "I wonder which words are most relevant while categorizing this text "
        "to the {category}?"
    ),
    HeuristicContext.INTERNALLY_IRRELEVANT: (
        "Which words are least relevant while categorizing this text to the {category}?"
    ),
}

# rotation order within one article; every article restarts at the front
CONTEXT_ROTATION = (
    HeuristicContext.INTERNALLY_RELEVANT,
    HeuristicContext.INTERNALLY_IRRELEVANT,
    HeuristicContext.EXTERNALLY_RELEVANT,
)

# conversational filler that should never be captured as a keyword
_FILLERS = frozenset(
    """please teach taught word words keyword keywords ok okay yes yeah yep
    sure right correct no nope nah hmm well maybe guess think""".split()
)

MAX_FALLBACK_ROUND = 2


class DialogConfigError(Exception):
    """Unusable rules or tree file."""


@dataclass(frozen=True)
class IntentRule:
    intent: Intent
    pattern: str
    regex: re.Pattern

    @staticmethod
    def compile(intent: Intent, pattern: str) -> "IntentRule":
        parts = [re.escape(p) for p in pattern.split("*")]
        return IntentRule(intent, pattern, re.compile(".*".join(parts), re.DOTALL))


@dataclass(frozen=True)
class TreeEdge:
    to: str
    reply: str | None = None


@dataclass(frozen=True)
class TreeNode:
    prompt: str
    rephrase: str
    edges: dict[str, TreeEdge]


@dataclass(frozen=True)
class ConversationTree:
    root: str
    nodes: dict[str, TreeNode]


@dataclass
class DialogState:
    mode: Mode = Mode.TEACHING
    context: HeuristicContext = HeuristicContext.INTERNALLY_RELEVANT
    current_article_id: int = -1
    current_category: ClassLabel = ClassLabel.WORLD
    tree_position: str = "greet"
    history: list[tuple[str, str]] = field(default_factory=list)
    agent_originals: list[str] = field(default_factory=list)
    cursor: int = 0
    fallback_round: int = 0


@dataclass(frozen=True)
class KeywordCaptured:
    lemma: str
    polarity: KeywordPolarity
    origin: KeywordOrigin


@dataclass(frozen=True)
class ModeSwitched:
    mode: Mode


@dataclass(frozen=True)
class ClassifyRequested:
    article_id: int


@dataclass(frozen=True)
class ArticleAdvanced:
    pass


DialogEffect = Union[KeywordCaptured, ModeSwitched, ClassifyRequested, ArticleAdvanced]


def load_intent_rules(path: str | Path) -> list[IntentRule]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != f"#version {RULES_VERSION}":
        raise DialogConfigError(f"{path}: first line must be '#version {RULES_VERSION}'")
    rules: list[IntentRule] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            intent_name, pattern = line.split("\t", 1)
        except ValueError:
            raise DialogConfigError(f"{path}:{lineno}: expected INTENT<TAB>pattern") from None
        try:
            intent = Intent(intent_name.strip())
        except ValueError:
            raise DialogConfigError(f"{path}:{lineno}: unknown intent {intent_name!r}") from None
        pattern = pattern.strip().lower()
        if not pattern:
            raise DialogConfigError(f"{path}:{lineno}: empty pattern")
        rules.append(IntentRule.compile(intent, pattern))
    return rules


def load_tree(path: str | Path) -> ConversationTree:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DialogConfigError(f"{path}: invalid JSON: {exc}") from exc
    if raw.get("version") != TREE_VERSION:
        raise DialogConfigError(f"{path}: unsupported tree version {raw.get('version')!r}")
    nodes: dict[str, TreeNode] = {}
    for node_id, spec in raw["nodes"].items():
        edges = {
            intent_name: TreeEdge(to=edge["to"], reply=edge.get("reply"))
            for intent_name, edge in spec["edges"].items()
        }
        nodes[node_id] = TreeNode(
            prompt=spec["prompt"], rephrase=spec.get("rephrase", spec["prompt"]), edges=edges
        )
    tree = ConversationTree(root=raw["root"], nodes=nodes)
    _check_tree(tree, path)
    return tree


def _check_tree(tree: ConversationTree, path: str | Path) -> None:
    if tree.root not in tree.nodes:
        raise DialogConfigError(f"{path}: root {tree.root!r} is not a node")
    for node_id, node in tree.nodes.items():
        for intent in Intent:
            edge = node.edges.get(intent.value)
            if edge is None:
                raise DialogConfigError(f"{path}: node {node_id!r} lacks an edge for {intent.value}")
            if edge.to not in tree.nodes:
                raise DialogConfigError(
                    f"{path}: node {node_id!r} edge {intent.value} points at missing {edge.to!r}"
                )
    reachable = {tree.root}
    frontier = [tree.root]
    while frontier:
        node = tree.nodes[frontier.pop()]
        for edge in node.edges.values():
            if edge.to not in reachable:
                reachable.add(edge.to)
                frontier.append(edge.to)
    unreachable = set(tree.nodes) - reachable
    if unreachable:
        raise DialogConfigError(f"{path}: unreachable nodes {sorted(unreachable)}")


def default_rules() -> list[IntentRule]:
    with as_file(files("teachable.data") / "intent_rules.tsv") as p:
        return load_intent_rules(p)


def default_tree() -> ConversationTree:
    with as_file(files("teachable.data") / "dialog_tree.json") as p:
        return load_tree(p)


def heuristic_prompt(context: HeuristicContext, category: ClassLabel) -> str:
    """The guidance question for one context, category name filled in."""
    if context is HeuristicContext.NEUTRAL:
        raise ValueError("no guidance question in the neutral context")
    return _HEURISTIC_TEMPLATES[context].format(category=category.display_name)


def extract_words(utterance: str, config: PipelineConfig) -> list[str]:
    """Candidate taught words: lowercased tokens minus stopwords and filler."""
    words = []
    for token in normalize(tokenize(utterance)):
        if token in config.stopword_list or token in _FILLERS:
            continue
        if not any(ch.isalnum() for ch in token):
            continue
        words.append(token)
    return words


def parse_intent(
    utterance: str,
    state: DialogState,
    rules: list[IntentRule],
    config: PipelineConfig | None = None,
) -> tuple[Intent, list[str]]:
    """First matching rule wins; teach_words also returns the word list."""
    config = config or default_config()
    normalized = " ".join(utterance.lower().split())
    if not normalized:
        return Intent.UNKNOWN, []
    for rule in rules:
        if rule.regex.fullmatch(normalized):
            if rule.intent is Intent.TEACH_WORDS:
                return rule.intent, extract_words(normalized, config)
            return rule.intent, []
    return Intent.UNKNOWN, []


def _render(
    template: str, state: DialogState, words: list[str] | None = None
) -> str:
    text = template
    if "$heuristic$" in text:
        if state.context is HeuristicContext.NEUTRAL:
            text = text.replace("$heuristic$", "").strip()
        else:
            text = text.replace(
                "$heuristic$", heuristic_prompt(state.context, state.current_category)
            )
    text = text.replace("$category$", state.current_category.display_name)
    if "$words$" in text:
        text = text.replace("$words$", ", ".join(words or []))
    return text


def say(state: DialogState, reply: str, original: bool = True) -> str:
    """Record one agent utterance; echoes (original=False) are excluded
    from the pool the repeat intent draws from."""
    state.history.append(("agent", reply))
    if original:
        state.agent_originals.append(reply)
    return reply


def opening(state: DialogState, tree: ConversationTree) -> str:
    """The greeting the agent sends when a session starts."""
    return say(state, _render(tree.nodes[tree.root].prompt, state))


def begin_article(state: DialogState, article_id: int, category: ClassLabel) -> str:
    """Point the dialog at a new article and (in teach mode) ask about it.

    Resets the context rotation to its first entry; the caller shows the
    article text itself.
    """
    state.current_article_id = article_id
    state.current_category = ClassLabel(category)
    if state.mode is Mode.TEACHING:
        state.context = CONTEXT_ROTATION[0]
        state.tree_position = "teach_hub"
        question = heuristic_prompt(state.context, state.current_category)
        intro = f"This article is filed under {state.current_category.display_name}. {question}"
    else:
        state.tree_position = "test_hub"
        intro = "Here is a test article. Ask me to classify it when you are ready."
    return say(state, intro)


def fallback(state: DialogState, tree: ConversationTree) -> tuple[str, list[DialogEffect]]:
    """Paraphrase request, then question repeat, then skip to next article."""
    round_now = state.fallback_round
    if round_now == 0:
        state.fallback_round = 1
        return say(state, "Sorry, I did not catch that. Could you put it differently?"), []
    if round_now == 1:
        state.fallback_round = 2
        node = tree.nodes[state.tree_position]
        return say(state, _render(node.prompt, state)), []
    state.fallback_round = 0
    reply = say(state, "Let's set this one aside and move to the next article.")
    return reply, [ArticleAdvanced()]


def _capture_keywords(state: DialogState, words: list[str], config: PipelineConfig) -> list[KeywordCaptured]:
    if state.context is HeuristicContext.INTERNALLY_IRRELEVANT:
        polarity = KeywordPolarity.IRRELEVANT
    else:
        polarity = KeywordPolarity.RELEVANT
    if state.context is HeuristicContext.EXTERNALLY_RELEVANT:
        origin = KeywordOrigin.EXTERNAL
    else:
        origin = KeywordOrigin.INTERNAL_TEXT
    captured: list[KeywordCaptured] = []
    seen: set[str] = set()
    for word in words:
        for lemma in normalize_word(word, config):
            if lemma not in seen:
                seen.add(lemma)
                captured.append(KeywordCaptured(lemma=lemma, polarity=polarity, origin=origin))
            break
    return captured


def advance(
    state: DialogState,
    utterance: str,
    tree: ConversationTree,
    rules: list[IntentRule],
    config: PipelineConfig | None = None,
) -> tuple[DialogState, str, list[DialogEffect]]:
    """Consume one user utterance; mutate and return the state.

    Produces the agent's reply plus the effects the caller must apply
    (keyword captures, mode switches, classification or article-advance
    requests).
    """
    config = config or default_config()
    state.history.append(("user", utterance))
    intent, words = parse_intent(utterance, state, rules, config)

    effects: list[DialogEffect] = []
    captured: list[KeywordCaptured] = []
    if intent is Intent.TEACH_WORDS and state.mode is Mode.TEACHING:
        captured = _capture_keywords(state, words, config)
        if not captured:
            intent = Intent.UNKNOWN
    elif intent is Intent.TEACH_WORDS and not words:
        intent = Intent.UNKNOWN

    if intent is Intent.UNKNOWN:
        reply, effects = fallback(state, tree)
        return state, reply, effects

    state.fallback_round = 0

    if intent is Intent.REQUEST_REPEAT:
        if not state.agent_originals:
            return state, say(state, "I have not said anything yet."), []
        index = len(state.agent_originals) - 1 - state.cursor
        if index < 0:
            index = 0
        else:
            state.cursor += 1
        return state, say(state, state.agent_originals[index], original=False), []

    state.cursor = 0
    node = tree.nodes[state.tree_position]

    if intent is Intent.REQUEST_REPHRASE:
        return state, say(state, _render(node.rephrase, state)), []

    edge = node.edges[intent.value]
    lemmas = [c.lemma for c in captured]

    if intent is Intent.TEACH_WORDS and captured:
        effects.extend(captured)
        # rotate the guidance context after a successful capture
        position = CONTEXT_ROTATION.index(state.context) if state.context in CONTEXT_ROTATION else -1
        state.context = CONTEXT_ROTATION[(position + 1) % len(CONTEXT_ROTATION)]
    elif intent is Intent.SWITCH_TO_TESTING and state.mode is Mode.TEACHING:
        state.mode = Mode.TESTING
        state.context = HeuristicContext.NEUTRAL
        effects.append(ModeSwitched(Mode.TESTING))
    elif intent is Intent.SWITCH_TO_TEACHING and state.mode is Mode.TESTING:
        state.mode = Mode.TEACHING
        state.context = CONTEXT_ROTATION[0]
        effects.append(ModeSwitched(Mode.TEACHING))
    elif intent is Intent.NEXT_ARTICLE:
        effects.append(ArticleAdvanced())
    elif intent is Intent.CLASSIFY_CURRENT and state.mode is Mode.TESTING:
        effects.append(ClassifyRequested(state.current_article_id))

    state.tree_position = edge.to
    template = edge.reply if edge.reply is not None else tree.nodes[edge.to].prompt
    return state, say(state, _render(template, state, lemmas)), effects
