"""Abuse and topic term lists compiled into one token-level matcher.

Terms are matched over token sequences, never raw substrings, so a
lexicon entry ``ass`` cannot fire inside ``class``.  Both term lists go
into a single Aho-Corasick automaton whose alphabet is whole tokens;
each accepting state knows which terms end there and what kind they are.
"""

from __future__ import annotations

import csv
import logging
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import LexiconError
from .segment import TokenStream, split_term

log = logging.getLogger(__name__)

ABUSE = "abuse"
TOPIC = "topic"
CATEGORIES = ("obscene", "slur", "insult", "threat")
MAX_ABUSE_TOKENS = 5


@dataclass(frozen=True)
class AbuseTerm:
    surface: str
    tokens: tuple[str, ...]
    category: str


@dataclass(frozen=True)
class TopicTerm:
    surface: str
    tokens: tuple[str, ...]
    topic: str
    subtopic: str | None = None


@dataclass(frozen=True, order=True)
class Match:
    """A term found over tokens ``[start, end)``; ``label`` is category or topic."""

    start: int
    end: int
    kind: str
    term: str
    label: str


class TokenAutomaton:
    """Aho-Corasick automaton whose symbols are whole tokens.

    ``search`` reports every (pattern index, start, end) occurrence,
    overlapping ones included.  ``None`` in the input acts as a barrier
    that no pattern can span.
    """

    def __init__(self, patterns: Sequence[Sequence[str]]):
        self.patterns = [tuple(p) for p in patterns]
        self._goto: list[dict[str, int]] = [{}]
        self._out: list[list[int]] = [[]]
        for idx, pat in enumerate(self.patterns):
            if not pat:
                raise ValueError(f"empty pattern at index {idx}")
            state = 0
            for tok in pat:
                nxt = self._goto[state].get(tok)
                if nxt is None:
                    nxt = len(self._goto)
                    self._goto[state][tok] = nxt
                    self._goto.append({})
                    self._out.append([])
                state = nxt
            self._out[state].append(idx)

        self._fail = [0] * len(self._goto)
        queue = deque(self._goto[0].values())
        while queue:
            state = queue.popleft()
            for tok, child in self._goto[state].items():
                queue.append(child)
                f = self._fail[state]
                while f and tok not in self._goto[f]:
                    f = self._fail[f]
                target = self._goto[f].get(tok, 0)
                self._fail[child] = target if target != child else 0
                # Dictionary suffix outputs, inherited once at build time.
                self._out[child] = self._out[child] + self._out[self._fail[child]]
        self._lengths = [len(p) for p in self.patterns]

    def __len__(self) -> int:
        return len(self.patterns)

    def search(self, tokens: Iterable[str | None]) -> list[tuple[int, int, int]]:
        goto, fail, out, lengths = self._goto, self._fail, self._out, self._lengths
        hits: list[tuple[int, int, int]] = []
        state = 0
        for i, tok in enumerate(tokens):
            if tok is None:
                state = 0
                continue
            while state and tok not in goto[state]:
                state = fail[state]
            state = goto[state].get(tok, 0)
            if out[state]:
                end = i + 1
                for idx in out[state]:
                    hits.append((idx, end - lengths[idx], end))
        return hits


@dataclass(frozen=True)
class CompiledLexicon:
    abuse_terms: tuple[AbuseTerm, ...]
    topic_terms: tuple[TopicTerm, ...]
    taxonomy: tuple[str, ...]
    automaton: TokenAutomaton = field(repr=False, compare=False)

    def match(self, tokens: TokenStream | Sequence[str | None]) -> list[Match]:
        return match(self, tokens)

    def segmentation_words(self) -> set[str]:
        """Every token of every term, for the hashtag segmentation dictionary."""
        words: set[str] = set()
        for t in self.abuse_terms:
            words.update(t.tokens)
        for t in self.topic_terms:
            words.update(t.tokens)
        return words

    @property
    def abuse_surfaces(self) -> list[str]:
        return [t.surface for t in self.abuse_terms]


def compile_lexicon(
    abuse_terms: Sequence[AbuseTerm],
    topic_terms: Sequence[TopicTerm] = (),
    taxonomy: Sequence[str] | None = None,
) -> CompiledLexicon:
    if not abuse_terms:
        raise LexiconError("abuse lexicon is empty")
    _check_unique(abuse_terms, "abuse")
    _check_unique(topic_terms, "topic")
    if taxonomy is None:
        taxonomy = list(dict.fromkeys(t.topic for t in topic_terms))
    else:
        allowed = set(taxonomy)
        for t in topic_terms:
            if t.topic not in allowed:
                raise LexiconError(f"topic {t.topic!r} of term {t.surface!r} is not in the taxonomy")
    patterns = [t.tokens for t in abuse_terms] + [t.tokens for t in topic_terms]
    return CompiledLexicon(
        abuse_terms=tuple(abuse_terms),
        topic_terms=tuple(topic_terms),
        taxonomy=tuple(taxonomy),
        automaton=TokenAutomaton(patterns),
    )


def _check_unique(terms: Sequence[AbuseTerm] | Sequence[TopicTerm], name: str) -> None:
    seen: set[tuple[str, ...]] = set()
    for t in terms:
        if t.tokens in seen:
            raise LexiconError(f"duplicate {name} term {t.surface!r}")
        seen.add(t.tokens)


def match(lexicon: CompiledLexicon, tokens: TokenStream | Sequence[str | None]) -> list[Match]:
    """All lexicon terms occurring at token boundaries, sorted by position.

    ``tokens`` is either a TokenStream (URL and mention tokens become
    barriers) or a plain sequence of lowercase surfaces.
    """
    if isinstance(tokens, TokenStream):
        tokens = tokens.matchable_surfaces()
    n_abuse = len(lexicon.abuse_terms)
    found = []
    for idx, start, end in lexicon.automaton.search(tokens):
        if idx < n_abuse:
            term = lexicon.abuse_terms[idx]
            found.append(Match(start, end, ABUSE, term.surface, term.category))
        else:
            topic_term = lexicon.topic_terms[idx - n_abuse]
            found.append(Match(start, end, TOPIC, topic_term.surface, topic_term.topic))
    found.sort()
    return found


def _rows(path: str | Path) -> Iterable[tuple[int, list[str]]]:
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise LexiconError(f"cannot read term file {path}: {exc}") from exc
    with fh:
        lines = (line for line in fh)
        for lineno, row in enumerate(csv.reader(lines), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            yield lineno, [cell.strip() for cell in row]


def read_abuse_terms(path: str | Path) -> list[AbuseTerm]:
    terms = []
    for lineno, row in _rows(path):
        if row[0].lower() == "surface":
            continue
        if len(row) != 2:
            raise LexiconError(f"{path}:{lineno}: expected surface,category")
        surface, category = row[0].lower(), row[1].lower()
        tokens = split_term(surface)
        if not tokens:
            raise LexiconError(f"{path}:{lineno}: empty term")
        if len(tokens) > MAX_ABUSE_TOKENS:
            raise LexiconError(f"{path}:{lineno}: abuse term {surface!r} longer than {MAX_ABUSE_TOKENS} tokens")
        if category not in CATEGORIES:
            raise LexiconError(f"{path}:{lineno}: unknown category {category!r}")
        terms.append(AbuseTerm(surface, tokens, category))
    return terms


def read_topic_terms(path: str | Path) -> list[TopicTerm]:
    terms = []
    for lineno, row in _rows(path):
        if row[0].lower() == "surface":
            continue
        if len(row) not in (2, 3) or not row[1]:
            raise LexiconError(f"{path}:{lineno}: expected surface,topic[,subtopic]")
        surface = row[0].lower()
        tokens = split_term(surface)
        if not tokens:
            raise LexiconError(f"{path}:{lineno}: empty term")
        subtopic = row[2] if len(row) == 3 and row[2] else None
        terms.append(TopicTerm(surface, tokens, row[1], subtopic))
    return terms


def load_lexicon(
    abuse_path: str | Path,
    topic_path: str | Path | None = None,
    taxonomy: Sequence[str] | None = None,
) -> CompiledLexicon:
    abuse = read_abuse_terms(abuse_path)
    topics: list[TopicTerm] = []
    if topic_path is not None:
        topics = read_topic_terms(topic_path)
        if not topics:
            raise LexiconError(f"topic lexicon {topic_path} is empty")
    lex = compile_lexicon(abuse, topics, taxonomy)
    log.info("lexicon: %d abuse terms, %d topic terms, %d topics",
             len(lex.abuse_terms), len(lex.topic_terms), len(lex.taxonomy))
    return lex


def demo_paths() -> tuple[Path, Path]:
    data = resources.files("mpabuse").joinpath("data")
    return Path(str(data.joinpath("demo_abuse.csv"))), Path(str(data.joinpath("demo_topics.csv")))


def load_demo_lexicon() -> CompiledLexicon:
    """The small demonstration lexicon bundled with the package."""
    return load_lexicon(*demo_paths())
