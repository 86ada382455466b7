"""Tweet tokenization and hashtag word segmentation.

Hashtags are the main place where abusive terms hide from a plain
whitespace tokenizer (``#killthewitch``).  Every hashtag emits its body
token, followed by the dictionary words it segments into, so both the
exact-term case (``#coward``) and the compound case are visible to the
lexicon matcher.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

PLAIN = "plain"
HASHTAG = "hashtag"
MENTION = "mention"
URL = "url"

# Order matters: URLs first so '#' and '@' inside them are not split out.
_TOKEN_RE = re.compile(
    r"(?P<url>(?:https?://|www\.)\S+)"
    r"|(?P<mention>@[^\W_]\w*)"
    r"|(?P<hashtag>#[^\W_]+)"
    r"|(?P<word>[^\W_]+)",
    re.IGNORECASE,
)
_RUN_RE = re.compile(r"\d+|[^\W\d_]+")


@dataclass(frozen=True)
class Token:
    surface: str
    origin: str
    start: int
    end: int

    @property
    def matchable(self) -> bool:
        return self.origin in (PLAIN, HASHTAG)


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def source_spans(self) -> list[tuple[int, int]]:
        return [(t.start, t.end) for t in self.tokens]

    def matchable_surfaces(self) -> list[str | None]:
        """Surfaces with URL and mention tokens replaced by ``None`` barriers."""
        return [t.surface if t.matchable else None for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


class SegmentationDict:
    """Word set used for hashtag segmentation."""

    def __init__(self, words: Iterable[str]):
        wordlist = frozenset(w.strip().lower() for w in words if w.strip())
        if not wordlist:
            raise ValueError("segmentation dictionary is empty")
        self.wordlist = wordlist
        self.max_word_len = max(len(w) for w in wordlist)

    def __contains__(self, word: str) -> bool:
        return word in self.wordlist

    def __len__(self) -> int:
        return len(self.wordlist)

    def union(self, words: Iterable[str]) -> SegmentationDict:
        return SegmentationDict(self.wordlist.union(w.lower() for w in words))

    @classmethod
    def from_file(cls, path: str | Path) -> SegmentationDict:
        with open(path, encoding="utf-8") as fh:
            return cls(line for line in fh if not line.startswith("#"))

    @classmethod
    def bundled(cls) -> SegmentationDict:
        """The ~5k common English word list shipped with the package."""
        text = resources.files("mpabuse").joinpath("data/wordlist.txt").read_text("utf-8")
        return cls(text.splitlines())


def _segment_letters(body: str, wordlist: SegmentationDict) -> list[str] | None:
    # best[i] = (word count, negated word lengths) for body[i:]; smaller is better.
    n = len(body)
    best: list[tuple[int, tuple[int, ...]] | None] = [None] * (n + 1)
    best[n] = (0, ())
    limit = wordlist.max_word_len
    for i in range(n - 1, -1, -1):
        cand = None
        for j in range(i + 1, min(n, i + limit) + 1):
            rest = best[j]
            if rest is None or body[i:j] not in wordlist:
                continue
            key = (rest[0] + 1, (i - j,) + rest[1])
            if cand is None or key < cand:
                cand = key
        best[i] = cand
    if best[0] is None:
        return None
    words, pos = [], 0
    for neg_len in best[0][1]:
        words.append(body[pos : pos - neg_len])
        pos -= neg_len
    return words


def segment_hashtag(body: str, wordlist: SegmentationDict) -> list[str] | None:
    """Split a hashtag body into dictionary words.

    Picks the segmentation with the fewest words; ties go to the one with
    the longest first word, then the longest second word, and so on.
    Digit runs are always words of their own.  Returns ``None`` when some
    letter run cannot be fully covered by dictionary words.

    >>> segment_hashtag("killthewitch", SegmentationDict(["kill", "the", "witch"]))
    ['kill', 'the', 'witch']
    """
    if not body:
        return None
    words: list[str] = []
    for run in _RUN_RE.findall(body):
        if run.isdigit():
            words.append(run)
            continue
        part = _segment_letters(run, wordlist)
        if part is None:
            return None
        words.extend(part)
    if "".join(words) != body:
        # Characters outside letters/digits; not a segmentable body.
        return None
    return words


def tokenize(text: str, wordlist: SegmentationDict | None = None) -> TokenStream:
    """Lowercased tokens with origins and character offsets into ``text``.

    Without a ``wordlist`` hashtags contribute only their body token.
    """
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        start, end = m.span()
        if kind == "word":
            tokens.append(Token(m.group().lower(), PLAIN, start, end))
        elif kind == "url":
            tokens.append(Token(m.group().lower(), URL, start, end))
        elif kind == "mention":
            tokens.append(Token(m.group()[1:].lower(), MENTION, start + 1, end))
        else:
            raw = m.group()[1:]
            body = raw.lower()
            tokens.append(Token(body, HASHTAG, start + 1, end))
            if wordlist is None:
                continue
            words = segment_hashtag(body, wordlist)
            if not words or len(words) < 2:
                continue
            same_len = len(body) == len(raw)
            pos = start + 1
            for w in words:
                if same_len:
                    tokens.append(Token(w, HASHTAG, pos, pos + len(w)))
                    pos += len(w)
                else:
                    # lower() changed the length; offsets can only point at the whole tag
                    tokens.append(Token(w, HASHTAG, start + 1, end))
    return TokenStream(tuple(tokens))


def split_term(surface: str) -> tuple[str, ...]:
    """Token-split a lexicon surface the same way tweet text is split."""
    return tuple(w.lower() for w in re.findall(r"[^\W_]+", surface))

