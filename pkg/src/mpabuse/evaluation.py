"""Scoring the lexicon as a binary classifier against labelled comments.

Reads Kaggle "Detecting Insults in Social Commentary" files as they come
(``Insult,Date,Comment`` with quoted, backslash-escaped comments) as
well as a plain ``label,text`` layout.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path

from .annotate import Annotator
from .errors import DataError
from .stats import ClassifierEval, evaluate_classifier

_LABEL_COLUMNS = ("label", "insult")
_TEXT_COLUMNS = ("text", "comment")
_ESCAPE_RE = re.compile(r"\\(x[0-9a-fA-F]{2}|u[0-9a-fA-F]{4}|[nrt'\"\\])")
_SIMPLE = {"n": "\n", "r": "\r", "t": "\t", "'": "'", '"': '"', "\\": "\\"}


def _unescape(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] == '"':
        text = text[1:-1]

    def sub(m: re.Match) -> str:
        code = m.group(1)
        if code[0] in "xu":
            return chr(int(code[1:], 16))
        return _SIMPLE[code]

    return _ESCAPE_RE.sub(sub, text)


def load_labeled(path: str | Path) -> list[tuple[bool, str]]:
    """(is_abusive, text) pairs; labels must be 0 or 1."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read labelled corpus {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        try:
            li = next(header.index(c) for c in _LABEL_COLUMNS if c in header)
            ti = next(header.index(c) for c in _TEXT_COLUMNS if c in header)
        except StopIteration:
            raise DataError(f"{path}: need a label/Insult column and a text/Comment column") from None
        items = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            label = row[li].strip()
            if label not in ("0", "1"):
                raise DataError(f"{path}:{lineno}: label {label!r} is not 0 or 1")
            items.append((label == "1", _unescape(row[ti])))
    if not items:
        raise DataError(f"{path}: no labelled items")
    return items


def evaluate_lexicon(annotator: Annotator, path: str | Path) -> ClassifierEval:
    """A text is predicted abusive when it contains any abuse term."""
    items = load_labeled(path)
    predictions = [annotator.is_abusive(text) for _, text in items]
    return evaluate_classifier(predictions, [gold for gold, _ in items])
