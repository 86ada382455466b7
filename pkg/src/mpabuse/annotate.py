"""Per-tweet abuse classification, topic tagging and target attribution."""

from __future__ import annotations

import csv
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .corpus import Corpus, Tweet, link_replies
from .lexicon import ABUSE, CompiledLexicon, match
from .segment import SegmentationDict, TokenStream, tokenize

log = logging.getLogger(__name__)


class AbuseHit(NamedTuple):
    term: str
    category: str
    span: tuple[int, int]


class TopicHit(NamedTuple):
    topic: str
    term: str
    span: tuple[int, int]


@dataclass(frozen=True)
class Annotation:
    tweet_id: int
    author_id: str
    abusive: bool
    abuse_matches: tuple[AbuseHit, ...]
    topic_mentions: tuple[TopicHit, ...]
    target: str | None = None

    def topic_counts(self) -> Counter:
        return Counter(h.topic for h in self.topic_mentions)


class Annotator:
    """A compiled lexicon plus the hashtag segmentation dictionary it needs.

    The segmentation dictionary always contains every lexicon token so a
    term hidden in a hashtag can be recovered even when the common-word
    list lacks it.
    """

    def __init__(self, lexicon: CompiledLexicon, wordlist: SegmentationDict | None = None):
        self.lexicon = lexicon
        base = wordlist if wordlist is not None else SegmentationDict.bundled()
        self.wordlist = base.union(lexicon.segmentation_words())

    def scan(self, text: str) -> tuple[tuple[AbuseHit, ...], tuple[TopicHit, ...]]:
        stream = tokenize(text, self.wordlist)
        return _hits(self.lexicon, stream)

    def is_abusive(self, text: str) -> bool:
        return bool(self.scan(text)[0])

    def annotate(self, tweet: Tweet, target: str | None = None) -> Annotation:
        abuse, topics = self.scan(tweet.text)
        return Annotation(tweet.id, tweet.author_id, bool(abuse), abuse, topics, target)


def _hits(lexicon: CompiledLexicon, stream: TokenStream):
    toks = stream.tokens
    abuse: dict[tuple[str, tuple[int, int]], AbuseHit] = {}
    topics: dict[tuple[str, tuple[int, int]], TopicHit] = {}
    for m in match(lexicon, stream):
        span = (toks[m.start].start, toks[m.end - 1].end)
        if m.kind == ABUSE:
            abuse.setdefault((m.term, span), AbuseHit(m.term, m.label, span))
        else:
            # A topic counts once per character span, however many terms land there.
            topics.setdefault((m.label, span), TopicHit(m.label, m.term, span))
    order = lambda h: (h.span, h[0], h[1])  # noqa: E731
    return tuple(sorted(abuse.values(), key=order)), tuple(sorted(topics.values(), key=order))


def reply_targets(reply_index: Mapping[str, Sequence[Tweet]]) -> dict[int, str]:
    return {t.id: handle for handle, replies in reply_index.items() for t in replies}


def annotate_tweet(lexicon: CompiledLexicon | Annotator, tweet: Tweet,
                   reply_index: Mapping[str, Sequence[Tweet]] | None = None) -> Annotation:
    annotator = lexicon if isinstance(lexicon, Annotator) else Annotator(lexicon)
    target = None
    if reply_index:
        for handle, replies in reply_index.items():
            if any(r.id == tweet.id for r in replies):
                target = handle
                break
    return annotator.annotate(tweet, target)


@dataclass(frozen=True)
class AbuseCount:
    collected: int
    hadabuse: int

    @property
    def fraction(self) -> float:
        return self.hadabuse / self.collected if self.collected else 0.0

    @property
    def percent(self) -> float:
        return 100.0 * self.fraction

    def as_dict(self) -> dict:
        return {"collected": self.collected, "hadabuse": self.hadabuse,
                "percent_abusive": round(self.percent, 2)}


@dataclass(frozen=True)
class AnnotationSummary:
    all_tweets: AbuseCount
    replies_to_roster: AbuseCount
    replies_to_mps: AbuseCount

    def as_dict(self) -> dict:
        return {"all_tweets": self.all_tweets.as_dict(),
                "replies_to_politicians": self.replies_to_roster.as_dict(),
                "replies_to_mps": self.replies_to_mps.as_dict()}


_WORKER: Annotator | None = None


def _init_worker(annotator: Annotator) -> None:
    global _WORKER
    _WORKER = annotator


def _scan_chunk(texts: list[str]):
    assert _WORKER is not None
    return [_WORKER.scan(t) for t in texts]


def annotate_corpus(lexicon: CompiledLexicon | Annotator, corpus: Corpus,
                    workers: int = 1, chunk_size: int = 2000
                    ) -> tuple[list[Annotation], AnnotationSummary]:
    """One annotation per tweet (corpus order) and the abuse summary.

    With ``workers > 1`` scanning is spread over processes; chunks are
    reassembled in order so the output is identical to a serial run.
    """
    annotator = lexicon if isinstance(lexicon, Annotator) else Annotator(lexicon)
    targets = reply_targets(link_replies(corpus))
    texts = [t.text for t in corpus.tweets]
    if workers > 1 and len(texts) > chunk_size:
        chunks = [texts[i:i + chunk_size] for i in range(0, len(texts), chunk_size)]
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(annotator,)) as pool:
            scans = [s for part in pool.map(_scan_chunk, chunks) for s in part]
    else:
        scans = [annotator.scan(t) for t in texts]
    annotations = [
        Annotation(t.id, t.author_id, bool(abuse), abuse, topics, targets.get(t.id))
        for t, (abuse, topics) in zip(corpus.tweets, scans)
    ]
    summary = summarize(annotations, corpus)
    log.info("annotated %d tweets, %d abusive", len(annotations), summary.all_tweets.hadabuse)
    return annotations, summary


def summarize(annotations: Iterable[Annotation], corpus: Corpus) -> AnnotationSummary:
    counts = {"all": [0, 0], "roster": [0, 0], "mps": [0, 0]}
    for a in annotations:
        keys = ["all"]
        if a.target is not None:
            keys.append("roster")
            if corpus.roster[a.target].is_mp:
                keys.append("mps")
        for k in keys:
            counts[k][0] += 1
            counts[k][1] += a.abusive
    return AnnotationSummary(AbuseCount(*counts["all"]), AbuseCount(*counts["roster"]),
                             AbuseCount(*counts["mps"]))


ANNOTATION_FIELDS = ("tweet_id", "abusive", "abuse_terms", "topics", "target")


def annotation_row(a: Annotation) -> dict:
    return {"tweet_id": a.tweet_id, "abusive": int(a.abusive),
            "abuse_terms": ";".join(h.term for h in a.abuse_matches),
            "topics": ";".join(h.topic for h in a.topic_mentions),
            "target": a.target or ""}


def write_annotations(path: str | Path, annotations: Iterable[Annotation]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=ANNOTATION_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(annotation_row(a) for a in annotations)
