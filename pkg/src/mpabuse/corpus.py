"""Archived tweet ingestion, account statistics, the politician roster.

Tweets come from line-delimited JSON archives, one record per line::

    {"id": 1, "author_id": "u1", "text": "...", "created_at": "2017-05-01T10:00:00Z",
     "in_reply_to_account": "testmp", "in_reply_to_tweet": null, "is_retweet": false}

Replies are attributed only through ``in_reply_to_account``; an
``@handle`` in the body does not make a tweet a reply.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .errors import CorpusError

log = logging.getLogger(__name__)

TWEET_FIELDS = ("id", "author_id", "text", "created_at", "in_reply_to_account",
                "in_reply_to_tweet", "is_retweet")
ROSTER_COLUMNS = ("handle", "name", "party", "gender", "bame", "is_mp", "is_candidate",
                  "prominence", "account_id")
ROSTER_REQUIRED = ("handle", "party", "gender", "is_mp", "is_candidate")
ACCOUNT_COLUMNS = ("account_id", "account_created_at", "favourites", "followers",
                   "following", "listed", "posts", "is_closed")
GENDERS = ("female", "male", "unspecified")
MAX_MALFORMED_FRACTION = 0.5

_TRUE = {"true", "t", "yes", "y", "1"}
_FALSE = {"false", "f", "no", "n", "0", ""}


def parse_time(value: str) -> datetime:
    """ISO-8601 timestamp as an aware UTC datetime (naive input is taken as UTC)."""
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"bad timestamp {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_bool(value: object) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def normalize_handle(handle: str) -> str:
    return handle.strip().lstrip("@").lower()


@dataclass(frozen=True)
class Window:
    """Inclusive collection window."""

    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"window start {self.start} is not before end {self.end}")

    def __contains__(self, ts: datetime) -> bool:
        return self.start <= ts <= self.end

    @classmethod
    def parse(cls, start: str, end: str) -> Window:
        return cls(parse_time(start), parse_time(end))


@dataclass(frozen=True)
class Tweet:
    id: int
    author_id: str
    text: str
    created_at: datetime
    in_reply_to_account: str | None = None
    in_reply_to_tweet: int | None = None
    is_retweet: bool = False

    @classmethod
    def from_record(cls, rec: Mapping) -> Tweet:
        missing = [f for f in ("id", "author_id", "text", "created_at") if f not in rec]
        if missing:
            raise ValueError(f"missing fields {missing}")
        text = rec["text"]
        if not isinstance(text, str) or not text.strip():
            raise ValueError("empty text")
        tweet_id = rec["id"]
        if isinstance(tweet_id, bool) or not isinstance(tweet_id, (int, str)):
            raise ValueError(f"bad id {tweet_id!r}")
        tweet_id = int(tweet_id)
        if not 0 <= tweet_id < 2**64:
            raise ValueError(f"id {tweet_id} outside 64-bit range")
        reply_acct = rec.get("in_reply_to_account")
        reply_tweet = rec.get("in_reply_to_tweet")
        return cls(
            id=tweet_id,
            author_id=str(rec["author_id"]),
            text=text,
            created_at=parse_time(rec["created_at"]),
            in_reply_to_account=None if reply_acct in (None, "") else str(reply_acct),
            in_reply_to_tweet=None if reply_tweet in (None, "") else int(reply_tweet),
            is_retweet=parse_bool(rec.get("is_retweet", False)),
        )

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "author_id": self.author_id,
            "text": self.text,
            "created_at": self.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "in_reply_to_account": self.in_reply_to_account,
            "in_reply_to_tweet": self.in_reply_to_tweet,
            "is_retweet": self.is_retweet,
        }


@dataclass(frozen=True)
class IngestResult:
    tweets: tuple[Tweet, ...]
    lines: int
    out_of_window: int
    malformed: int
    problems: tuple[str, ...] = ()

    def counters(self) -> dict[str, int]:
        return {"lines": self.lines, "kept": len(self.tweets),
                "out_of_window": self.out_of_window, "malformed": self.malformed}


def ingest_tweets(path: str | Path, window: Window) -> IngestResult:
    """Read a tweet archive, keeping well-formed records inside ``window``.

    Malformed lines (bad JSON, missing fields, empty text, bad timestamps,
    repeated ids) are counted and skipped; the ingest fails only when the
    file is unreadable or more than half of its records are malformed.
    """
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read tweet file {path}: {exc}") from exc
    kept: list[Tweet] = []
    seen: set[int] = set()
    lines = out_of_window = malformed = 0
    problems: list[str] = []
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            lines += 1
            try:
                rec = json.loads(line)
                if not isinstance(rec, dict):
                    raise ValueError("record is not an object")
                tweet = Tweet.from_record(rec)
                if tweet.id in seen:
                    raise ValueError(f"duplicate id {tweet.id}")
            except (ValueError, TypeError) as exc:
                malformed += 1
                problems.append(f"{path}:{lineno}: {exc}")
                continue
            seen.add(tweet.id)
            if tweet.created_at not in window:
                out_of_window += 1
                continue
            kept.append(tweet)
    for p in problems[:20]:
        log.warning("skipped malformed record %s", p)
    if lines and malformed / lines > MAX_MALFORMED_FRACTION:
        raise CorpusError(
            f"{path}: {malformed} of {lines} records malformed; first problems: "
            + "; ".join(problems[:3])
        )
    log.info("ingested %s: %d kept, %d outside window, %d malformed",
             path, len(kept), out_of_window, malformed)
    return IngestResult(tuple(kept), lines, out_of_window, malformed, tuple(problems))


@dataclass(frozen=True)
class AccountStats:
    account_id: str
    account_created_at: datetime
    age_days: int
    favourites: int
    followers: int
    following: int
    listed: int
    posts: int
    is_closed: bool = False

    STAT_FIELDS = ("age_days", "favourites", "followers", "following", "listed", "posts")


def load_accounts(path: str | Path, reference: datetime) -> dict[str, AccountStats]:
    """Account statistics keyed by account id; ages are whole days before ``reference``."""
    accounts: dict[str, AccountStats] = {}
    for lineno, row in _read_table(path, ("account_id", "account_created_at")):
        try:
            created = parse_time(row["account_created_at"])
            counts = {}
            for name in ("favourites", "followers", "following", "listed", "posts"):
                counts[name] = int(row.get(name) or 0)
                if counts[name] < 0:
                    raise ValueError(f"negative {name}")
            closed = parse_bool(row.get("is_closed", ""))
        except ValueError as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from exc
        age = math.floor((reference - created).total_seconds() / 86400)
        if age < 0:
            raise CorpusError(f"{path}:{lineno}: account created after the reference date")
        acct = row["account_id"].strip()
        if acct in accounts:
            raise CorpusError(f"{path}:{lineno}: duplicate account_id {acct!r}")
        accounts[acct] = AccountStats(acct, created, age, is_closed=closed, **counts)
    return accounts


@dataclass(frozen=True)
class Politician:
    handle: str
    account_id: str
    name: str
    party: str
    gender: str
    bame: bool | None
    is_mp: bool
    is_candidate: bool
    prominence: float | None = None


class Roster:
    """Politicians, looked up case-insensitively by handle or account id."""

    def __init__(self, politicians: Iterable[Politician]):
        self._by_handle: dict[str, Politician] = {}
        self._by_key: dict[str, Politician] = {}
        for p in politicians:
            if p.handle in self._by_handle:
                raise CorpusError(f"duplicate roster handle {p.handle!r}")
            self._by_handle[p.handle] = p
        for p in self._by_handle.values():
            self._by_key[p.handle] = p
        for p in self._by_handle.values():
            key = p.account_id.lower()
            other = self._by_key.get(key)
            if other is not None and other is not p:
                raise CorpusError(f"account id {p.account_id!r} clashes with roster entry {other.handle!r}")
            self._by_key[key] = p

    def resolve(self, key: str | None) -> Politician | None:
        if key is None:
            return None
        return self._by_key.get(normalize_handle(str(key)))

    def __getitem__(self, handle: str) -> Politician:
        p = self.resolve(handle)
        if p is None:
            raise KeyError(handle)
        return p

    def __contains__(self, key: object) -> bool:
        return isinstance(key, str) and self.resolve(key) is not None

    def __iter__(self):
        return iter(self._by_handle.values())

    def __len__(self) -> int:
        return len(self._by_handle)

    def account_ids(self) -> set[str]:
        return {p.account_id for p in self}


def load_roster(path: str | Path) -> Roster:
    """Read the roster file (header row required; ``handle`` and flags mandatory)."""
    politicians = []
    for lineno, row in _read_table(path, ROSTER_REQUIRED):
        try:
            handle = normalize_handle(row["handle"])
            if not handle:
                raise ValueError("empty handle")
            gender = (row.get("gender") or "unspecified").strip().lower()
            gender = {"f": "female", "m": "male", "": "unspecified"}.get(gender, gender)
            if gender not in GENDERS:
                raise ValueError(f"unknown gender {row['gender']!r}")
            bame_raw = (row.get("bame") or "").strip()
            prominence_raw = (row.get("prominence") or "").strip()
            prominence = float(prominence_raw) if prominence_raw else None
            if prominence is not None and (prominence < 0 or math.isnan(prominence)):
                raise ValueError("prominence must be non-negative")
            is_mp = parse_bool(row["is_mp"])
            is_candidate = parse_bool(row["is_candidate"])
            if not (is_mp or is_candidate):
                raise ValueError(f"{handle!r} is neither MP nor candidate")
        except ValueError as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from exc
        politicians.append(Politician(
            handle=handle,
            account_id=(row.get("account_id") or "").strip() or handle,
            name=(row.get("name") or "").strip(),
            party=row["party"].strip(),
            gender=gender,
            bame=parse_bool(bame_raw) if bame_raw else None,
            is_mp=is_mp,
            is_candidate=is_candidate,
            prominence=prominence,
        ))
    roster = Roster(politicians)
    log.info("roster %s: %d politicians", path, len(roster))
    return roster


def _read_table(path: str | Path, required: Iterable[str]):
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        header = [h.strip().lower() for h in (reader.fieldnames or [])]
        missing = [c for c in required if c not in header]
        if missing:
            raise CorpusError(f"{path}: missing required column(s) {', '.join(missing)}")
        reader.fieldnames = header
        for lineno, row in enumerate(reader, start=2):
            if None in row:
                raise CorpusError(f"{path}:{lineno}: more fields than the header")
            yield lineno, {k: (v if v is not None else "") for k, v in row.items()}


@dataclass(frozen=True)
class Corpus:
    """Ingested tweets plus the roster and account statistics.

    Treat as read-only once built; all indices are derived in ``build``.
    """

    tweets: tuple[Tweet, ...]
    roster: Roster
    window: Window
    accounts: Mapping[str, AccountStats] = field(default_factory=dict)
    by_id: Mapping[int, Tweet] = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, tweets: Iterable[Tweet], roster: Roster, window: Window,
              accounts: Mapping[str, AccountStats] | None = None) -> Corpus:
        ordered = tuple(sorted(tweets, key=lambda t: (t.created_at, t.id)))
        by_id: dict[int, Tweet] = {}
        for t in ordered:
            if t.id in by_id:
                raise CorpusError(f"duplicate tweet id {t.id}")
            by_id[t.id] = t
        return cls(ordered, roster, window, dict(accounts or {}), by_id)

    @property
    def reference_date(self) -> datetime:
        return self.window.end

    def get(self, tweet_id: int) -> Tweet | None:
        return self.by_id.get(tweet_id)

    def __len__(self) -> int:
        return len(self.tweets)

    def author_politician(self, tweet: Tweet) -> Politician | None:
        return self.roster.resolve(tweet.author_id)


def link_replies(corpus: Corpus) -> dict[str, list[Tweet]]:
    """Reply index: politician handle -> replies to that politician, in corpus order.

    Retweets and tweets written by roster members are left out, so every
    entry is a member of the public replying to one politician.
    """
    index: dict[str, list[Tweet]] = {p.handle: [] for p in corpus.roster}
    for t in corpus.tweets:
        if t.is_retweet or t.in_reply_to_account is None:
            continue
        target = corpus.roster.resolve(t.in_reply_to_account)
        if target is None or corpus.roster.resolve(t.author_id) is not None:
            continue
        index[target.handle].append(t)
    return index


def load_corpus(tweets_path: str | Path, roster_path: str | Path, window: Window,
                accounts_path: str | Path | None = None) -> tuple[Corpus, IngestResult]:
    roster = load_roster(roster_path)
    ingest = ingest_tweets(tweets_path, window)
    accounts = load_accounts(accounts_path, window.end) if accounts_path else {}
    return Corpus.build(ingest.tweets, roster, window, accounts), ingest


def write_tweets(path: str | Path, tweets: Iterable[Tweet]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            fh.write(json.dumps(t.to_record(), ensure_ascii=False) + "\n")
