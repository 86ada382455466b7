"""Aggregate annotations into per-politician and per-account quantities."""

from __future__ import annotations

import logging
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from statistics import fmean, stdev
from typing import Iterable, Mapping, Sequence

import numpy as np

from .annotate import Annotation
from .corpus import AccountStats, Corpus, link_replies

log = logging.getLogger(__name__)

TARGETED = "targeted"
BROAD = "broad"
RESPONSIVE = "responsive"
GROUPS = (TARGETED, BROAD, RESPONSIVE)

# Politicians receiving over 10,000 replies in the study periods.
OUTLIERS_2017 = ("Angela Rayner", "Boris Johnson", "Diane Abbott", "Jeremy Hunt",
                 "Jeremy Corbyn", "Tim Farron", "Theresa May")
OUTLIERS_2015 = ("David Cameron", "Ed Miliband", "Nick Clegg")
HEAVY_RECEIVER_THRESHOLD = 10_000


def targetedness(a: int, r: int) -> Fraction:
    """Abusive tweets per recipient, deflated for spread: ``a / (2r - 1)``.

    >>> targetedness(5, 5)
    Fraction(5, 9)
    """
    if r < 1:
        raise ValueError("recipient count must be at least 1")
    if a < r:
        raise ValueError(f"abusive count {a} is smaller than recipient count {r}")
    return Fraction(a, 2 * r - 1)


def abuser_group(a: int, r: int) -> str:
    # Compared on integers: t > 1 iff a > 2r - 1.
    targetedness(a, r)
    denom = 2 * r - 1
    if a > denom:
        return TARGETED
    if a < denom:
        return BROAD
    return RESPONSIVE


@dataclass(frozen=True)
class AbuserProfile:
    account_id: str
    abusive_count: int
    recipients: int
    targetedness: Fraction
    group: str
    stats: AccountStats | None
    topic_vector: np.ndarray

    def as_row(self) -> dict:
        row = {"account_id": self.account_id, "abusive_count": self.abusive_count,
               "recipients": self.recipients, "targetedness": f"{float(self.targetedness):.6f}",
               "group": self.group}
        for name in AccountStats.STAT_FIELDS:
            row[name] = getattr(self.stats, name) if self.stats else ""
        row["is_closed"] = int(self.stats.is_closed) if self.stats else ""
        return row


def account_topic_vector(annotations: Iterable[Annotation], taxonomy: Sequence[str]) -> np.ndarray:
    """Topic mention totals across an account's posts, one dimension per topic.

    Topics outside ``taxonomy`` are not counted.
    """
    pos = {t: i for i, t in enumerate(taxonomy)}
    vec = np.zeros(len(taxonomy))
    for a in annotations:
        for hit in a.topic_mentions:
            i = pos.get(hit.topic)
            if i is not None:
                vec[i] += 1
    return vec


def classify_abusers(annotations: Sequence[Annotation], corpus: Corpus,
                     taxonomy: Sequence[str] = (), min_abusive: int = 3,
                     max_posts: int = 3000) -> list[AbuserProfile]:
    """Profile every account with at least ``min_abusive`` abusive replies to politicians.

    Recipients are the distinct politicians those abusive replies went to.
    The topic vector covers the account's ``max_posts`` most recent posts.
    """
    sent: dict[str, list[str]] = defaultdict(list)
    by_author: dict[str, list[Annotation]] = defaultdict(list)
    for a in annotations:
        by_author[a.author_id].append(a)
        if a.abusive and a.target is not None:
            sent[a.author_id].append(a.target)
    profiles = []
    for account in sorted(sent):
        targets = sent[account]
        if len(targets) < min_abusive:
            continue
        a, r = len(targets), len(set(targets))
        posts = sorted(by_author[account],
                       key=lambda ann: (corpus.by_id[ann.tweet_id].created_at, ann.tweet_id),
                       reverse=True)[:max_posts]
        profiles.append(AbuserProfile(
            account_id=account,
            abusive_count=a,
            recipients=r,
            targetedness=targetedness(a, r),
            group=abuser_group(a, r),
            stats=corpus.accounts.get(account),
            topic_vector=account_topic_vector(posts, taxonomy),
        ))
    log.info("%d abusers with >= %d abusive replies", len(profiles), min_abusive)
    return profiles


def group_summary(profiles: Sequence[AbuserProfile]) -> dict[str, dict]:
    """Group sizes and mean / standard deviation of each account statistic."""
    out = {}
    for group in GROUPS:
        members = [p for p in profiles if p.group == group]
        stats = [p.stats for p in members if p.stats is not None]
        entry: dict = {"n": len(members), "n_with_stats": len(stats)}
        for name in AccountStats.STAT_FIELDS:
            values = [getattr(s, name) for s in stats]
            entry[name] = {
                "mean": fmean(values) if values else None,
                "sd": stdev(values) if len(values) > 1 else None,
            }
        out[group] = entry
    return out


def control_sample(annotations: Iterable[Annotation], corpus: Corpus, n: int,
                   seed: int) -> list[AccountStats]:
    """Random accounts with no abusive tweets at all, for contrast with abusers."""
    abusive_authors = set()
    authors = set()
    for a in annotations:
        authors.add(a.author_id)
        if a.abusive:
            abusive_authors.add(a.author_id)
    roster_ids = {p.account_id for p in corpus.roster}
    pool = sorted(acct for acct in authors - abusive_authors
                  if acct in corpus.accounts and acct not in roster_ids)
    chosen = random.Random(seed).sample(pool, min(n, len(pool)))
    return [corpus.accounts[acct] for acct in sorted(chosen)]


def age_timeline(groups: Mapping[str, Sequence[AccountStats]]) -> list[dict]:
    """Percentage of each group's accounts by account age in whole years."""
    rows = []
    for group, stats in groups.items():
        years = Counter(s.age_days // 365 for s in stats)
        for age in sorted(years):
            rows.append({"group": group, "age_years": age, "accounts": years[age],
                         "percent": round(100.0 * years[age] / len(stats), 4)})
    return rows


@dataclass(frozen=True)
class PoliticianProfile:
    handle: str
    name: str
    party: str
    gender: str
    bame: bool | None
    is_mp: bool
    is_candidate: bool
    prominence: float | None
    replies_received: int
    abusive_replies: int
    tweets_sent: int

    @property
    def abuse_proportion(self) -> float:
        return self.abusive_replies / self.replies_received if self.replies_received else 0.0

    @property
    def band(self) -> int:
        """Sunburst shading band: whole percent abusive, capped at 8 (8% and above)."""
        if not self.replies_received:
            return 0
        return min(8, 100 * self.abusive_replies // self.replies_received)

    def as_row(self) -> dict:
        return {"handle": self.handle, "name": self.name, "party": self.party,
                "gender": self.gender, "bame": _opt_bool(self.bame), "is_mp": int(self.is_mp),
                "is_candidate": int(self.is_candidate),
                "prominence": "" if self.prominence is None else self.prominence,
                "replies_received": self.replies_received,
                "abusive_replies": self.abusive_replies,
                "abuse_proportion": f"{self.abuse_proportion:.6f}",
                "tweets_sent": self.tweets_sent}


def _opt_bool(v: bool | None) -> str | int:
    return "" if v is None else int(v)


def is_excluded(profile: PoliticianProfile, exclude: Iterable[str]) -> bool:
    keys = {e.strip().lstrip("@").casefold() for e in exclude}
    return profile.handle.casefold() in keys or bool(profile.name and profile.name.casefold() in keys)


def politician_profiles(annotations: Sequence[Annotation], corpus: Corpus,
                        exclude: Iterable[str] = ()) -> list[PoliticianProfile]:
    """Replies received, abusive replies and tweets sent for every roster member.

    ``exclude`` names handles or full names to drop (the outlier-removal
    protocol); each removal is logged.
    """
    exclude = list(exclude)
    abusive = {a.tweet_id for a in annotations if a.abusive}
    sent = Counter()
    for t in corpus.tweets:
        p = corpus.roster.resolve(t.author_id)
        if p is not None:
            sent[p.handle] += 1
    profiles = []
    for handle, replies in link_replies(corpus).items():
        p = corpus.roster[handle]
        prof = PoliticianProfile(
            handle=p.handle, name=p.name, party=p.party, gender=p.gender, bame=p.bame,
            is_mp=p.is_mp, is_candidate=p.is_candidate, prominence=p.prominence,
            replies_received=len(replies),
            abusive_replies=sum(1 for t in replies if t.id in abusive),
            tweets_sent=sent[p.handle],
        )
        if exclude and is_excluded(prof, exclude):
            log.info("excluding %s (%s) from politician statistics", p.handle, p.name)
            continue
        profiles.append(prof)
    profiles.sort(key=lambda pr: pr.handle)
    return profiles


def heavy_receivers(profiles: Iterable[PoliticianProfile],
                    threshold: int = HEAVY_RECEIVER_THRESHOLD) -> list[str]:
    return [p.handle for p in profiles if p.replies_received > threshold]


def band_label(band: int) -> str:
    return "8%+" if band >= 8 else f"{band}-{band + 1}%"


def sunburst_rows(profiles: Iterable[PoliticianProfile]) -> list[dict]:
    return [{"handle": p.handle, "party": p.party, "gender": p.gender,
             "abusive_replies": p.abusive_replies,
             "abuse_proportion": f"{p.abuse_proportion:.6f}",
             "band": band_label(p.band)}
            for p in profiles if p.is_mp]


def rise_rows(profiles: Iterable[PoliticianProfile], year: str) -> list[dict]:
    """Party x gender abuse proportion and volume among MPs for one period."""
    cells: dict[tuple[str, str], list[PoliticianProfile]] = defaultdict(list)
    for p in profiles:
        if p.is_mp:
            cells[(p.party, p.gender)].append(p)
    rows = []
    for (party, gender), members in sorted(cells.items()):
        replies = sum(m.replies_received for m in members)
        abusive = sum(m.abusive_replies for m in members)
        rows.append({"year": year, "party": party, "gender": gender, "mps": len(members),
                     "replies": replies, "abusive_replies": abusive,
                     "proportion": f"{abusive / replies:.6f}" if replies else "",
                     "mean_mp_proportion": f"{fmean(m.abuse_proportion for m in members):.6f}"})
    return rows


def feature_matrix(profiles: Iterable[PoliticianProfile]) -> list[dict]:
    """Per-politician variables for fitting a structural equation model elsewhere."""
    return [{"handle": p.handle, "abuse": p.abusive_replies,
             "tweets_received": p.replies_received, "tweets_sent": p.tweets_sent,
             "prominence": "" if p.prominence is None else p.prominence,
             "female": int(p.gender == "female"), "party": p.party, "bame": _opt_bool(p.bame)}
            for p in profiles]


@dataclass(frozen=True)
class TopicRate:
    topic: str
    mentions: int
    abusive_replies: int
    below_minimum: bool

    @property
    def rate(self) -> float:
        return self.abusive_replies / self.mentions


@dataclass(frozen=True)
class TopicRates:
    rates: tuple[TopicRate, ...]
    min_abusive: int

    @property
    def pooled_rate(self) -> float | None:
        mentions = sum(r.mentions for r in self.rates)
        return sum(r.abusive_replies for r in self.rates) / mentions if mentions else None

    @property
    def mean_rate(self) -> float | None:
        return fmean(r.rate for r in self.rates) if self.rates else None

    def __getitem__(self, topic: str) -> TopicRate:
        for r in self.rates:
            if r.topic == topic:
                return r
        raise KeyError(topic)

    def __contains__(self, topic: object) -> bool:
        return any(r.topic == topic for r in self.rates)


def topic_abuse_rates(annotations: Sequence[Annotation], corpus: Corpus,
                      taxonomy: Sequence[str] | None = None,
                      min_abusive: int = 50) -> TopicRates:
    """Abusive replies per topic mention in politicians' own tweets.

    Mentions are counted per occurrence.  Each abusive reply to a tweet
    counts once for every topic that tweet mentions.  Topics with no
    mentions are left out; topics below ``min_abusive`` abusive replies
    are kept but flagged.
    """
    ann = {a.tweet_id: a for a in annotations}
    abusive_replies: Counter = Counter()
    for replies in link_replies(corpus).values():
        for t in replies:
            if t.in_reply_to_tweet is not None and ann[t.id].abusive:
                abusive_replies[t.in_reply_to_tweet] += 1
    mentions: Counter = Counter()
    abusive: Counter = Counter()
    for t in corpus.tweets:
        if t.is_retweet or corpus.roster.resolve(t.author_id) is None:
            continue
        counts = ann[t.id].topic_counts()
        for topic, c in counts.items():
            mentions[topic] += c
            abusive[topic] += abusive_replies[t.id]
    order = list(taxonomy) if taxonomy is not None else sorted(mentions)
    rates = tuple(TopicRate(topic, mentions[topic], abusive[topic], abusive[topic] < min_abusive)
                  for topic in order if mentions[topic] > 0)
    return TopicRates(rates, min_abusive)


def topic_mention_counts(annotations: Iterable[Annotation],
                         taxonomy: Sequence[str]) -> list[dict]:
    """Topic mentions in abusive replies to politicians versus in all tweets."""
    in_abuse: Counter = Counter()
    in_all: Counter = Counter()
    for a in annotations:
        counts = a.topic_counts()
        in_all.update(counts)
        if a.abusive and a.target is not None:
            in_abuse.update(counts)
    return [{"topic": t, "abusive_reply_mentions": in_abuse[t], "all_tweet_mentions": in_all[t]}
            for t in taxonomy]
