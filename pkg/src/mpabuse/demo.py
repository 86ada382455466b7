"""Synthetic election-period corpus for demos and end-to-end checks.

Twenty politicians, sixty accounts that send repeated abuse (split
evenly between targeted, broad and responsive patterns), a few
low-volume abusers and a larger crowd of ordinary repliers.  Every
abusive tweet is built from an explicit abuse template, and every
ordinary tweet from a vocabulary that contains no abuse term, so the
generator knows the true abusive flag of each tweet and writes it to
``truth.csv``.
"""

from __future__ import annotations

import csv
import random
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path

from .corpus import Tweet, write_tweets
from .lexicon import read_abuse_terms, read_topic_terms

DEMO_SEED = 7
WINDOW = ("2017-04-08T00:00:00Z", "2017-05-07T23:59:59Z")
_START = datetime(2017, 4, 8, tzinfo=timezone.utc)
_SPAN = timedelta(days=30) - timedelta(seconds=1)

POLITICIANS = [
    # handle, name, party, gender, bame, is_mp, is_candidate, prominence
    ("pm_hartley", "Margaret Hartley", "Conservative", "female", False, True, True, 980.0),
    ("leader_okafor", "Daniel Okafor", "Labour", "male", True, True, True, 870.0),
    ("j_whitlock", "James Whitlock", "Conservative", "male", False, True, True, 410.0),
    ("s_pemberton", "Sarah Pemberton", "Conservative", "female", False, True, True, 150.0),
    ("r_castellano", "Rosa Castellano", "Labour", "female", True, True, True, 220.0),
    ("t_brannigan", "Tom Brannigan", "Labour", "male", False, True, True, 95.0),
    ("a_mcintyre", "Alasdair McIntyre", "Scottish National Party", "male", False, True, True, 130.0),
    ("f_drummond", "Fiona Drummond", "Scottish National Party", "female", False, True, False, 60.0),
    ("k_aziz", "Kamran Aziz", "Conservative", "male", True, True, True, 75.0),
    ("h_lindqvist", "Helen Lindqvist", "Liberal Democrat", "female", False, True, True, 110.0),
    ("g_fairweather", "George Fairweather", "Liberal Democrat", "male", False, True, True, 40.0),
    ("m_oduya", "Mercy Oduya", "Labour", "female", True, True, False, 55.0),
    ("p_ashdown", "Peter Ashdown", "Conservative", "male", False, True, True, 35.0),
    ("l_greaves", "Lucy Greaves", "Labour", "female", False, True, True, 45.0),
    ("c_moss", "Caroline Moss", "Green", "female", False, False, True, 20.0),
    ("b_tait", "Ben Tait", "Labour", "male", False, False, True, 10.0),
    ("n_shah", "Nadia Shah", "Conservative", "female", True, False, True, 12.0),
    ("d_rees", "Dylan Rees", "Plaid Cymru", "male", False, False, True, 8.0),
    ("e_barlow", "Emma Barlow", "Liberal Democrat", "female", False, False, True, 9.0),
    ("w_fraser", "William Fraser", "Scottish National Party", "male", False, False, True, 14.0),
]

_POLITICIAN_TEMPLATES = [
    "Proud to set out our plans for {t1} today.",
    "Great to meet local campaigners and talk about {t1} and {t2}.",
    "Our record on {t1} speaks for itself #GE2017",
    "Out on the doorstep this morning, thank you to everyone who came along!",
    "We will never stop fighting for better {t1}.",
    "Tonight's debate: {t1}, {t2} and the future of our country.",
]
_SAFE_REPLIES = [
    "Thanks for standing up for {t1}",
    "What is your plan for {t1}?",
    "Good luck tomorrow!",
    "Totally agree with this.",
    "Will you vote to protect {t1}?",
    "Not convinced by this at all, sorry.",
    "See you at the hustings on Friday",
    "Great speech today #GE2017",
    "My family have voted for you for years #VoteLabour",
    "Please answer my email about {t1} and {t2}",
    "Fair point but what about {t1}?",
]
_ABUSIVE_REPLIES = [
    "You are a {a}",
    "{a} #GE2017",
    "What a {a}, your {t1} plans are a joke",
    "Another lie from a {a}",
    "Mass immigration is ruining schools, you {a}.",
    "Nobody believes a word about {t1}, {a}",
    "#killthewitch",
    "go die",
    "absolute {a} as usual",
]
_SAFE_POSTS = [
    "Reading about {t1} again this morning",
    "Long thread on {t1} and {t2}, worth a look",
    "Why does nobody talk about {t1}?",
    "{t1} {t1} {t1}, it is all anyone cares about",
    "Watching the news tonight, mostly {t1}",
]


def _stamp(rng: random.Random) -> datetime:
    return _START + timedelta(seconds=rng.randrange(int(_SPAN.total_seconds())))


class _Builder:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        data = resources.files("mpabuse").joinpath("data")
        self.abuse_terms = [t for t in read_abuse_terms(Path(str(data.joinpath("demo_abuse.csv"))))
                            if len(t.tokens) == 1]
        topic_terms = read_topic_terms(Path(str(data.joinpath("demo_topics.csv"))))
        self.topics: dict[str, list[str]] = {}
        for t in topic_terms:
            self.topics.setdefault(t.topic, []).append(t.surface)
        self.topic_names = sorted(self.topics)
        self._abuse_words = {t.surface for t in self.abuse_terms}
        self.tweets: list[Tweet] = []
        self.truth: dict[int, bool] = {}
        self._next_id = 850_000_000_000_000_000

    def topic_term(self, topic: str | None = None) -> str:
        topic = topic or self.rng.choice(self.topic_names)
        return self.rng.choice(self.topics[topic])

    def fill(self, template: str, favourite: str | None = None) -> str:
        t1 = self.topic_term(favourite)
        t2 = self.topic_term()
        insult = self.rng.choice([t.surface for t in self.abuse_terms
                                  if t.category in ("insult", "obscene")])
        return template.format(t1=t1, t2=t2, a=insult)

    def add(self, author: str, text: str, abusive: bool, reply_to: str | None = None,
            reply_tweet: int | None = None, retweet: bool = False) -> Tweet:
        if not abusive:
            words = set(text.lower().replace("#", " ").replace("?", " ").replace(",", " ")
                        .replace(".", " ").replace("!", " ").split())
            clash = words & self._abuse_words
            assert not clash, f"ordinary text {text!r} contains abuse terms {clash}"
        self._next_id += self.rng.randrange(1, 5000)
        tweet = Tweet(self._next_id, author, text, _stamp(self.rng), reply_to, reply_tweet, retweet)
        self.tweets.append(tweet)
        self.truth[tweet.id] = abusive
        return tweet


def build_demo(seed: int = DEMO_SEED):
    """Return (tweets, roster rows, account rows, truth) for the demo corpus."""
    b = _Builder(seed)
    rng = b.rng
    handles = [p[0] for p in POLITICIANS]
    own: dict[str, list[Tweet]] = {h: [] for h in handles}
    for h in handles:
        for _ in range(10):
            own[h].append(b.add(h, b.fill(rng.choice(_POLITICIAN_TEMPLATES)), False))

    def reply(author: str, target: str, abusive: bool, favourite: str | None = None) -> None:
        pool = _ABUSIVE_REPLIES if abusive else _SAFE_REPLIES
        parent = rng.choice(own[target])
        b.add(author, b.fill(rng.choice(pool), favourite), abusive, target, parent.id)

    # Prominent politicians draw most of the attention.
    weights = [40 if i < 3 else (12 if i < 14 else 3) for i in range(len(handles))]
    accounts: list[dict] = []

    def account(acct: str, young: bool, closed_rate: float) -> None:
        age = rng.randint(30, 1300) if young else rng.randint(200, 3400)
        created = _START + _SPAN - timedelta(days=age, hours=rng.randint(0, 23))
        scale = 0.4 if young else 1.0
        accounts.append({
            "account_id": acct,
            "account_created_at": created.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "favourites": int(rng.lognormvariate(8.5, 1.2) * scale),
            "followers": int(rng.lognormvariate(6.0, 1.5) * scale),
            "following": int(rng.lognormvariate(6.2, 1.0) * scale),
            "listed": int(rng.lognormvariate(2.0, 1.2) * scale),
            "posts": int(rng.lognormvariate(9.0, 1.1) * scale),
            "is_closed": "true" if rng.random() < closed_rate else "false",
        })

    plans = []
    for i in range(20):
        r = 1 if i < 14 else 2
        plans.append((f"abuser_t{i:02d}", _targeted_plan(rng, r), True))
    for i in range(20):
        r = rng.randint(3, 6)
        a = r if i % 2 == 0 else r + 1
        plans.append((f"abuser_b{i:02d}", (a, r), False))
    for i in range(20):
        r = rng.randint(2, 4)
        plans.append((f"abuser_r{i:02d}", (2 * r - 1, r), False))
    for acct, (a, r), young in plans:
        targets = rng.sample(handles, r)
        sequence = targets + [rng.choice(targets[:2]) for _ in range(a - r)]
        favourite = rng.choice(b.topic_names)
        for target in sequence:
            reply(acct, target, True, favourite)
        for _ in range(6):
            b.add(acct, b.fill(rng.choice(_SAFE_POSTS), favourite), False)
        account(acct, young, 0.15 if young else 0.06)
    for i in range(10):
        acct = f"occasional_{i:02d}"
        for _ in range(rng.randint(1, 2)):
            reply(acct, rng.choices(handles, weights)[0], True)
        account(acct, False, 0.04)
    regulars = [f"user_{i:03d}" for i in range(240)]
    for acct in regulars:
        account(acct, False, 0.02)
    for _ in range(1150):
        reply(rng.choice(regulars), rng.choices(handles, weights)[0], False)
    for _ in range(50):
        h = rng.choice(handles)
        src = rng.choice(own[h])
        b.add(rng.choice(regulars), src.text, False, retweet=True)
    roster = [{"handle": "@" + h, "name": name, "party": party, "gender": gender,
               "bame": str(bame).lower(), "is_mp": str(mp).lower(),
               "is_candidate": str(cand).lower(), "prominence": prom}
              for h, name, party, gender, bame, mp, cand, prom in POLITICIANS]
    return b.tweets, roster, accounts, b.truth


def _targeted_plan(rng: random.Random, r: int) -> tuple[int, int]:
    # Always a > 2r - 1.
    return (rng.randint(3, 8) if r == 1 else rng.randint(4, 9), r)


def write_demo_corpus(out_dir: str | Path, seed: int = DEMO_SEED) -> dict[str, Path]:
    """Write tweets.jsonl, roster.csv, accounts.csv and truth.csv into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tweets, roster, accounts, truth = build_demo(seed)
    paths = {name: out / fname for name, fname in (
        ("tweets", "tweets.jsonl"), ("roster", "roster.csv"),
        ("accounts", "accounts.csv"), ("truth", "truth.csv"))}
    write_tweets(paths["tweets"], tweets)
    _write_csv(paths["roster"], roster)
    _write_csv(paths["accounts"], accounts)
    _write_csv(paths["truth"], [{"tweet_id": k, "abusive": int(v)} for k, v in truth.items()])
    return paths


def _write_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def demo_dir() -> Path:
    """Directory of the bundled, pre-generated demo corpus."""
    return Path(str(resources.files("mpabuse").joinpath("data/demo")))
