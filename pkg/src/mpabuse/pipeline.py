"""Run configuration and the staged analysis pipeline.

Stages run in a fixed order (ingest, annotate, profile, abusers,
topics, cluster); each one adds report files to an in-memory bundle.
The bundle is written to a scratch directory and only moved into the
output directory once every stage has succeeded, together with a
manifest of SHA-256 digests.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import metrics
from .annotate import (ANNOTATION_FIELDS, Annotation, AnnotationSummary, Annotator,
                       annotate_corpus, annotation_row)
from .corpus import AccountStats, Corpus, IngestResult, Window, load_corpus
from .errors import DataError, DegenerateError
from .lexicon import CompiledLexicon, load_lexicon
from .segment import SegmentationDict
from .stats import (DEFAULT_SEED, ClusterModel, TestResult, chi_square_yates, fisher_exact_2x2,
                    kmeans, partial_correlation, welch_t_test)

log = logging.getLogger(__name__)

STAGES = ("ingest", "annotate", "profile", "abusers", "topics", "cluster")
MANIFEST = "manifest.json"


@dataclass
class RunConfig:
    tweets: Path
    roster: Path
    abuse_lexicon: Path | None = None
    topic_lexicon: Path | None = None
    accounts: Path | None = None
    wordlist: Path | None = None
    window_start: str = ""
    window_end: str = ""
    min_abusive: int = 3
    min_topic_abusive: int = 50
    k: int = 8
    seed: int = DEFAULT_SEED
    exclude_handles: tuple[str, ...] = ()
    out: Path = Path("out")
    year: str | None = None
    workers: int = 1

    def window(self) -> Window:
        try:
            return Window.parse(self.window_start, self.window_end)
        except (TypeError, ValueError) as exc:
            raise DataError(f"bad collection window {self.window_start!r} .. {self.window_end!r}: {exc}") from exc

    def check_paths(self, stages: Iterable[str]) -> None:
        """Every input the requested stages need must exist before anything runs."""
        needed = {"tweets": self.tweets, "roster": self.roster, "accounts": self.accounts,
                  "wordlist": self.wordlist}
        if set(stages) - {"ingest"}:
            needed["abuse_lexicon"] = self.abuse_lexicon
            needed["topic_lexicon"] = self.topic_lexicon
            if self.abuse_lexicon is None:
                raise DataError("an abuse lexicon is required")
        for name, path in needed.items():
            if path is not None and not Path(path).is_file():
                raise DataError(f"{name.replace('_', '-')} file not found: {path}")
        if self.k < 1 or self.min_abusive < 1:
            raise DataError("k and min-abusive must be positive")

    def describe(self) -> dict:
        """Parameters and input digests (no paths) for the manifest."""
        inputs = {}
        for name in ("tweets", "roster", "accounts", "abuse_lexicon", "topic_lexicon", "wordlist"):
            path = getattr(self, name)
            if path is not None:
                inputs[name] = _sha256(Path(path).read_bytes())
        return {"window": [self.window_start, self.window_end], "min_abusive": self.min_abusive,
                "min_topic_abusive": self.min_topic_abusive, "k": self.k, "seed": self.seed,
                "exclude_handles": list(self.exclude_handles), "year": self.year,
                "inputs": inputs}


@dataclass
class RunState:
    config: RunConfig
    corpus: Corpus | None = None
    ingest: IngestResult | None = None
    lexicon: CompiledLexicon | None = None
    annotator: Annotator | None = None
    annotations: list[Annotation] = field(default_factory=list)
    summary: AnnotationSummary | None = None
    politicians: list[metrics.PoliticianProfile] = field(default_factory=list)
    abusers: list[metrics.AbuserProfile] = field(default_factory=list)
    topic_rates: metrics.TopicRates | None = None
    clusters: ClusterModel | None = None
    files: dict[str, bytes] = field(default_factory=dict)

    def add_csv(self, name: str, rows: Sequence[dict], fieldnames: Sequence[str]) -> None:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        self.files[name] = buf.getvalue().encode("utf-8")

    def add_json(self, name: str, obj) -> None:
        text = json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
        self.files[name] = (text + "\n").encode("utf-8")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, TestResult):
        return _jsonable(obj.as_dict())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _year(cfg: RunConfig) -> str:
    return cfg.year or cfg.window_start[:4]


def stage_ingest(state: RunState) -> None:
    cfg = state.config
    window = cfg.window()
    state.corpus, state.ingest = load_corpus(cfg.tweets, cfg.roster, window, cfg.accounts)
    corpus = state.corpus
    state.add_json("corpus_summary.json", {
        "ingest": state.ingest.counters(),
        "tweets": len(corpus),
        "retweets": sum(t.is_retweet for t in corpus.tweets),
        "politicians": len(corpus.roster),
        "mps": sum(p.is_mp for p in corpus.roster),
        "candidates": sum(p.is_candidate for p in corpus.roster),
        "mps_and_candidates": sum(p.is_mp and p.is_candidate for p in corpus.roster),
        "accounts_with_stats": len(corpus.accounts),
    })


def stage_annotate(state: RunState) -> None:
    cfg = state.config
    state.lexicon = load_lexicon(cfg.abuse_lexicon, cfg.topic_lexicon)
    wordlist = SegmentationDict.from_file(cfg.wordlist) if cfg.wordlist else None
    state.annotator = Annotator(state.lexicon, wordlist)
    state.annotations, state.summary = annotate_corpus(state.annotator, state.corpus, workers=cfg.workers)
    state.add_csv("annotations.csv", [annotation_row(a) for a in state.annotations],
                  ANNOTATION_FIELDS)
    state.add_json("annotation_summary.json", state.summary.as_dict())


def _two_sample(a: Sequence[float], b: Sequence[float], labels: tuple[str, str]) -> dict:
    entry = {"groups": list(labels), "n": [len(a), len(b)],
             "mean": [float(np.mean(a)) if len(a) else None, float(np.mean(b)) if len(b) else None],
             "sd": [float(np.std(a, ddof=1)) if len(a) > 1 else None,
                    float(np.std(b, ddof=1)) if len(b) > 1 else None]}
    try:
        entry["test"] = welch_t_test(a, b)
    except ValueError as exc:
        entry["skipped"] = str(exc)
    return entry


def politician_comparisons(profiles: Sequence[metrics.PoliticianProfile]) -> dict:
    """Gender, party and ethnicity comparisons of per-MP abuse proportions."""
    mps = [p for p in profiles if p.is_mp]

    def prop(selector) -> list[float]:
        return [p.abuse_proportion for p in mps if selector(p)]

    return {
        "gender": _two_sample(prop(lambda p: p.gender == "male"),
                              prop(lambda p: p.gender == "female"), ("male", "female")),
        "party": _two_sample(prop(lambda p: p.party.lower() == "conservative"),
                             prop(lambda p: p.party.lower() == "labour"), ("Conservative", "Labour")),
        "bame": _two_sample(prop(lambda p: p.bame is True),
                            prop(lambda p: p.bame is False), ("bame", "non-bame")),
    }


def stage_profile(state: RunState) -> None:
    cfg = state.config
    state.politicians = metrics.politician_profiles(state.annotations, state.corpus)
    exclude = list(cfg.exclude_handles) or metrics.heavy_receivers(state.politicians)
    trimmed = metrics.politician_profiles(state.annotations, state.corpus, exclude)
    removed = sorted({p.handle for p in state.politicians} - {p.handle for p in trimmed})
    fields = list(state.politicians[0].as_row()) if state.politicians else ["handle"]
    state.add_csv("politician_profiles.csv", [p.as_row() for p in state.politicians], fields)
    state.add_csv("sunburst.csv", metrics.sunburst_rows(state.politicians),
                  ["handle", "party", "gender", "abusive_replies", "abuse_proportion", "band"])
    state.add_csv("rise.csv", metrics.rise_rows(state.politicians, _year(cfg)),
                  ["year", "party", "gender", "mps", "replies", "abusive_replies", "proportion",
                   "mean_mp_proportion"])
    state.add_csv("feature_matrix.csv", metrics.feature_matrix(state.politicians),
                  ["handle", "abuse", "tweets_received", "tweets_sent", "prominence", "female",
                   "party", "bame"])
    state.add_json("politician_tests.json", {
        "all": politician_comparisons(state.politicians),
        "outliers_removed": removed,
        "without_outliers": politician_comparisons(trimmed),
    })


def account_comparisons(abusers: Sequence[AccountStats], control: Sequence[AccountStats]) -> dict:
    out = {}
    for name in AccountStats.STAT_FIELDS:
        out[name] = _two_sample([getattr(s, name) for s in abusers],
                                [getattr(s, name) for s in control], ("abusive", "control"))
    return out


def stage_abusers(state: RunState) -> None:
    cfg = state.config
    corpus = state.corpus
    state.abusers = metrics.classify_abusers(state.annotations, corpus, state.lexicon.taxonomy,
                                             min_abusive=cfg.min_abusive)
    fields = ["account_id", "abusive_count", "recipients", "targetedness", "group",
              *AccountStats.STAT_FIELDS, "is_closed"]
    state.add_csv("abusers.csv", [p.as_row() for p in state.abusers], fields)
    state.add_json("abuser_groups.json", metrics.group_summary(state.abusers))

    with_stats = [p for p in state.abusers if p.stats is not None]
    abuser_stats = [p.stats for p in with_stats]
    control = metrics.control_sample(state.annotations, corpus, len(abuser_stats), cfg.seed)
    tests: dict = {"control_size": len(control), "control_seed": cfg.seed,
                   "all_abusers": account_comparisons(abuser_stats, control)}
    for group in metrics.GROUPS:
        tests[group] = account_comparisons([p.stats for p in with_stats if p.group == group], control)

    counts = [p.abusive_count for p in with_stats] + [0] * len(control)
    pooled = abuser_stats + control
    partial = {}
    for name in ("favourites", "followers", "following", "listed", "posts"):
        try:
            partial[name] = partial_correlation(counts, [getattr(s, name) for s in pooled],
                                                [s.age_days for s in pooled])
        except (ValueError, DegenerateError) as exc:
            partial[name] = {"skipped": str(exc)}
    tests["abusive_count_partial_on_age"] = partial

    closed = [[sum(s.is_closed for s in abuser_stats), sum(not s.is_closed for s in abuser_stats)],
              [sum(s.is_closed for s in control), sum(not s.is_closed for s in control)]]
    tests["closed_accounts"] = {"table": closed, "test": fisher_exact_2x2(closed)}
    state.add_json("account_tests.json", tests)

    groups = {g: [p.stats for p in with_stats if p.group == g] for g in metrics.GROUPS}
    groups["control"] = control
    state.add_csv("account_age_timeline.csv",
                  metrics.age_timeline({g: s for g, s in groups.items() if s}),
                  ["group", "age_years", "accounts", "percent"])


def topic_rate_tests(rates: metrics.TopicRates) -> dict:
    """Each topic's abusive-reply rate against the rest, chi-square with Yates."""
    total_ab = sum(r.abusive_replies for r in rates.rates)
    total_m = sum(r.mentions for r in rates.rates)
    out = {}
    for r in rates.rates:
        table = [[r.abusive_replies, r.mentions], [total_ab - r.abusive_replies, total_m - r.mentions]]
        try:
            out[r.topic] = {"table": table, "test": chi_square_yates(table)}
        except ValueError as exc:
            out[r.topic] = {"table": table, "skipped": str(exc)}
    return out


def stage_topics(state: RunState) -> None:
    cfg = state.config
    taxonomy = state.lexicon.taxonomy
    state.topic_rates = rates = metrics.topic_abuse_rates(
        state.annotations, state.corpus, taxonomy, min_abusive=cfg.min_topic_abusive)
    rows = [{"topic": r.topic, "mentions": r.mentions, "abusive_replies": r.abusive_replies,
             "rate": f"{r.rate:.6f}", "below_minimum": int(r.below_minimum)} for r in rates.rates]
    state.add_csv("topic_rates.csv", rows, ["topic", "mentions", "abusive_replies", "rate",
                                            "below_minimum"])
    state.add_json("topic_tests.json", {"pooled_rate": rates.pooled_rate, "mean_rate": rates.mean_rate,
                                        "min_abusive": rates.min_abusive,
                                        "tests": topic_rate_tests(rates)})
    state.add_csv("topic_bars.csv", metrics.topic_mention_counts(state.annotations, taxonomy),
                  ["topic", "abusive_reply_mentions", "all_tweet_mentions"])


def stage_cluster(state: RunState) -> None:
    cfg = state.config
    taxonomy = state.lexicon.taxonomy
    if not state.abusers:
        raise DataError("no abusive accounts to cluster")
    vectors = np.array([p.topic_vector for p in state.abusers])
    try:
        model = kmeans(vectors, k=cfg.k, seed=cfg.seed, ids=[p.account_id for p in state.abusers])
    except ValueError as exc:
        raise DataError(f"clustering failed: {exc} (try a smaller --k)") from exc
    state.clusters = model
    state.add_json("clusters.json", {
        "k": model.k, "seed": model.seed, "iterations": model.iterations,
        "converged": model.converged, "objective_history": model.objective_history,
        "taxonomy": list(taxonomy),
        "centroids": model.centroids.tolist(),
        "centroid_topic_cosines": model.centroid_topic_cosines.tolist(),
        "clusters": model.describe(taxonomy),
        "assignments": model.assignments,
    })


_STAGE_FUNCS = {"ingest": stage_ingest, "annotate": stage_annotate, "profile": stage_profile,
                "abusers": stage_abusers, "topics": stage_topics, "cluster": stage_cluster}
_REQUIRES = {"ingest": (), "annotate": ("ingest",), "profile": ("ingest", "annotate"),
             "abusers": ("ingest", "annotate"), "topics": ("ingest", "annotate"),
             "cluster": ("ingest", "annotate", "abusers")}


def run_stages(config: RunConfig, stages: Iterable[str] = STAGES) -> RunState:
    """Run the requested stages (plus prerequisites) in memory."""
    wanted = set()
    for s in stages:
        if s not in _STAGE_FUNCS:
            raise ValueError(f"unknown stage {s!r}")
        wanted.add(s)
        wanted.update(_REQUIRES[s])
    config.check_paths(wanted)
    state = RunState(config)
    for s in STAGES:
        if s in wanted:
            log.info("stage %s", s)
            _STAGE_FUNCS[s](state)
    return state


def write_bundle(state: RunState, out: Path) -> dict:
    """Atomically place the report files and their manifest in ``out``."""
    out = Path(out)
    manifest = {"files": {name: _sha256(data) for name, data in sorted(state.files.items())},
                "config": state.config.describe()}
    out.parent.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=".mpabuse-", dir=out.parent))
    try:
        for name, data in state.files.items():
            (scratch / name).write_bytes(data)
        (scratch / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")
        out.mkdir(exist_ok=True)
        for entry in sorted(os.listdir(scratch)):
            os.replace(scratch / entry, out / entry)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
    return manifest


def run_pipeline(config: RunConfig, stages: Iterable[str] = STAGES) -> dict:
    """Run stages and write the bundle; nothing is written if any stage fails."""
    state = run_stages(config, stages)
    return write_bundle(state, config.out)


def verify_manifest(out: Path) -> list[str]:
    """Names of files whose digest no longer matches the manifest (missing files included)."""
    out = Path(out)
    try:
        manifest = json.loads((out / MANIFEST).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read manifest in {out}: {exc}") from exc
    bad = []
    for name, digest in manifest["files"].items():
        path = out / name
        if not path.is_file() or _sha256(path.read_bytes()) != digest:
            bad.append(name)
    return bad
