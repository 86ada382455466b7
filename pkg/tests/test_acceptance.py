"""Exit criteria, one test each, with a PASS/FAIL line per criterion."""

from __future__ import annotations

import contextlib
import csv
import json
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from mpabuse.annotate import Annotator
from mpabuse.cli import main
from mpabuse.demo import demo_dir
from mpabuse.lexicon import AbuseTerm, TokenAutomaton, TopicTerm, compile_lexicon, load_demo_lexicon
from mpabuse.metrics import GROUPS, abuser_group, targetedness
from mpabuse.segment import SegmentationDict, segment_hashtag, tokenize
from mpabuse.stats import (axis_cosines, chi_square_yates, confusion_metrics, evaluate_classifier,
                           fisher_exact_2x2, kmeans, partial_correlation, welch_t_test)

from demo_oracle import hand_count
from oracles import (best_segmentation, brute_force_matches, fisher_reference, residual_partial_r,
                     welch_reference, yates_reference)

pytestmark = pytest.mark.acceptance


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number: int, title: str, budget: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            with capsys.disabled():
                print(f"\nCRITERION {number} {'PASS' if ok else 'FAIL'}: {title} ({elapsed:.2f}s)")
    return run


def test_c1_targetedness(criterion):
    with criterion(1, "targetedness values, monotonicity, group partition", 1.0):
        assert targetedness(1, 1) == 1
        assert targetedness(28, 1) == 28
        assert targetedness(5, 5) == Fraction(5, 9)
        for a in range(1, 51):
            for r in range(1, a + 1):
                t = targetedness(a, r)
                assert isinstance(t, Fraction)
                if a < 50:
                    assert targetedness(a + 1, r) > t
                if r < a:
                    assert targetedness(a, r + 1) < t
        rng = random.Random(1)
        seen = dict.fromkeys(GROUPS, 0)
        for _ in range(1000):
            a = rng.randint(1, 200)
            r = rng.randint(1, a)
            t = targetedness(a, r)
            members = [t > 1, t < 1, t == 1]
            assert sum(members) == 1
            assert abuser_group(a, r) == GROUPS[members.index(True)]
            seen[abuser_group(a, r)] += 1
        assert sum(seen.values()) == 1000


def test_c2_matcher_oracle(criterion):
    with criterion(2, "automaton match set equals brute-force scan on 200 cases", 5.0):
        rng = random.Random(2)
        vocab = [f"t{i}" for i in range(6)]
        for _ in range(200):
            terms = list({tuple(rng.choice(vocab) for _ in range(rng.randint(1, 4)))
                          for _ in range(rng.randint(1, 20))})
            tokens = [rng.choice(vocab) for _ in range(rng.randint(0, 60))]
            assert set(TokenAutomaton(terms).search(tokens)) == brute_force_matches(terms, tokens)


def test_c3_hashtag_segmentation(criterion):
    with criterion(3, "hashtag segmentation example, DP optimum, concatenation", 5.0):
        d = SegmentationDict(["kill", "the", "witch"])
        assert tokenize("#killthewitch", d).surfaces == ["killthewitch", "kill", "the", "witch"]
        rng = random.Random(3)
        for _ in range(100):
            words = {"".join(rng.choice("abc") for _ in range(rng.randint(1, 4))) for _ in range(8)}
            body = "".join(rng.choice("abc") for _ in range(rng.randint(1, 12)))
            got = segment_hashtag(body, SegmentationDict(words))
            assert got == best_segmentation(body, words)
            if got is not None:
                assert "".join(got) == body


def test_c4_annotation_fidelity(criterion):
    with criterion(4, "topic example and documented false positive", 2.0):
        ann = Annotator(load_demo_lexicon())
        abuse, topics = ann.scan("Mass immigration is ruining schools, you dick.")
        assert abuse
        counts = {}
        for hit in topics:
            counts[hit.topic] = counts.get(hit.topic, 0) + 1
        assert counts == {"borders and immigration": 1, "schools": 1}
        assert ann.is_abusive("working his balls off to get his arse into Downing Street")


def test_c5_statistics_oracles(criterion):
    with criterion(5, "Welch, partial r, Yates, Fisher against independent oracles", 10.0):
        rng = random.Random(5)
        nrng = np.random.default_rng(5)
        for _ in range(20):
            a = [rng.randint(0, 30) for _ in range(rng.randint(2, 15))]
            b = [rng.randint(0, 30) for _ in range(rng.randint(2, 15))]
            if len(set(a)) == 1 and len(set(b)) == 1:
                continue
            t, df, p = welch_reference(a, b)
            r = welch_t_test(a, b)
            assert abs(r.statistic - t) <= 1e-9 * max(1.0, abs(t))
            assert abs(r.p_value - p) <= 1e-9
        for _ in range(20):
            n = int(nrng.integers(5, 40))
            z = nrng.normal(size=n)
            x = z + nrng.normal(size=n)
            y = x - z + nrng.normal(size=n)
            assert abs(partial_correlation(x, y, z).statistic - residual_partial_r(x, y, z)) <= 1e-9
        for _ in range(20):
            table = [[rng.randint(0, 25), rng.randint(1, 25)], [rng.randint(1, 25), rng.randint(0, 25)]]
            stat, p = yates_reference(table)
            r = chi_square_yates(table)
            assert abs(r.statistic - stat) <= 1e-9 and abs(r.p_value - p) <= 1e-9
        for _ in range(100):
            cells = [rng.randint(0, 15) for _ in range(4)]
            table = [cells[:2], cells[2:]]
            assert abs(fisher_exact_2x2(table).p_value - fisher_reference(table)) <= 1e-9
        same = welch_t_test([1, 2, 3], [1, 2, 3])
        assert (same.statistic, same.p_value) == (0.0, 1.0)
        indep = chi_square_yates([[10, 10], [10, 10]])
        assert (indep.statistic, indep.p_value) == (0.0, 1.0)
        assert fisher_exact_2x2([[2, 8], [4, 16]]).p_value == 1.0
        absorbed = partial_correlation([1, 4, 2, 8, 5], [3, 1, 4, 1, 5], [3, 1, 4, 1, 5])
        assert (absorbed.statistic, absorbed.p_value) == (0.0, 1.0)


def test_c6_evaluation_harness(criterion):
    with criterion(6, "F1 from reverse-engineered matrix, kappa constructions", 1.0):
        ev = confusion_metrics(tp=45, fp=27, tn=237, fn=54)
        # Published rates are two-decimal roundings, so check against their intervals.
        assert 0.615 <= ev.precision <= 0.625 and 0.445 <= ev.recall <= 0.455
        assert abs(ev.f1 - 0.53) <= 0.005
        gold = [True, False] * 20
        assert evaluate_classifier(gold, gold).kappa == 1.0
        chance = [True] * 10 + [False] * 10 + [True] * 10 + [False] * 10
        assert evaluate_classifier(chance, [True] * 20 + [False] * 20).kappa == 0.0


def test_c7_kmeans(criterion):
    with criterion(7, "k-means recovery, monotone objective, determinism, cosines", 10.0):
        rng = np.random.default_rng(7)
        blobs = np.vstack([rng.normal((0, 0), 0.2, (25, 2)), rng.normal((8, 8), 0.2, (25, 2))])
        labels = kmeans(blobs, k=2, seed=0).labels
        assert len(set(labels[:25])) == 1 and len(set(labels[25:])) == 1 and labels[0] != labels[25]
        for run in range(20):
            x = rng.poisson(2.0, size=(100, 8)).astype(float)
            h = kmeans(x, k=6, seed=run).objective_history
            assert all(b <= a for a, b in zip(h, h[1:]))
        x = rng.poisson(2.0, size=(60, 5)).astype(float)
        m1, m2 = kmeans(x, k=4, seed=3), kmeans(x, k=4, seed=3)
        assert m1.centroids.tobytes() == m2.centroids.tobytes()
        assert m1.labels.tobytes() == m2.labels.tobytes()
        c = np.array([[0.85, 0.20, 0.0]])
        norm = (0.85 ** 2 + 0.20 ** 2) ** 0.5
        cos = axis_cosines(c)[0]
        assert abs(cos[0] - 0.85 / norm) <= 1e-12
        assert abs(cos[1] - 0.20 / norm) <= 1e-12
        assert cos[2] == 0.0


def test_c8_end_to_end(criterion, tmp_path):
    with criterion(8, "demo corpus run: reports, stable digests, hand-counted summary", 30.0):
        first, second = tmp_path / "first", tmp_path / "second"
        with contextlib.redirect_stdout(None):
            assert main(["run", "--demo", "--out", str(first)]) == 0
            assert main(["run", "--demo", "--out", str(second)]) == 0
        m1 = json.loads((first / "manifest.json").read_text())
        m2 = json.loads((second / "manifest.json").read_text())
        assert len(m1["files"]) == 16
        assert all((first / name).is_file() for name in m1["files"])
        assert m1 == m2
        oracle = hand_count(demo_dir())
        summary = json.loads((first / "annotation_summary.json").read_text())
        assert (summary["all_tweets"]["collected"], summary["all_tweets"]["hadabuse"]) == oracle["all"]
        rp, mp = summary["replies_to_politicians"], summary["replies_to_mps"]
        assert (rp["collected"], rp["hadabuse"]) == oracle["roster"]
        assert (mp["collected"], mp["hadabuse"]) == oracle["mps"]
        corpus = json.loads((first / "corpus_summary.json").read_text())
        assert corpus["politicians"] == 20 and 1500 <= corpus["tweets"] <= 2500
        with (first / "abusers.csv").open() as fh:
            abusers = list(csv.DictReader(fh))
        assert sum(r["account_id"].startswith("abuser_") for r in abusers) == 60
        with (first / "politician_profiles.csv").open() as fh:
            profiles = {r["handle"]: r for r in csv.DictReader(fh)}
        for handle, (n, a) in oracle["per_politician"].items():
            row = profiles[handle]
            assert (int(row["replies_received"]), int(row["abusive_replies"])) == (n, a)


def synthetic_stream(n_tweets: int, n_terms: int, seed: int):
    rng = random.Random(seed)
    common = sorted(SegmentationDict.bundled().wordlist)
    invented = [f"zq{i}" for i in range(3000)]
    terms: set[tuple[str, ...]] = set()
    while len(terms) < n_terms * 7 // 10:
        terms.add(tuple(rng.sample(invented, rng.choice([1, 1, 1, 2, 3]))))
    abuse = [AbuseTerm(" ".join(t), t, "insult") for t in sorted(terms)]
    topics = [TopicTerm(f"{w} {i}", (w, str(i)), f"topic {i % 51}")
              for i, w in enumerate(rng.sample(common, n_terms - len(abuse)))]
    vocab = common[:2000] + invented[:500]
    texts = []
    for i in range(n_tweets):
        toks = [rng.choice(vocab) for _ in range(rng.randint(5, 25))]
        if i % 7 == 0:
            toks.append("#" + "".join(rng.sample(common[:300], 3)))
        if i % 11 == 0:
            toks.insert(0, "@someone")
        if i % 13 == 0:
            toks.append("https://t.co/x1")
        texts.append(" ".join(toks))
    return compile_lexicon(abuse, topics), texts


def test_c9_throughput(criterion):
    lexicon, texts = synthetic_stream(100_000, 1000, seed=9)
    assert len(lexicon.abuse_terms) + len(lexicon.topic_terms) == 1000
    annotator = Annotator(lexicon)
    with criterion(9, "annotate 100,000 tweets with a 1,000-term lexicon", 60.0):
        flagged = sum(annotator.is_abusive(t) for t in texts)
        assert 0 < flagged < len(texts)
