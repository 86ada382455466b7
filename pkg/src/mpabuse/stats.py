"""Significance tests, classifier evaluation and k-means topic clustering.

All p-values are two-sided.  Student-t tails come from
``scipy.special.stdtr``; the chi-square tail with one degree of freedom
is ``erfc(sqrt(x / 2))``; Fisher's exact test is evaluated with exact
integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np
from scipy.special import stdtr

from .errors import DegenerateError

DEFAULT_SEED = 2017
_COLLINEAR = 1e-12


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    statistic: float
    p_value: float
    method: str
    df: float | None = None
    n1: int | None = None
    n2: int | None = None

    def as_dict(self) -> dict:
        return {"method": self.method, "statistic": self.statistic, "p_value": self.p_value,
                "df": self.df, "n1": self.n1, "n2": self.n2}


def _t_two_sided(t: float, df: float) -> float:
    if math.isinf(t):
        return 0.0
    return float(min(1.0, max(0.0, 2.0 * stdtr(df, -abs(t)))))


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> TestResult:
    """Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError(f"each sample needs at least 2 values (got {na} and {nb})")
    ma, mb = a.mean(), b.mean()
    va, vb = a.var(ddof=1), b.var(ddof=1)
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    method = "welch t-test"
    if se2 == 0:
        if ma == mb:
            return TestResult(0.0, 1.0, method, None, na, nb)
        raise ValueError("both samples have zero variance and different means")
    t = float((ma - mb) / math.sqrt(se2))
    df = float(se2**2 / (sa**2 / (na - 1) + sb**2 / (nb - 1)))
    return TestResult(t, _t_two_sided(t, df), method, df, na, nb)


def _pearson(u: np.ndarray, v: np.ndarray) -> float:
    du, dv = u - u.mean(), v - v.mean()
    return float(np.dot(du, dv) / math.sqrt(np.dot(du, du) * np.dot(dv, dv)))


def partial_correlation(x: Sequence[float], y: Sequence[float],
                        control: Sequence[float]) -> TestResult:
    """First-order partial Pearson correlation of ``x`` and ``y`` given ``control``.

    When one of ``x``/``y`` is an exact linear function of the control,
    the control absorbs it and the partial correlation is reported as 0.
    """
    xs, ys, zs = (np.asarray(v, dtype=float) for v in (x, y, control))
    n = len(xs)
    if not (len(ys) == n == len(zs)):
        raise ValueError("samples must have equal length")
    if n < 4:
        raise ValueError("partial correlation needs at least 4 observations")
    for name, v in (("x", xs), ("y", ys), ("control", zs)):
        if np.all(v == v[0]):
            raise DegenerateError(f"{name} is constant")
    r_xy, r_xz, r_yz = _pearson(xs, ys), _pearson(xs, zs), _pearson(ys, zs)
    x_absorbed = abs(r_xz) >= 1 - _COLLINEAR
    y_absorbed = abs(r_yz) >= 1 - _COLLINEAR
    df = n - 3
    if x_absorbed and y_absorbed:
        raise DegenerateError("x and y are both collinear with the control")
    if x_absorbed or y_absorbed:
        return TestResult(0.0, 1.0, "partial pearson (absorbed by control)", df, n)
    r = (r_xy - r_xz * r_yz) / math.sqrt((1 - r_xz**2) * (1 - r_yz**2))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return TestResult(r, 0.0, "partial pearson", df, n)
    t = r * math.sqrt(df / (1 - r * r))
    return TestResult(r, _t_two_sided(t, df), "partial pearson", df, n)


def _table(table) -> tuple[int, int, int, int]:
    cells = np.asarray(table).reshape(-1)
    if cells.size != 4:
        raise ValueError("expected a 2x2 table")
    out = []
    for c in cells:
        if c < 0 or c != int(c):
            raise ValueError(f"table cells must be non-negative integers, got {c}")
        out.append(int(c))
    return out[0], out[1], out[2], out[3]


def chi_square_yates(table) -> TestResult:
    """Pearson chi-square on a 2x2 table with Yates' continuity correction."""
    a, b, c, d = _table(table)
    rows, cols = (a + b, c + d), (a + c, b + d)
    n = a + b + c + d
    if 0 in rows or 0 in cols:
        raise ValueError("chi-square needs non-zero row and column margins")
    stat = 0.0
    for i, j, obs in ((0, 0, a), (0, 1, b), (1, 0, c), (1, 1, d)):
        expected = rows[i] * cols[j] / n
        dev = max(0.0, abs(obs - expected) - 0.5)
        stat += dev * dev / expected
    p = math.erfc(math.sqrt(stat / 2.0))
    return TestResult(stat, min(1.0, p), "chi-square (yates)", 1.0, rows[0], rows[1])


def fisher_exact_2x2(table) -> TestResult:
    """Two-sided Fisher exact test; ``statistic`` is the sample odds ratio.

    Sums the hypergeometric probabilities of every table with the same
    margins that is no more probable than the observed one.  Weights are
    exact integers, so ties are compared exactly.
    """
    a, b, c, d = _table(table)
    r1, r2, c1 = a + b, c + d, a + c
    n = r1 + r2
    if b * c == 0:
        odds = math.inf if a * d else math.nan
    else:
        odds = a * d / (b * c)
    lo, hi = max(0, c1 - r2), min(r1, c1)
    if lo == hi:
        return TestResult(odds, 1.0, "fisher exact", None, r1, r2)
    weights = []
    w = math.comb(r1, lo) * math.comb(r2, c1 - lo)
    for x in range(lo, hi + 1):
        weights.append(w)
        # C(r1,x+1)C(r2,c1-x-1) from C(r1,x)C(r2,c1-x); division is exact.
        w = w * (r1 - x) * (c1 - x) // ((x + 1) * (r2 - c1 + x + 1)) if x < hi else 0
    observed = weights[a - lo]
    extreme = sum(wt for wt in weights if wt <= observed)
    p = Fraction(extreme, math.comb(n, c1))
    return TestResult(odds, float(min(p, Fraction(1))), "fisher exact", None, r1, r2)


@dataclass(frozen=True)
class ClassifierEval:
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    kappa: float
    flags: tuple[str, ...] = ()

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
                "accuracy": self.accuracy, "precision": self.precision, "recall": self.recall,
                "f1": self.f1, "kappa": self.kappa, "flags": list(self.flags)}


def confusion_metrics(tp: int, fp: int, tn: int, fn: int) -> ClassifierEval:
    """All five metrics from confusion counts; undefined ratios become 0 and are flagged."""
    n = tp + fp + tn + fn
    if n <= 0:
        raise ValueError("empty confusion matrix")
    flags = []
    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        flags.append("precision_undefined")
    if tp + fn:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        flags.append("recall_undefined")
    f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    accuracy = (tp + tn) / n
    p_e = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n)
    if p_e == 1:
        kappa = 0.0
        flags.append("kappa_degenerate")
    else:
        kappa = (accuracy - p_e) / (1 - p_e)
    return ClassifierEval(tp, fp, tn, fn, accuracy, precision, recall, f1, kappa, tuple(flags))


def evaluate_classifier(predictions: Sequence[bool], gold: Sequence[bool]) -> ClassifierEval:
    if len(predictions) != len(gold):
        raise ValueError("predictions and gold differ in length")
    if not gold:
        raise ValueError("nothing to evaluate")
    tp = fp = tn = fn = 0
    for p, g in zip(predictions, gold):
        if p and g:
            tp += 1
        elif p:
            fp += 1
        elif g:
            fn += 1
        else:
            tn += 1
    return confusion_metrics(tp, fp, tn, fn)


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray
    labels: np.ndarray
    centroid_topic_cosines: np.ndarray
    objective_history: list[float]
    iterations: int
    converged: bool
    seed: int
    ids: list[Hashable] | None = field(default=None, repr=False)

    @property
    def assignments(self) -> dict:
        keys = self.ids if self.ids is not None else range(len(self.labels))
        return {key: int(lab) for key, lab in zip(keys, self.labels)}

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.k).tolist()

    def describe(self, taxonomy: Sequence[str], min_cosine: float = 0.2) -> list[dict]:
        """Per cluster: size and the topic axes it leans towards, strongest first."""
        out = []
        for j in range(self.k):
            cos = self.centroid_topic_cosines[j]
            order = sorted(range(len(taxonomy)), key=lambda i: (-cos[i], i))
            out.append({
                "cluster": j,
                "size": int(np.sum(self.labels == j)),
                "topics": [[taxonomy[i], round(float(cos[i]), 2)] for i in order if cos[i] >= min_cosine],
            })
        return out


def axis_cosines(centroids: np.ndarray) -> np.ndarray:
    """Cosine of each centroid with every coordinate axis (rows of zeros stay zero)."""
    c = np.atleast_2d(np.asarray(centroids, dtype=float))
    norms = np.linalg.norm(c, axis=1, keepdims=True)
    return np.divide(c, norms, out=np.zeros_like(c), where=norms > 0)


def _sq_dists(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def kmeans(vectors, k: int = 8, seed: int = DEFAULT_SEED, max_iter: int = 300,
           ids: Sequence[Hashable] | None = None) -> ClusterModel:
    """Lloyd's k-means with k-means++ seeding from a seeded generator.

    Runs until the assignment stops changing or ``max_iter`` updates.  A
    point only changes cluster when another centroid is strictly closer,
    which keeps the recorded objective non-increasing.  A centroid left
    empty is moved onto the point farthest from its own centroid.
    """
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2:
        raise ValueError("vectors must form a 2-D array")
    if k < 1:
        raise ValueError("k must be positive")
    if len(np.unique(x, axis=0)) < k:
        raise ValueError(f"need at least {k} distinct vectors")
    if ids is not None and len(ids) != len(x):
        raise ValueError("ids and vectors differ in length")
    rng = np.random.default_rng(seed)
    centroids = _plusplus(x, k, rng)
    d = _sq_dists(x, centroids)
    labels = d.argmin(axis=1)
    rows = np.arange(len(x))
    history = [float(d[rows, labels].sum())]
    converged = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        new_c = centroids.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new_c[j] = x[members].mean(axis=0)
        own = ((x - new_c[labels]) ** 2).sum(axis=1)
        for j in range(k):
            if not np.any(labels == j):
                far = int(np.argmax(own))
                new_c[j] = x[far]
                own[far] = 0.0
        d = _sq_dists(x, new_c)
        best = d.argmin(axis=1)
        keep = d[rows, labels] <= d[rows, best]
        new_labels = np.where(keep, labels, best)
        centroids = new_c
        history.append(float(d[rows, new_labels].sum()))
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
    return ClusterModel(
        k=k,
        centroids=centroids,
        labels=labels,
        centroid_topic_cosines=axis_cosines(centroids),
        objective_history=history,
        iterations=iterations,
        converged=converged,
        seed=seed,
        ids=list(ids) if ids is not None else None,
    )
