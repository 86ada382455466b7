"""Topics that draw abuse, and what abusers talk about
===================================================

Abuse rate per topic counts abusive replies to politicians' tweets that
mention a topic, per mention.  Abusive accounts are then clustered on
their own topic mix, and each cluster is described by the topic axes
its centroid points towards.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from mpabuse.demo import WINDOW, demo_dir
from mpabuse.lexicon import demo_paths
from mpabuse.pipeline import RunConfig, run_stages
from mpabuse.stats import kmeans

d = demo_dir()
abuse_path, topic_path = demo_paths()
config = RunConfig(tweets=d / "tweets.jsonl", roster=d / "roster.csv", accounts=d / "accounts.csv",
                   abuse_lexicon=abuse_path, topic_lexicon=topic_path,
                   window_start=WINDOW[0], window_end=WINDOW[1], min_topic_abusive=20,
                   out=Path("unused"))
state = run_stages(config, ["topics", "abusers"])

rates = state.topic_rates
print(f"pooled rate: {rates.pooled_rate:.2f} abusive replies per topic mention")
for r in sorted(rates.rates, key=lambda r: -r.rate):
    flag = "  (few abusive replies)" if r.below_minimum else ""
    print(f"  {r.topic:<26} {r.mentions:>4} mentions  rate {r.rate:.2f}{flag}")

# Cluster abusers on their topic vectors with a fixed seed.
taxonomy = state.lexicon.taxonomy
vectors = np.array([a.topic_vector for a in state.abusers])
model = kmeans(vectors, k=4, seed=2017, ids=[a.account_id for a in state.abusers])
print(f"\nk-means: {model.iterations} iterations, objective {model.objective_history[0]:.1f}"
      f" -> {model.objective_history[-1]:.1f}")
for c in model.describe(taxonomy, min_cosine=0.3):
    leaning = ", ".join(f"{t} ({cos})" for t, cos in c["topics"]) or "no strong topic"
    print(f"  cluster {c['cluster']}: {c['size']:>3} accounts  {leaning}")
