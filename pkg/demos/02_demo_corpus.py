"""Abuse received by politicians in the bundled election corpus
==============================================================

Runs the full pipeline in memory on the synthetic corpus shipped with
the package and walks through the main tables: how much abuse arrived,
who received it, and which kinds of account sent it.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from mpabuse.demo import WINDOW, demo_dir
from mpabuse.lexicon import demo_paths
from mpabuse.pipeline import RunConfig, run_stages

d = demo_dir()
abuse_path, topic_path = demo_paths()
config = RunConfig(tweets=d / "tweets.jsonl", roster=d / "roster.csv", accounts=d / "accounts.csv",
                   abuse_lexicon=abuse_path, topic_lexicon=topic_path,
                   window_start=WINDOW[0], window_end=WINDOW[1],
                   out=Path(tempfile.gettempdir()) / "mpabuse-demo")
state = run_stages(config, ["profile", "abusers"])

# Headline volume: all tweets, replies to anyone on the roster, replies to MPs.
s = state.summary
for label, count in (("all tweets", s.all_tweets), ("replies to politicians", s.replies_to_roster),
                     ("replies to MPs", s.replies_to_mps)):
    print(f"{label:<24} {count.collected:>5} collected  {count.hadabuse:>4} abusive  "
          f"({count.percent:.2f}%)")

# Per politician, most abuse received first.
print("\nhandle            party                     replies  abusive  share")
for p in sorted(state.politicians, key=lambda p: -p.abusive_replies)[:8]:
    print(f"{p.handle:<17} {p.party:<25} {p.replies_received:>7}  {p.abusive_replies:>7}  "
          f"{p.abuse_proportion:6.1%}")

# Accounts with repeated abuse, split by targetedness.
print("\ngroup        accounts  mean abusive tweets  mean recipients")
for group in ("targeted", "broad", "responsive"):
    members = [a for a in state.abusers if a.group == group]
    if members:
        mean_a = sum(a.abusive_count for a in members) / len(members)
        mean_r = sum(a.recipients for a in members) / len(members)
        print(f"{group:<12} {len(members):>8}  {mean_a:>19.1f}  {mean_r:>15.1f}")
