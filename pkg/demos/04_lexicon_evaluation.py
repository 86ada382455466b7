"""How well does the demo lexicon detect insults?
==============================================

Scores the dictionary classifier on a small labelled set of comments
and prints the confusion matrix with precision, recall, F1 and Cohen's
kappa.  Missed insults and false alarms are listed so the lexicon's
blind spots are visible.
"""

from __future__ import annotations

from importlib import resources

from mpabuse.annotate import Annotator
from mpabuse.evaluation import evaluate_lexicon, load_labeled
from mpabuse.lexicon import load_demo_lexicon

path = resources.files("mpabuse").joinpath("data/eval_fixture.csv")
annotator = Annotator(load_demo_lexicon())

ev = evaluate_lexicon(annotator, path)
print(f"tp={ev.tp} fp={ev.fp} tn={ev.tn} fn={ev.fn}")
print(f"accuracy {ev.accuracy:.2f}  precision {ev.precision:.2f}  recall {ev.recall:.2f}  "
      f"F1 {ev.f1:.2f}  kappa {ev.kappa:.2f}")

items = load_labeled(path)
print("\nmissed insults:")
for gold, text in items:
    if gold and not annotator.is_abusive(text):
        print("  ", text)
print("false alarms:")
for gold, text in items:
    if not gold and annotator.is_abusive(text):
        print("  ", text)
