"""Matching walkthrough
===================

How a single tweet becomes abuse and topic hits: tokenizing, hashtag
segmentation, lexicon matching, and the targetedness score that later
sorts abusive accounts into groups.
"""

from __future__ import annotations

from mpabuse.annotate import Annotator
from mpabuse.lexicon import load_demo_lexicon
from mpabuse.metrics import abuser_group, targetedness
from mpabuse.segment import segment_hashtag, tokenize

annotator = Annotator(load_demo_lexicon())

# Tokenizing keeps hashtags whole and appends their segmentation, so a
# term hidden inside a tag still matches.  Mentions and URLs become
# barriers that no term can span.
stream = tokenize("@someone RT #killthewitch now https://t.co/x", annotator.wordlist)
print("tokens:", stream.surfaces)
print("segmented tag:", segment_hashtag("brexitmeansbrexit2017", annotator.wordlist))

# Abuse and topic hits for one reply.
text = "Mass immigration is ruining schools, you dick."
abuse, topics = annotator.scan(text)
print("\n" + text)
print("  abuse terms:", [h.term for h in abuse])
print("  topics:", [h.topic for h in topics])

# Dictionary matching has no sense of context, so some friendly phrases
# are flagged.  These false alarms are a known cost of the method.
for text in ("working his balls off to get his arse into Downing Street",
             "I would kill for a decent train service"):
    print(f"{text!r} flagged: {annotator.is_abusive(text)}")

# Targetedness compares abusive tweets sent (a) with distinct recipients
# (r).  Above 1 means focus on few people, below 1 means spreading abuse
# widely, exactly 1 is a single reply to a single person.
print()
for a, r in [(1, 1), (28, 1), (5, 5), (12, 4)]:
    print(f"a={a:>2} r={r}  t={targetedness(a, r)!s:>5}  group={abuser_group(a, r)}")
