"""Abusive replies to politicians in archived tweet streams.

Lexicon-based abuse detection with hashtag segmentation, reply
attribution, per-politician and per-account profiling (including the
targetedness score), topic-triggered abuse rates, k-means topic
clustering of abusive accounts and the supporting significance tests.
"""

from .annotate import Annotation, Annotator, annotate_corpus, annotate_tweet
from .corpus import (AccountStats, Corpus, Politician, Roster, Tweet, Window, ingest_tweets,
                     link_replies, load_accounts, load_corpus, load_roster)
from .errors import CorpusError, DataError, DegenerateError, LexiconError
from .lexicon import CompiledLexicon, compile_lexicon, load_demo_lexicon, load_lexicon, match
from .metrics import (AbuserProfile, PoliticianProfile, abuser_group, account_topic_vector,
                      classify_abusers, politician_profiles, targetedness, topic_abuse_rates)
from .segment import SegmentationDict, segment_hashtag, tokenize
from .stats import (ClassifierEval, ClusterModel, TestResult, chi_square_yates,
                    evaluate_classifier, fisher_exact_2x2, kmeans, partial_correlation,
                    welch_t_test)

__version__ = "0.1.0"
