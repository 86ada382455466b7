from __future__ import annotations

import csv
import random

import pytest

from mpabuse.annotate import (ANNOTATION_FIELDS, Annotator, annotate_corpus, annotate_tweet,
                              write_annotations)
from mpabuse.corpus import link_replies
from mpabuse.lexicon import AbuseTerm, TopicTerm, compile_lexicon, load_demo_lexicon
from mpabuse.segment import split_term, tokenize

from builders import CorpusBuilder
from oracles import brute_force_matches


@pytest.fixture(scope="module")
def annotator():
    return Annotator(load_demo_lexicon())


def test_topic_example(annotator):
    b = CorpusBuilder()
    t = b.add("u1", "Mass immigration is ruining schools, you dick.")
    a = annotate_tweet(annotator, t)
    assert a.abusive
    assert [h.term for h in a.abuse_matches] == ["dick"]
    assert dict(a.topic_counts()) == {"borders and immigration": 1, "schools": 1}


def test_clean_tweet(annotator):
    a = annotate_tweet(annotator, CorpusBuilder().add("u1", "Good luck tomorrow!"))
    assert not a.abusive
    assert a.abuse_matches == () and a.topic_mentions == ()


def test_documented_false_positive(annotator):
    text = "working his balls off to get his arse into Downing Street"
    assert annotator.is_abusive(text)
    terms = {h.term for h in annotator.scan(text)[0]}
    assert terms == {"balls", "arse"}


def test_hashtag_abuse_found(annotator):
    abuse, _ = annotator.scan("#KillTheWitch")
    assert {h.term for h in abuse} == {"kill", "witch"}


def test_word_boundaries_respected(annotator):
    assert not annotator.is_abusive("a classic class assessment")


def test_mentions_and_urls_never_match(annotator):
    assert not annotator.is_abusive("@idiot see https://example.com/idiot")


def test_topic_counted_once_per_span_but_per_occurrence():
    lex = compile_lexicon([AbuseTerm("idiot", ("idiot",), "insult")],
                          [TopicTerm("tax", ("tax",), "economy"),
                           TopicTerm("taxes", ("taxes",), "economy"),
                           TopicTerm("budget", ("budget",), "economy")])
    ann = Annotator(lex)
    _, topics = ann.scan("tax tax budget")
    assert [h.topic for h in topics] == ["economy"] * 3
    # A one-word hashtag is a single token, not a body plus a repeated segment.
    _, topics = ann.scan("#budget")
    assert len(topics) == 1


def test_two_terms_same_topic_same_span_count_once():
    lex = compile_lexicon([AbuseTerm("idiot", ("idiot",), "insult")],
                          [TopicTerm("grammar schools", ("grammar", "schools"), "schools"),
                           TopicTerm("schools", ("schools",), "schools")])
    _, topics = Annotator(lex).scan("grammar schools")
    # Different spans: the two-word term and the single word inside it.
    assert len(topics) == 2


def test_target_from_reply_index(annotator):
    b = CorpusBuilder()
    p = b.add("a", "Our plans for schools")
    r = b.reply("u1", p, "you idiot")
    other = b.add("u2", "hello")
    corpus = b.build()
    index = link_replies(corpus)
    assert annotate_tweet(annotator, r, index).target == "a"
    assert annotate_tweet(annotator, other, index).target is None


def test_corpus_summary_counts(annotator):
    b = CorpusBuilder()
    p = b.add("a", "hello")
    for i in range(100):
        b.reply(f"u{i}", p, "you idiot" if i < 4 else "thanks")
    anns, summary = annotate_corpus(annotator, b.build())
    assert len(anns) == 101
    assert summary.replies_to_roster.collected == 100
    assert summary.replies_to_roster.hadabuse == 4
    assert summary.replies_to_roster.percent == 4.0
    assert summary.replies_to_mps.percent == 4.0


def test_scaled_table_row(annotator):
    b = CorpusBuilder()
    p = b.add("b", "hello")
    for i in range(6139):
        b.reply("u1", p, "coward" if i < 246 else "ok")
    _, summary = annotate_corpus(annotator, b.build())
    mps = summary.replies_to_mps
    assert (mps.collected, mps.hadabuse) == (6139, 246)
    assert round(mps.percent, 2) == 4.01
    assert mps.fraction == 246 / 6139


def test_empty_corpus(annotator):
    anns, summary = annotate_corpus(annotator, CorpusBuilder().build())
    assert anns == []
    for count in (summary.all_tweets, summary.replies_to_roster, summary.replies_to_mps):
        assert (count.collected, count.hadabuse, count.percent) == (0, 0, 0.0)


def test_workers_give_identical_output(annotator):
    rng = random.Random(4)
    b = CorpusBuilder()
    p = b.add("a", "schools")
    words = ["you", "idiot", "schools", "tax", "#gohome", "coward", "nice", "kill"]
    for i in range(300):
        b.reply(f"u{i % 17}", p, " ".join(rng.choice(words) for _ in range(6)))
    corpus = b.build()
    serial = annotate_corpus(annotator, corpus)
    parallel = annotate_corpus(annotator, corpus, workers=2, chunk_size=50)
    assert serial == parallel


def test_abusive_flag_equals_brute_force_scan():
    rng = random.Random(8)
    lex = load_demo_lexicon()
    ann = Annotator(lex)
    terms = [t.tokens for t in lex.abuse_terms]
    vocab = ["you", "idiot", "go", "die", "class", "the", "witch", "ok", "#killthewitch", "@idiot",
             "schools", "arse", "coward", "fine"]
    for _ in range(300):
        text = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 10)))
        stream = tokenize(text, ann.wordlist)
        expected = bool(brute_force_matches(terms, stream.matchable_surfaces()))
        assert ann.is_abusive(text) == expected, text


def test_annotation_pure(annotator):
    t = CorpusBuilder().add("u1", "you idiot, schools")
    assert annotate_tweet(annotator, t) == annotate_tweet(annotator, t)


def test_write_annotations(tmp_path, annotator):
    b = CorpusBuilder()
    p = b.add("a", "schools and immigration")
    b.reply("u1", p, "you idiot")
    anns, _ = annotate_corpus(annotator, b.build())
    path = tmp_path / "ann.csv"
    write_annotations(path, anns)
    rows = list(csv.DictReader(path.open()))
    assert tuple(rows[0]) == ANNOTATION_FIELDS
    assert rows[0]["topics"] == "schools;borders and immigration"
    assert rows[1] == {"tweet_id": "2", "abusive": "1", "abuse_terms": "you idiot;idiot",
                       "topics": "", "target": "a"}


def test_lexicon_words_join_segmentation_dictionary():
    lex = compile_lexicon([AbuseTerm("zorblax", split_term("zorblax"), "insult")])
    assert Annotator(lex).is_abusive("#stopzorblax")
