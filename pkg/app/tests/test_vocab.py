import io

import pytest

from app.models.errors import DataError, EmptyCorpus
from app.models.morpheme import AnalyzedSentence, Morpheme
from app.models.token import Scheme
from app.models.vocab import Vocabulary
from app.services.encode import encode_sentence, factor_header
from app.services.vocab import (
    build_vocab, compare_schemes, compression_ratio, corpus_tokens, count_tokens, coverage,
    predicate_types, read_vocab, scheme_tokens, write_vocab,
)

# 20 hand-countable sentences
SMALL_CORPUS = [
    "the cat sat", "the dog sat", "a cat ran", "the cat ran", "a dog ran",
    "the bird sang", "a bird sat", "the cat sat", "the dog ran", "a cat sang",
    "the fox ran", "the fox sat", "a dog sang", "the cat slept", "a bird ran",
    "the dog slept", "the cat ran", "a fox sang", "the owl sat", "the cat sat",
]

RU_VERB_FORMS = [("る", "基本形"), ("ら", "未然形"), ("り", "連用形"), ("れ", "仮定形"),
                 ("っ", "連用タ接続"), ("れ", "命令ｅ")]

PERIOD = Morpheme(surface="。", pos_coarse="記号", pos_fine="句点", lemma="。")


def _verb(stem, ending, conj_form):
    return Morpheme(surface=stem + ending, pos_coarse="動詞", pos_fine="自立",
                    conj_type="五段・ラ行", conj_form=conj_form, lemma=stem + "る")


def _verb_corpus(lemmas, forms):
    return [AnalyzedSentence(morphemes=[_verb(f"語{i}", ending, form), PERIOD])
            for i in range(lemmas) for ending, form in forms]


def test_build_vocab_top_k():
    v = build_vocab({"a": 3, "b": 2, "c": 1}, 4)
    assert v.entries == [("a", 3), ("b", 2)]
    assert "a" in v and "c" not in v


def test_build_vocab_tie_keeps_smaller_token():
    v = build_vocab({"a": 2, "c": 1, "b": 1}, 4)
    assert v.entries == [("a", 2), ("b", 1)]


def test_build_vocab_skips_reserved_and_validates_limit():
    v = build_vocab({"<unk>": 9, "a": 1}, 3)
    assert v.entries == [("a", 1)]
    with pytest.raises(ValueError):
        build_vocab({"a": 1}, 2)
    with pytest.raises(EmptyCorpus):
        build_vocab({}, 10)


def test_vocabulary_invariants():
    with pytest.raises(ValueError):
        Vocabulary(entries=[("a", 1), ("b", 2)], size_limit=10)
    with pytest.raises(ValueError):
        Vocabulary(entries=[("a", 2), ("b", 1)], size_limit=3)


def test_small_corpus_matches_brute_force_recount():
    """
    Test coverage on 20 hand-countable sentences at vocab size 8.
    Expected Behavior: both fractions equal a direct recount over the sentences.
    """
    counts = count_tokens(corpus_tokens(SMALL_CORPUS, Scheme.baseline))

    recount = {}
    for line in SMALL_CORPUS:
        for word in line.split():
            recount[word] = recount.get(word, 0) + 1
    assert dict(counts) == recount
    assert recount["the"] == 13 and recount["cat"] == 8

    kept = sorted(recount, key=lambda w: (-recount[w], w))[:6]
    report = coverage(build_vocab(counts, 8), counts, Scheme.baseline)
    assert report.distinct_types == len(recount)
    assert report.oov_types == len(recount) - 6
    assert report.type_coverage == 6 / len(recount)
    assert report.running_tokens == 60
    assert report.token_coverage == sum(recount[w] for w in kept) / 60


def test_coverage_edges():
    counts = {f"t{i}": 10 - i for i in range(10)}
    top5 = coverage(build_vocab(counts, 7), counts, Scheme.baseline)
    assert top5.type_coverage == 0.5
    assert top5.token_coverage == 40 / 55

    full = coverage(build_vocab(counts, 100), counts, Scheme.baseline)
    assert (full.type_coverage, full.token_coverage) == (1.0, 1.0)

    empty_vocab = Vocabulary(entries=[], size_limit=3)
    assert coverage(empty_vocab, counts, Scheme.baseline).type_coverage == 0.0
    assert coverage(empty_vocab, {}, Scheme.baseline).type_coverage == 1.0


def test_coverage_is_monotone_in_vocab_size(corpus):
    counts = count_tokens(t for s in corpus for t in scheme_tokens(s, Scheme.conj_token))
    previous = (0.0, 0.0)
    for size in range(3, len(counts) + 5):
        report = coverage(build_vocab(counts, size), counts, Scheme.conj_token)
        current = (report.type_coverage, report.token_coverage)
        assert current[0] >= previous[0] and current[1] >= previous[1]
        previous = current
    assert previous == (1.0, 1.0)


def test_special_tokens_are_counted():
    counts = count_tokens(["走る", "<動詞・基本形>", "<動詞>", "\\<x>", "<unk>"])
    report = coverage(build_vocab(counts, 10), counts, Scheme.pos_suffix)
    assert report.special_token_count == 3


def test_no_predicates_means_no_reduction():
    s = AnalyzedSentence(morphemes=[
        Morpheme(surface="私", pos_coarse="名詞", lemma="私"), PERIOD])
    baseline = scheme_tokens(s, Scheme.baseline)
    for scheme in (Scheme.conj_token, Scheme.conj_feature, Scheme.pos_suffix):
        report = compression_ratio(baseline, scheme_tokens(s, scheme))
        assert report.reduction == 0.0, scheme
    assert compression_ratio(baseline, scheme_tokens(s, Scheme.pos_suffix)).special_types == 2


def test_one_verb_in_five_surface_forms():
    """
    Test a corpus holding one verb in five distinct surface forms.
    Expected Behavior: 5 baseline types shrink to 1 lemma plus 5 conjugation tokens.
    """
    sentences = [AnalyzedSentence(morphemes=[_verb("走", e, f)]) for e, f in RU_VERB_FORMS]
    baseline = [t for s in sentences for t in scheme_tokens(s, Scheme.baseline)]
    assert len(set(baseline)) == 5, "仮定形 and 命令ｅ share the surface 走れ"

    sentences = sentences[:5]
    baseline = [t for s in sentences for t in scheme_tokens(s, Scheme.baseline)]
    encoded = [t for s in sentences for t in scheme_tokens(s, Scheme.conj_token)]
    report = compression_ratio(baseline, encoded, predicate_types(sentences))
    assert report.baseline_types == 5
    assert report.encoded_types == 1
    assert report.special_types == 5
    assert report.reduction == pytest.approx(4 / 5)
    assert report.predicate_reduction == pytest.approx(4 / 5)


def test_six_surface_forms_predicate_breakdown():
    forms = RU_VERB_FORMS[:5] + [("ろ", "未然ウ接続")]
    sentences = [AnalyzedSentence(morphemes=[_verb("走", e, f)]) for e, f in forms]
    surfaces, lemmas = predicate_types(sentences)
    assert len(surfaces) == 6 and lemmas == {"走る"}
    report = compression_ratio([m.surface for s in sentences for m in s.morphemes],
                               [t for s in sentences for t in scheme_tokens(s, Scheme.conj_token)],
                               (surfaces, lemmas))
    assert report.predicate_reduction == pytest.approx(5 / 6)
    assert report.reduction == pytest.approx(5 / 6)


def test_conjugation_tokens_raise_coverage():
    """
    Test 200 verb lemmas each seen in five conjugated forms, at a fixed vocab size.
    Expected Behavior: conj-token coverage strictly exceeds baseline coverage.
    """
    sentences = _verb_corpus(200, RU_VERB_FORMS[:5])
    summaries = {s.scheme: s for s in compare_schemes(
        sentences, 100, schemes=[Scheme.baseline, Scheme.conj_token, Scheme.conj_feature])}
    base = summaries[Scheme.baseline].coverage
    conj = summaries[Scheme.conj_token].coverage
    assert conj.type_coverage > base.type_coverage
    assert conj.token_coverage > base.token_coverage
    assert summaries[Scheme.conj_feature].coverage.type_coverage > base.type_coverage

    compression = summaries[Scheme.conj_token].compression
    assert compression.predicate_baseline_types == 1000
    assert compression.predicate_encoded_types == 200
    assert compression.encoded_types < compression.baseline_types


def test_compare_schemes_over_fixture(corpus):
    summaries = compare_schemes(corpus, 200)
    assert [s.scheme for s in summaries] == list(Scheme)
    by_scheme = {s.scheme: s for s in summaries}
    assert by_scheme[Scheme.baseline].compression.reduction == 0.0
    assert by_scheme[Scheme.baseline].coverage.special_token_count == 0
    for scheme in (Scheme.pos_suffix, Scheme.pos_prefix, Scheme.pos_circumfix):
        assert by_scheme[scheme].coverage.running_tokens > \
            by_scheme[Scheme.conj_token].coverage.running_tokens


def test_compare_schemes_reads_the_corpus_once(corpus):
    """
    Test a one-shot generator in place of a list.
    Expected Behavior: every scheme sees the whole corpus and the summaries match the list run.
    """
    reads = []

    def once():
        reads.append(1)
        yield from corpus

    streamed = compare_schemes(once(), 200)
    assert len(reads) == 1
    assert [s.dict() for s in streamed] == [s.dict() for s in compare_schemes(list(corpus), 200)]
    assert streamed[0].coverage.running_tokens == sum(len(s.surfaces) for s in corpus)


def test_corpus_tokens_reads_factor_files():
    s = AnalyzedSentence(morphemes=[_verb("走", "れ", "命令ｅ"), PERIOD])
    lines = [factor_header(), encode_sentence(s, Scheme.conj_feature)]
    assert list(corpus_tokens(lines, Scheme.conj_feature)) == ["走る", "。"]


def test_vocab_file_round_trip():
    v = build_vocab({"a": 3, "b": 2, "c": 1, "d": 1}, 10)
    out = io.StringIO()
    write_vocab(v, out)
    assert out.getvalue() == "a\t3\nb\t2\nc\t1\nd\t1\n"
    assert read_vocab(out.getvalue().splitlines(), 10) == v
    assert read_vocab(out.getvalue().splitlines(), 4).entries == [("a", 3), ("b", 2)]


@pytest.mark.parametrize("lines", [["a 3"], ["a\tthree"], ["b\t1", "a\t3"]])
def test_bad_vocab_files(lines):
    with pytest.raises(DataError):
        read_vocab(lines, 10)
