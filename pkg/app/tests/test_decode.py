import io

import pytest

from app.models.errors import LexiconError
from app.models.lexicon import LemmaLexicon, LexiconEntry
from app.models.report import DecodeReport
from app.models.token import Placement, Scheme, Token
from app.services.decode import (
    build_lexicon, decode_conj_token, decode_line, decode_pos_tokens, parse_tokens,
    read_lexicon, write_lexicon,
)
from app.services.encode import encode_sentence

TOKEN_SCHEMES = [Scheme.conj_token, Scheme.pos_suffix, Scheme.pos_prefix, Scheme.pos_circumfix]


@pytest.fixture(scope="module")
def small_lexicon():
    return LemmaLexicon(entries={
        "走る": [LexiconEntry(conj_type="五段・ラ行", pos_coarse="動詞", count=3)],
        "だ": [LexiconEntry(conj_type="特殊・ダ", pos_coarse="助動詞", count=2)],
    })


@pytest.mark.parametrize("scheme, line", [
    (Scheme.conj_token, "私 は 走る <動詞・命令ｅ> 。"),
    (Scheme.pos_suffix, "私 <名詞> は <助詞> 走る <動詞・命令ｅ> <動詞> 。 <記号>"),
    (Scheme.pos_prefix, "<名詞> 私 <助詞> は <動詞> <動詞・命令ｅ> 走る <記号> 。"),
    (Scheme.pos_circumfix, "<名詞> 私 <助詞> は <動詞> 走る <動詞・命令ｅ> <記号> 。"),
])
def test_decode_restores_surface(table, small_lexicon, scheme, line):
    sentence, report = decode_line(line, scheme, table, small_lexicon)
    assert sentence == "私 は 走れ 。"
    assert report.conj_applied == 1
    assert report.fallbacks == 0
    assert report.sentences == 1


def test_decode_circumfix_with_tag_map(table, small_lexicon, tag_map):
    line = "<noun> 私 <particle> は <verb> 走る <verb-plain> <symbol> 。"
    sentence, report = decode_line(line, Scheme.pos_circumfix, table, small_lexicon, tag_map)
    assert sentence == "私 は 走る 。"
    assert report.pos_deleted == 4


def test_unknown_lemma_falls_back_to_plain_form(table, small_lexicon):
    """
    Test a conjugation token after a lemma the lexicon has never seen.
    Expected Behavior: the plain form is kept and the fallback is counted.
    """
    sentence, report = decode_line("泳ぐ <動詞・連用タ接続> だ", Scheme.conj_token, table,
                                   small_lexicon)
    assert sentence == "泳ぐ だ"
    assert report.plain_fallback == 1
    assert report.fallback_forms == {"連用タ接続": 1}


def test_pos_mismatch_falls_back(table, small_lexicon):
    # 走る is only known as a verb
    sentence, report = decode_line("走る <形容詞・連用タ接続>", Scheme.conj_token, table, small_lexicon)
    assert sentence == "走る"
    assert report.plain_fallback == 1


def test_form_missing_from_type_falls_back(table, small_lexicon):
    sentence, report = decode_line("だ <助動詞・命令ｅ>", Scheme.conj_token, table, small_lexicon)
    assert sentence == "だ"
    assert report.plain_fallback == 1


def test_orphan_and_extra_conj_tokens_are_dropped(table, small_lexicon):
    """
    Test a leading conjugation token and two tokens after one lemma.
    Expected Behavior: the first is an orphan, the second an extra; only one applies.
    """
    tokens = parse_tokens("<動詞・基本形> 走る <動詞・命令ｅ> <動詞・未然形> 。")
    words, report = decode_conj_token(tokens, table, small_lexicon)
    assert words == ["走れ", "。"]
    assert report.orphan_conj_deleted == 1
    assert report.extra_conj_deleted == 1
    assert report.conj_applied == 1


def test_conj_token_stream_drops_pos_tokens(table, small_lexicon):
    words, report = decode_conj_token(parse_tokens("私 <名詞> 走る <動詞・命令ｅ>"), table,
                                      small_lexicon)
    assert words == ["私", "走れ"]
    assert report.unexpected_pos_deleted == 1


def test_prefix_nearest_conj_token_wins(table, small_lexicon):
    tokens = parse_tokens("<動詞> <動詞・未然形> <動詞・命令ｅ> 走る <動詞・基本形>")
    words, report = decode_pos_tokens(tokens, Placement.prefix, table, small_lexicon)
    assert words == ["走れ"]
    assert report.extra_conj_deleted == 1
    assert report.orphan_conj_deleted == 1
    assert report.pos_deleted == 1


def test_misplaced_pos_tokens_are_counted(table, small_lexicon):
    # suffix: a POS token needs a non-POS token before it
    words, report = decode_pos_tokens(parse_tokens("<名詞> 私 <名詞> <名詞>"), Placement.suffix,
                                      table, small_lexicon)
    assert words == ["私"]
    assert report.pos_deleted == 1
    assert report.misplaced_pos_deleted == 2

    # circumfix: a POS token needs a word right after it
    words, report = decode_pos_tokens(parse_tokens("私 <名詞>"), Placement.circumfix,
                                      table, small_lexicon)
    assert words == ["私"]
    assert report.misplaced_pos_deleted == 1


def test_baseline_is_identity_and_features_are_rejected(table, small_lexicon):
    assert decode_line("私 は 走れ 。", Scheme.baseline, table, small_lexicon)[0] == "私 は 走れ 。"
    with pytest.raises(ValueError):
        decode_line("私|名詞|代名詞|*", Scheme.conj_feature, table, small_lexicon)


def test_escaped_words_decode_verbatim(table, small_lexicon):
    sentence, _ = decode_line("\\<注意> \\\\ > <名詞>", Scheme.pos_suffix, table, small_lexicon)
    assert sentence == "<注意> \\ >"


def test_bare_backslash_is_a_word(table):
    """
    Test a lone backslash, which the encoder never emits but a model can.
    Expected Behavior: it decodes as itself instead of vanishing into an empty word.
    """
    assert Token.parse("\\") == Token.word("\\")
    sentence, report = decode_line("私 \\ 走る", Scheme.conj_token, table, LemmaLexicon())
    assert sentence == "私 \\ 走る"
    assert report.plain_fallback == 0


def test_reports_add_up():
    a = DecodeReport(sentences=1, conj_applied=2, applied_forms={"基本形": 2})
    b = DecodeReport(sentences=1, conj_applied=1, plain_fallback=1,
                     applied_forms={"基本形": 1, "命令ｅ": 1}, fallback_forms={"連用形": 1})
    merged = a.merge(b)
    assert merged.sentences == 2
    assert merged.conj_applied == 3
    assert merged.applied_forms == {"基本形": 3, "命令ｅ": 1}
    assert merged.fallback_forms == {"連用形": 1}
    assert merged.fallbacks == 1
    assert a.conj_applied == 2, "merge should not touch its operands"


@pytest.mark.parametrize("scheme", TOKEN_SCHEMES)
def test_round_trip_identity(corpus, table, lexicon, scheme):
    """
    Test decode(encode(s)) over the composed corpus.
    Expected Behavior: every sentence is restored exactly, with no fallback taken.
    """
    assert len(corpus) >= 500
    total = DecodeReport()
    for s in corpus:
        line = encode_sentence(s, scheme)
        sentence, report = decode_line(line, scheme, table, lexicon)
        assert sentence == " ".join(s.surfaces), f"{scheme.value} failed on {line}"
        total = total.merge(report)
    assert total.fallbacks == 0


@pytest.mark.parametrize("scheme", TOKEN_SCHEMES)
def test_round_trip_identity_with_tag_map(fixture_sentences, table, lexicon, tag_map, scheme):
    for s in fixture_sentences:
        line = encode_sentence(s, scheme, tag_map)
        assert decode_line(line, scheme, table, lexicon, tag_map)[0] == " ".join(s.surfaces)


# --- LEXICON ---
def test_build_lexicon_keeps_pos_and_counts(fixture_sentences, table):
    lex = build_lexicon(fixture_sentences, table)
    assert [e.conj_type for e in lex.candidates("だ", "助動詞")] == ["特殊・ダ", "特殊・タ"], \
        "Candidates should be ordered by count"
    assert [e.conj_type for e in lex.candidates("ない", "形容詞")] == ["形容詞・アウオ段"]
    assert [e.conj_type for e in lex.candidates("ない", "助動詞")] == ["特殊・ナイ"]
    assert "私" not in lex, "Non-predicates stay out of the lexicon"


def test_lexicon_file_round_trip(lexicon, table):
    out = io.StringIO()
    write_lexicon(lexicon, out)
    restored = read_lexicon(out.getvalue().splitlines(), table)
    assert restored == lexicon


@pytest.mark.parametrize("lines", [
    ["走る\t動詞\t五段・ラ行\n"],
    ["走る\t動詞\t五段・ラ行\tmany\n"],
    ["走る\t動詞\t五段・ラ行\t0\n"],
    ["走る\t動詞\t存在しない型\t3\n"],
])
def test_read_lexicon_rejects_bad_rows(table, lines):
    with pytest.raises(LexiconError):
        read_lexicon(lines, table)


def test_parse_tokens_kinds():
    kinds = [t.kind.value for t in parse_tokens("走る <動詞・基本形> <動詞> \\<x> < <>")]
    assert kinds == ["word", "conj", "pos", "word", "word", "word"]
    assert parse_tokens("\\<x>")[0] == Token.word("<x>")
