import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cruciverba.styles import ClueStyle
from cruciverba.validation import (CLUE_MAX_TOKENS, CLUE_MIN_TOKENS,
                                   DEFAULT_LEXICON, ISSUE_ANSWER_LEAK,
                                   ISSUE_STYLE_MISMATCH, ISSUE_TOO_FEW_TOKENS,
                                   ItalianLexicon, classify_structure,
                                   contains_answer_leak, load_lexicon,
                                   rating_codebook, validate)

# The three reference clue/structure pairs plus the five rated example rows.
STRUCTURE_FIXTURES = [
    ("La repubblica asiatica con capitale Tashkent",
     ClueStyle.DEFINITE_DETERMINER_PHRASE),
    ("Grande centro commerciale di lusso con sede a Londra",
     ClueStyle.BARE_NOUN_PHRASE),
    ("è una salsa piccante tipica della Tunisia", ClueStyle.COPULAR_SENTENCE),
]

RATED_ROWS = [
    # (clue, answer, human rating, mechanically passes, leaks)
    ("È il sesto album in studio del gruppo rock inglese The Who",
     "Quadrophenia", "A", True, False),
    ("Il distretto con status di borough del Lancashire",
     "South Ribble", "B", True, False),
    ("Duo composto da Hayley Williams e Taylor York fino al 2017",
     "Paramore", "C", True, False),
    ("Gruppo musicale statunitense", "Pixies", "D", True, False),
    ("Terrier di proporzioni minuscole, cacciatore eccezionale",
     "Patterdale Terrier", "E", False, True),
]


class TestLexicon:
    def test_closed_sets(self):
        lex = DEFAULT_LEXICON
        assert lex.definite_articles == frozenset(
            {"il", "lo", "la", "i", "gli", "le", "l'"})
        assert lex.copula_forms == frozenset(
            {"è", "sono", "era", "erano", "fu", "furono"})
        assert "un" in lex.determiner_set and "quella" in lex.determiner_set
        assert lex.determiner_set >= lex.definite_articles

    def test_versioned(self):
        assert DEFAULT_LEXICON.version == "1"

    def test_override_file(self, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("# version: 9\n[definite_articles]\nil\n[copula_forms]\nè\n"
                        "[other_determiners]\nun\n", encoding="utf-8")
        lex = load_lexicon(path)
        assert lex.version == "9"
        assert lex.definite_articles == frozenset({"il"})


class TestClassifyStructure:
    @pytest.mark.parametrize("clue,expected", STRUCTURE_FIXTURES)
    def test_reference_examples(self, clue, expected):
        assert classify_structure(clue) is expected

    def test_indefinite_article_is_unknown(self):
        assert classify_structure("Un animale domestico") == "unknown"

    @pytest.mark.parametrize("clue,expected", [
        ("Il distretto con status di borough del Lancashire",
         ClueStyle.DEFINITE_DETERMINER_PHRASE),
        ("L'aquila reale delle Alpi", ClueStyle.DEFINITE_DETERMINER_PHRASE),
        ("Gli strumenti a corde", ClueStyle.DEFINITE_DETERMINER_PHRASE),
        ("Sono i satelliti di Marte", ClueStyle.COPULAR_SENTENCE),
        ("Fu imperatore romano", ClueStyle.COPULAR_SENTENCE),
        ("Gruppo musicale statunitense", ClueStyle.BARE_NOUN_PHRASE),
        ("Capitale della Francia", ClueStyle.BARE_NOUN_PHRASE),
        ("Questa città è bellissima", "unknown"),
        ("Una biscia d'acqua", "unknown"),
        ("Un'amica fidata", "unknown"),
    ])
    def test_cascade(self, clue, expected):
        result = classify_structure(clue)
        assert result == expected

    def test_leading_quotes_and_curly_apostrophe(self):
        assert classify_structure("«L’aquila reale»") is \
            ClueStyle.DEFINITE_DETERMINER_PHRASE

    def test_empty_is_unknown(self):
        assert classify_structure("   ") == "unknown"

    def test_deterministic_and_pure(self):
        clue = "La repubblica asiatica con capitale Tashkent"
        assert classify_structure(clue) == classify_structure(clue)

    def test_custom_lexicon(self):
        lex = ItalianLexicon(definite_articles=frozenset({"el"}),
                             copula_forms=frozenset({"es"}),
                             other_determiners=frozenset())
        assert classify_structure("el toro", lex) is ClueStyle.DEFINITE_DETERMINER_PHRASE
        assert classify_structure("es una salsa", lex) is ClueStyle.COPULAR_SENTENCE


class TestAnswerLeak:
    def test_shared_answer_word(self):
        assert contains_answer_leak(
            "Terrier di proporzioni minuscole, cacciatore eccezionale",
            "Patterdale Terrier") is True

    def test_clean_clue(self):
        assert contains_answer_leak(
            "È il sesto album in studio del gruppo rock inglese The Who",
            "Quadrophenia") is False

    def test_clue_equal_to_answer(self):
        assert contains_answer_leak("Harissa", "Harissa") is True

    def test_accent_folding(self):
        assert contains_answer_leak("La citta più bella", "Città") is True

    def test_edit_distance_one(self):
        assert contains_answer_leak("Il grande Terriers del nord",
                                    "Patterdale Terrier") is True

    def test_short_words_ignored(self):
        # "The" and "Who" are under the 4-character threshold in isolation
        assert contains_answer_leak("Il gruppo che incise Tommy", "The Who") is False

    def test_full_answer_substring(self):
        assert contains_answer_leak("famoso brano dei the who del 1969",
                                    "The Who") is True

    def test_empty_answer_rejected(self):
        with pytest.raises(ValueError):
            contains_answer_leak("clue", "   ")

    @given(st.from_regex(r"[a-z]{4,10}( [a-z]{4,10}){0,1}", fullmatch=True),
           st.lists(st.from_regex(r"[a-z]{2,9}", fullmatch=True), max_size=8))
    def test_soundness_floor_embedding(self, answer, filler):
        words = list(filler)
        pos = random.Random(0).randint(0, len(words))
        clue = " ".join(words[:pos] + [answer] + words[pos:])
        assert contains_answer_leak(clue, answer) is True


class TestValidate:
    def test_copular_example_passes(self):
        report = validate("è una salsa piccante tipica della Tunisia", "Harissa",
                          ClueStyle.COPULAR_SENTENCE)
        assert report.passed
        assert report.style_matches_request
        assert report.detected_style == ClueStyle.COPULAR_SENTENCE.value
        assert not report.answer_leak

    def test_style_mismatch(self):
        report = validate("è una salsa piccante tipica della Tunisia", "Harissa",
                          ClueStyle.BARE_NOUN_PHRASE)
        assert not report.style_matches_request
        assert ISSUE_STYLE_MISMATCH in report.issues
        assert not report.passed

    def test_unrestricted_always_matches(self):
        report = validate("Gruppo musicale statunitense", "Pixies",
                          ClueStyle.UNRESTRICTED)
        assert report.style_matches_request

    @pytest.mark.parametrize("clue,answer,rating,mech_pass,leaks", RATED_ROWS)
    def test_rated_rows_mechanical_verdicts(self, clue, answer, rating,
                                            mech_pass, leaks):
        report = validate(clue, answer, ClueStyle.UNRESTRICTED)
        assert report.passed is mech_pass
        assert report.answer_leak is leaks
        if leaks:
            assert ISSUE_ANSWER_LEAK in report.issues

    def test_leak_never_passes(self):
        report = validate("Terrier di proporzioni minuscole", "Patterdale Terrier",
                          ClueStyle.UNRESTRICTED)
        assert report.answer_leak and not report.passed

    def test_length_warning_is_not_failure(self):
        report = validate("Gruppo musicale statunitense", "Pixies",
                          ClueStyle.UNRESTRICTED)
        assert not report.length_ok
        assert ISSUE_TOO_FEW_TOKENS in report.issues
        assert report.passed

    def test_length_bounds(self):
        short = "una due tre"  # 3 tokens
        okay = "una frase di prova"  # 4 tokens
        long = " ".join(["parola"] * (CLUE_MAX_TOKENS + 1))
        assert not validate(short, "Xylo", ClueStyle.UNRESTRICTED).length_ok
        assert validate(okay, "Xylo", ClueStyle.UNRESTRICTED).length_ok
        assert not validate(long, "Xylo", ClueStyle.UNRESTRICTED).length_ok
        assert CLUE_MIN_TOKENS == 4 and CLUE_MAX_TOKENS == 55

    def test_empty_clue(self):
        report = validate("  ", "Roma", ClueStyle.UNRESTRICTED)
        assert not report.passed
        assert "EmptyClue" in report.issues

    def test_report_round_trips_as_dict(self):
        from cruciverba.validation import ValidationReport
        report = validate("Capitale della Francia", "Parigi", ClueStyle.BARE_NOUN_PHRASE)
        again = ValidationReport.from_dict(report.as_dict())
        assert again == report


class TestRatingCodebook:
    def test_five_levels_ordered(self):
        book = rating_codebook()
        assert len(book) == 5
        assert [code for code, _ in book] == ["A", "B", "C", "D", "E"]

    def test_stable_across_calls(self):
        assert rating_codebook() == rating_codebook()

    def test_worst_level_mentions_answer_disclosure(self):
        desc = dict(rating_codebook())["E"]
        assert "answer" in desc.lower()
