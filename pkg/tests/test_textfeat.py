from derailwatch.textfeat import (
    LexiconSet,
    detect_mentions,
    detect_quote,
    extract_features,
    strip_markdown,
    tokenize_lemmatize,
    top_unigrams,
    trigrams,
)


class TestTokenizeLemmatize:
    def test_contraction_and_caps(self):
        assert tokenize_lemmatize("You're saying THIS failed?") == [
            "you", "be", "say", "this", "fail",
        ]

    def test_empty_body(self):
        assert tokenize_lemmatize("") == []

    def test_code_block_stripped(self):
        assert tokenize_lemmatize("```rm -rf /``` done") == ["do"]

    def test_negative_contraction(self):
        assert tokenize_lemmatize("don't") == ["do", "not"]

    def test_plural_and_ing_suffixes(self):
        assert tokenize_lemmatize("running tests explains things") == [
            "run", "test", "explain", "thing",
        ]

    def test_ing_nouns_not_stripped(self):
        assert tokenize_lemmatize("nothing something anything everything") == [
            "nothing", "something", "anything", "everything",
        ]

    def test_short_ed_form_restores_e(self):
        assert tokenize_lemmatize("used") == ["use"]

    def test_urls_removed(self):
        assert tokenize_lemmatize("see https://example.com/a?b=c now") == [
            "see", "now",
        ]


class TestMentionsAndQuotes:
    def test_basic_mentions(self):
        assert detect_mentions("thanks @alice and @bob-2") == ["alice", "bob-2"]

    def test_email_not_a_mention(self):
        assert detect_mentions("mail me a@b.com") == []

    def test_code_span_excluded(self):
        assert detect_mentions("`@notme` in code") == []

    def test_deduplicated_in_order(self):
        assert detect_mentions("@b then @a then @b") == ["b", "a"]

    def test_quote_line(self):
        assert detect_quote("> you said X\nno I didn't") is True

    def test_inline_gt_is_not_quote(self):
        assert detect_quote("5 > 3 holds") is False

    def test_quote_inside_fence_ignored(self):
        assert detect_quote("```\n> inside code\n```") is False


class TestStripMarkdown:
    def test_fences_inline_code_urls(self):
        text = strip_markdown("a ```code``` b `span` c https://x.y d")
        assert "code" not in text and "span" not in text and "x.y" not in text
        for word in ("a", "b", "c", "d"):
            assert word in text


class TestHandLabeledContract:
    """Every boolean flag must match the 30-comment hand-labeled fixture."""

    def test_all_flags_match_hand_labels(self, labeled_comments):
        lexicons = LexiconSet.default()
        assert len(labeled_comments) == 30
        for row in labeled_comments:
            fv = extract_features(row["body"], lexicons)
            got = {
                "second_person": fv.has_second_person,
                "first_person": fv.has_first_person,
                "wh": fv.has_wh,
                "negation": fv.has_negation,
                "reasoning": fv.has_reasoning,
                "emphasis": fv.has_emphasis,
                "comm_verb": fv.has_comm_verb,
                "mentions": list(fv.mentions),
                "quote": fv.has_quote,
            }
            want = {key: row[key] for key in got}
            assert got == want, f"flag mismatch on body: {row['body']!r}"

    def test_extraction_is_deterministic(self, labeled_comments):
        lexicons = LexiconSet.default()
        for row in labeled_comments:
            assert extract_features(row["body"], lexicons) == extract_features(
                row["body"], lexicons
            )


class TestExtractFeatures:
    def test_spec_cue_sentence(self):
        fv = extract_features(
            "Why don't you just read the docs?", LexiconSet.default()
        )
        assert fv.has_wh and fv.has_negation and fv.has_second_person

    def test_all_flags_false_on_acronym(self):
        fv = extract_features("LGTM", LexiconSet.default())
        assert not any(
            [fv.has_second_person, fv.has_first_person, fv.has_wh,
             fv.has_negation, fv.has_reasoning, fv.has_emphasis,
             fv.has_comm_verb, fv.has_quote]
        )
        assert fv.mentions == ()

    def test_stripping_code_never_adds_cues(self):
        plain = extract_features("fine by me", LexiconSet.default())
        fenced = extract_features("fine by me\n```\nyou never explain why\n```",
                                  LexiconSet.default())
        assert fenced.has_second_person <= plain.has_second_person
        assert fenced.has_negation <= plain.has_negation
        assert fenced.has_wh <= plain.has_wh
        assert fenced.has_comm_verb <= plain.has_comm_verb


class TestNgrams:
    def test_top_unigrams_hand_count(self):
        bodies = [
            "the crash happens on startup",
            "the crash is gone after the patch",
            "startup crash again",
        ]
        ranked = top_unigrams(bodies, n=3, exclusions=frozenset({"the", "on", "after"}))
        assert ranked[0] == ("crash", 3)
        assert ranked[1] == ("startup", 2)

    def test_unigram_ties_alphabetical(self):
        ranked = top_unigrams(["b a", "a b"], n=2, exclusions=frozenset())
        assert ranked == [("a", 2), ("b", 2)]

    def test_n_larger_than_vocabulary(self):
        ranked = top_unigrams(["one two"], n=100, exclusions=frozenset())
        assert len(ranked) == 2

    def test_trigrams_hand_count(self):
        result = trigrams("read the docs read the docs")
        assert result[0] == (("read", "the", "doc"), 2)

    def test_two_token_comment_has_no_trigrams(self):
        assert trigrams("hello world") == []


class TestLexiconLoading:
    def test_default_lexicons_non_empty(self):
        lex = LexiconSet.default()
        assert "you" in lex.second_person
        assert "i" in lex.first_person
        assert "why" in lex.wh_question
        assert "nothing" in lex.negation
        assert "because" in lex.reasoning
        assert "really" in lex.emphasis
        assert "say" in lex.communication_verbs

    def test_comment_lines_ignored(self, tmp_path):
        d = tmp_path / "lex"
        d.mkdir()
        names = ["second_person", "first_person", "wh_question", "negation",
                 "reasoning", "emphasis", "communication_verbs"]
        for name in names:
            (d / f"{name}.txt").write_text("# comment\nword\n", encoding="utf-8")
        lex = LexiconSet.from_dir(d)
        assert lex.negation == frozenset({"word"})
