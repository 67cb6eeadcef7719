#include <doctest.h>

#include <fstream>
#include <sstream>

#include "charprobe/analysis.hpp"
#include "charprobe/error.hpp"
#include "test_util.hpp"

using namespace charprobe;

namespace {
const std::string kG(kSpaceMarker);
}

TEST_CASE("boundary stats count within-word adjacencies only") {
    Vocabulary vocab;
    int32_t g_ab = vocab.add(kG + "ab");
    int32_t cd = vocab.add("cd");
    int32_t g_cd = vocab.add(kG + "cd");

    TokenizedCorpus corpus;
    corpus.documents.push_back({g_ab, cd});
    BoundaryPairTable t1 = boundary_pair_stats(corpus, vocab);
    CHECK(t1.total == 1);
    CHECK(t1.count('b', 'c') == 1);

    corpus.documents[0] = {g_ab, g_cd};
    BoundaryPairTable t2 = boundary_pair_stats(corpus, vocab);
    CHECK(t2.total == 0);

    corpus.documents[0] = {g_ab};
    BoundaryPairTable t3 = boundary_pair_stats(corpus, vocab);
    CHECK(t3.total == 0);
}

TEST_CASE("corpus-wide scope counts across word boundaries too") {
    Vocabulary vocab;
    int32_t g_ab = vocab.add(kG + "ab");
    int32_t g_cd = vocab.add(kG + "cd");
    TokenizedCorpus corpus;
    corpus.documents.push_back({g_ab, g_cd});
    BoundaryPairTable t = boundary_pair_stats(corpus, vocab, false);
    CHECK(t.total == 1);
    CHECK(t.count('b', 'c') == 1); // marker excluded from the boundary chars
}

TEST_CASE("boundary total equals the number of counted adjacencies") {
    Tokenizer tok = build_controlled_tokenizer(SeedSpec{31, "controlled"});
    Corpus corpus;
    corpus.documents.push_back("abcdefg hij klmnopqr st uvwxyzab");
    corpus.documents.push_back("zyxwvut once more with feeling");
    TokenizedCorpus enc =
        encode_corpus(corpus, TokenizerKind::kControlled, tok.vocab, &tok.merges);

    uint64_t expected = 0;
    for (const auto& doc : enc.documents)
        for (size_t i = 0; i + 1 < doc.size(); ++i)
            if (!has_marker(tok.vocab.token_of(doc[i + 1]))) ++expected;

    BoundaryPairTable t = boundary_pair_stats(enc, tok.vocab);
    CHECK(t.total == expected);
    uint64_t summed = 0;
    for (uint64_t c : t.counts) summed += c;
    CHECK(summed == t.total);
}

TEST_CASE("spearman handles monotone, tied and hand-computed inputs") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> inc{10, 20, 30, 40, 50};
    CHECK(spearman(x, inc).rho == doctest::Approx(1.0));

    std::vector<double> dec{5, 4, 3, 2, 1};
    CHECK(spearman(x, dec).rho == doctest::Approx(-1.0));

    // any strictly monotone rescaling leaves rho untouched
    std::vector<double> warped{1e-3, 2.5, 100, 1e4, 5e7};
    CHECK(spearman(x, warped).rho == doctest::Approx(1.0));

    std::vector<double> y{2, 1, 4, 3, 5};
    CHECK(spearman(x, y).rho == doctest::Approx(0.8));

    std::vector<double> xt{1, 1, 2};
    std::vector<double> yt{1, 2, 3};
    CHECK(spearman(xt, yt).rho == doctest::Approx(1.5 / std::sqrt(3.0)));
}

TEST_CASE("constant inputs flag degeneracy instead of failing") {
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> flat{7, 7, 7, 7};
    SpearmanResult r = spearman(x, flat);
    CHECK(r.degenerate);
    CHECK(r.rho == doctest::Approx(0.0));
}

TEST_CASE("spearman input validation") {
    std::vector<double> two{1, 2};
    CHECK_THROWS_AS(spearman(two, two), DataError);
    std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(spearman(three, two), DataError);
}

TEST_CASE("permutation p-value is small for monotone data, large for noise") {
    std::vector<double> x, monotone, noise;
    RandomStream gen = derive_stream({44, "perm"}, 0);
    for (int i = 0; i < 60; ++i) {
        x.push_back(i);
        monotone.push_back(i * 2.0 + 1);
        noise.push_back(gen.next_double());
    }
    double p_mono =
        spearman_permutation_pvalue(x, monotone, 999, derive_stream({44, "perm"}, 1));
    CHECK(p_mono == doctest::Approx(1.0 / 1000.0));
    double p_noise =
        spearman_permutation_pvalue(x, noise, 999, derive_stream({44, "perm"}, 2));
    CHECK(p_noise > 0.01);
}

TEST_CASE("strength-frequency correlation is exact on a constructed table") {
    // frequencies strictly increasing with rank position -> rho exactly 1
    auto merges = testutil::make_table({{"a", "b"}, {"b", "c"}, {"c", "a"}});
    BoundaryPairTable table;
    table.counts[static_cast<size_t>('a') * 256 + 'b'] = 1;
    table.counts[static_cast<size_t>('b') * 256 + 'c'] = 5;
    table.counts[static_cast<size_t>('c') * 256 + 'a'] = 9;
    table.total = 15;
    BoundaryCorrelation corr = correlate_strength_frequency(table, merges);
    CHECK(corr.correlation.rho == doctest::Approx(1.0));
    CHECK(corr.rows.size() == 3);

    // constant frequencies -> degenerate flag, rho 0
    BoundaryPairTable flat;
    flat.counts[static_cast<size_t>('a') * 256 + 'b'] = 2;
    flat.counts[static_cast<size_t>('b') * 256 + 'c'] = 2;
    flat.counts[static_cast<size_t>('c') * 256 + 'a'] = 2;
    flat.total = 6;
    BoundaryCorrelation flat_corr = correlate_strength_frequency(flat, merges);
    CHECK(flat_corr.correlation.degenerate);
    CHECK(flat_corr.correlation.rho == doctest::Approx(0.0));
}

TEST_CASE("counted pairs without a rule rank weakest") {
    auto merges = testutil::make_table({{"a", "b"}, {"b", "c"}});
    merges.add_base_symbol("z");
    BoundaryPairTable table;
    table.counts[static_cast<size_t>('a') * 256 + 'b'] = 1;
    table.counts[static_cast<size_t>('b') * 256 + 'c'] = 2;
    table.counts[static_cast<size_t>('z') * 256 + 'z'] = 30;
    table.total = 33;
    BoundaryCorrelation corr = correlate_strength_frequency(table, merges);
    REQUIRE(corr.rows.size() == 3);
    CHECK(corr.rows.back().left == 'z');
    CHECK(corr.rows.back().rank_position == merges.rule_count());
    CHECK(corr.correlation.rho == doctest::Approx(1.0));
}

TEST_CASE("fewer than three pairs is an error") {
    auto merges = testutil::make_table({{"a", "b"}});
    BoundaryPairTable table;
    table.counts[static_cast<size_t>('a') * 256 + 'b'] = 1;
    CHECK_THROWS_AS(correlate_strength_frequency(table, merges), DataError);
}

TEST_CASE("boundary csv and svg writers emit the pinned formats") {
    testutil::TempDir tmp;
    auto merges = testutil::make_table({{"a", "b"}, {"b", "c"}, {"c", "a"}});
    BoundaryPairTable table;
    table.counts[static_cast<size_t>('a') * 256 + 'b'] = 1;
    table.counts[static_cast<size_t>('b') * 256 + 'c'] = 5;
    table.counts[static_cast<size_t>('c') * 256 + 'a'] = 9;
    BoundaryCorrelation corr = correlate_strength_frequency(table, merges);

    write_boundary_csv(corr, tmp.file("b.csv"));
    std::ifstream in(tmp.file("b.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "left_char,right_char,merge_rank,frequency");
    std::getline(in, line);
    CHECK(line == "a,b,0,1");

    write_scatter_svg(corr, tmp.file("b.svg"), "boundary scatter");
    std::ifstream svg(tmp.file("b.svg"));
    std::stringstream buf;
    buf << svg.rdbuf();
    CHECK(buf.str().find("<svg") != std::string::npos);
    CHECK(buf.str().find("circle") != std::string::npos);
}

TEST_CASE("observed target segmentations always satisfy their condition") {
    // random search until each pattern's target occurs at least once
    int hits[4] = {0, 0, 0, 0};
    RandomStream stream = derive_stream({66, "conditions"}, 0);
    for (uint64_t t = 0; t < 4000; ++t) {
        RandomStream trial = stream.fork(t);
        RandomStream table_stream = trial.fork(0);
        Tokenizer tok = build_controlled_tokenizer(table_stream, 5);
        RandomStream bind = trial.fork(1);
        auto letter = [&] { return static_cast<char>('a' + bind.next_below(5)); };
        ConditionCase c{ConditionPattern::kMarker23, letter(), letter(),
                        letter(), letter(), letter(), letter()};
        for (int p = 0; p < 4; ++p) {
            c.pattern = static_cast<ConditionPattern>(p);
            ConditionOutcome out = check_condition(c, tok.merges);
            CHECK(out.implication_ok);
            if (out.target_matched) {
                CHECK(out.condition_holds);
                hits[p]++;
            }
        }
    }
    // the search must actually have exercised each pattern's target
    for (int p = 0; p < 4; ++p) {
        CAPTURE(p);
        CHECK(hits[p] > 0);
    }
}

TEST_CASE("non-matching bindings are vacuously fine") {
    RandomStream stream = derive_stream({67, "conditions"}, 0);
    Tokenizer tok = build_controlled_tokenizer(stream, 4);
    // find a case whose segmentation does not match the target
    bool found_vacuous = false;
    RandomStream bind = derive_stream({67, "bind"}, 0);
    for (int t = 0; t < 200 && !found_vacuous; ++t) {
        auto letter = [&] { return static_cast<char>('a' + bind.next_below(4)); };
        ConditionCase c{ConditionPattern::kMarker23, letter(), letter(),
                        letter(), letter(), letter(), letter()};
        ConditionOutcome out = check_condition(c, tok.merges);
        if (!out.target_matched) {
            CHECK(out.implication_ok);
            found_vacuous = true;
        }
    }
    CHECK(found_vacuous);
}

TEST_CASE("a dominating middle merge blocks the marker-3+2 target") {
    // when strength(x, gamma) beats both neighbours the target segmentation
    // cannot occur
    RandomStream stream = derive_stream({68, "conditions"}, 0);
    int dominated_cases = 0;
    for (uint64_t t = 0; t < 3000; ++t) {
        RandomStream trial = stream.fork(t);
        RandomStream table_stream = trial.fork(0);
        Tokenizer tok = build_controlled_tokenizer(table_stream, 5);
        RandomStream bind = trial.fork(1);
        auto letter = [&] { return static_cast<char>('a' + bind.next_below(5)); };
        ConditionCase c{ConditionPattern::kMarker32, letter(), letter(),
                        letter(), letter(), letter(), letter()};
        auto s = [&](char a, char b) {
            return tok.merges.strength(std::string(1, a), std::string(1, b));
        };
        bool dominated =
            s(c.x, c.gamma) > s(c.beta, c.x) && s(c.x, c.gamma) > s(c.gamma, c.delta);
        if (!dominated) continue;
        ++dominated_cases;
        ConditionOutcome out = check_condition(c, tok.merges);
        CHECK_FALSE(out.target_matched);
    }
    CHECK(dominated_cases > 100);
}

TEST_CASE("unbound letters are rejected") {
    RandomStream stream = derive_stream({69, "conditions"}, 0);
    Tokenizer tok = build_controlled_tokenizer(stream, 3); // a, b, c only
    ConditionCase c{ConditionPattern::kPlain32, 'a', 'b', 'z', 'a', 'b', 'c'};
    CHECK_THROWS_AS(check_condition(c, tok.merges), DataError);
}

TEST_CASE("bulk enumeration sees zero violations and is deterministic") {
    ConditionReport a = enumerate_conditions(4, 2000, derive_stream({70, "enum"}, 0));
    CHECK(a.total_violations() == 0);
    for (const auto& p : a.patterns) {
        CHECK(p.trials == 2000);
        CHECK(p.target_hits > 0);
    }

    ConditionReport b = enumerate_conditions(4, 2000, derive_stream({70, "enum"}, 0));
    for (size_t i = 0; i < 4; ++i) {
        CHECK(a.patterns[i].target_hits == b.patterns[i].target_hits);
        CHECK(a.patterns[i].violations == b.patterns[i].violations);
    }

    ConditionReport empty = enumerate_conditions(4, 0, derive_stream({70, "enum"}, 1));
    CHECK(empty.total_violations() == 0);
    CHECK(empty.patterns[0].trials == 0);
}

TEST_CASE("condition csv has one line per pattern") {
    testutil::TempDir tmp;
    ConditionReport r = enumerate_conditions(3, 50, derive_stream({71, "enum"}, 0));
    write_condition_csv(r, tmp.file("c.csv"));
    std::ifstream in(tmp.file("c.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "pattern,trials,violations");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("alphabet size bounds are enforced") {
    CHECK_THROWS_AS(enumerate_conditions(2, 10, derive_stream({72, "enum"}, 0)),
                    DataError);
    CHECK_THROWS_AS(enumerate_conditions(9, 10, derive_stream({72, "enum"}, 0)),
                    DataError);
}
