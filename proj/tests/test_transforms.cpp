#include <doctest.h>

#include <cctype>
#include <fstream>
#include <set>
#include <unordered_map>

#include "charprobe/error.hpp"
#include "charprobe/transforms.hpp"
#include "test_util.hpp"

using namespace charprobe;

namespace {
const std::string kG(kSpaceMarker);
}

TEST_CASE("charpert keeps the length and non-letter skeleton") {
    const std::string text = "she dreams she is dreaming.";
    RandomStream stream = derive_stream({42, "charpert"}, 0);
    std::string out = charpert(text, stream);
    REQUIRE(out.size() == text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char o = static_cast<unsigned char>(text[i]);
        unsigned char n = static_cast<unsigned char>(out[i]);
        if (std::isalpha(o)) {
            CHECK(std::isalpha(n));
            CHECK(static_cast<bool>(std::isupper(o)) == static_cast<bool>(std::isupper(n)));
        } else {
            CHECK(n == o);
        }
    }
}

TEST_CASE("charpert fixes non-alphabetic text") {
    RandomStream stream = derive_stream({42, "charpert"}, 0);
    CHECK(charpert("123 !?", stream) == "123 !?");
}

TEST_CASE("charpert preserves case classes") {
    RandomStream stream = derive_stream({1, "charpert"}, 0);
    std::string out = charpert("AbC dEf", stream);
    CHECK(std::isupper(static_cast<unsigned char>(out[0])));
    CHECK(std::islower(static_cast<unsigned char>(out[1])));
    CHECK(std::isupper(static_cast<unsigned char>(out[2])));
    CHECK(out[3] == ' ');
}

TEST_CASE("charpert draws uniformly over the 26 letters") {
    // fresh stream per draw, as per-document derivation would produce
    std::vector<uint64_t> bins(26, 0);
    const uint64_t n = 10000;
    for (uint64_t i = 0; i < n; ++i) {
        RandomStream stream = derive_stream({99, "charpert"}, i);
        std::string out = charpert("A", stream);
        REQUIRE(out.size() == 1);
        REQUIRE(out[0] >= 'A');
        REQUIRE(out[0] <= 'Z');
        bins[static_cast<size_t>(out[0] - 'A')]++;
    }
    // chi-square with 25 dof; 99.9% quantile is 52.6
    CHECK(testutil::chi_square_uniform(bins, n) < 52.6);
}

TEST_CASE("charpert_corpus is reproducible and parallel-safe") {
    Corpus corpus;
    for (int i = 0; i < 50; ++i)
        corpus.documents.push_back("line " + std::to_string(i) + " of text");
    Corpus a = charpert_corpus(corpus, {5, "charpert"});
    Corpus b = charpert_corpus(corpus, {5, "charpert"});
    CHECK(a.documents == b.documents);
    Corpus c = charpert_corpus(corpus, {6, "charpert"});
    CHECK(a.documents != c.documents);
}

TEST_CASE("wordsub replacements preserve shape and are injective") {
    std::vector<std::string> types = {"she", "dreams", "is", "dreaming", "Cat", "it's"};
    // note: "it's" is not a single alphabetic run; collect_word_types would
    // split it, but the map builder accepts any shape and keeps the apostrophe
    WordSubMap map = build_wordsub_map(types, {11, "wordsub"});
    REQUIRE(map.mapping.size() == types.size());
    std::set<std::string> seen;
    for (const auto& t : types) {
        const std::string& r = map.mapping.at(t);
        REQUIRE(r.size() == t.size());
        for (size_t i = 0; i < t.size(); ++i) {
            unsigned char o = static_cast<unsigned char>(t[i]);
            unsigned char n = static_cast<unsigned char>(r[i]);
            if (std::isalpha(o))
                CHECK(static_cast<bool>(std::isupper(o)) ==
                      static_cast<bool>(std::isupper(n)));
            else
                CHECK(n == o);
        }
        CHECK(seen.insert(r).second); // injective
    }
}

TEST_CASE("wordsub is deterministic per seed") {
    std::vector<std::string> types = {"alpha", "beta", "gamma"};
    WordSubMap a = build_wordsub_map(types, {3, "wordsub"});
    WordSubMap b = build_wordsub_map(types, {3, "wordsub"});
    CHECK(a.mapping == b.mapping);
    WordSubMap c = build_wordsub_map(types, {4, "wordsub"});
    CHECK(a.mapping != c.mapping);
}

TEST_CASE("26 single-letter types fill the space exactly") {
    std::vector<std::string> types;
    for (char c = 'a'; c <= 'z'; ++c) types.emplace_back(1, c);
    WordSubMap map = build_wordsub_map(types, {1, "wordsub"});
    std::set<std::string> values;
    for (const auto& [word, repl] : map.mapping) values.insert(repl);
    CHECK(values.size() == 26); // a permutation of the alphabet

    types.push_back("aa"); // different shape, fine
    CHECK_NOTHROW(build_wordsub_map(types, {1, "wordsub"}));
}

TEST_CASE("a 27th distinct single-letter type cannot be placed") {
    // case is folded when drawing, so 26 lowercase plus one uppercase
    // single-letter type overflows the 26 available draws
    std::vector<std::string> types;
    for (char c = 'a'; c <= 'z'; ++c) types.emplace_back(1, c);
    types.push_back("A");
    CHECK_THROWS_WITH_AS(build_wordsub_map(types, {1, "wordsub"}),
                         doctest::Contains("27"), DataError);
}

TEST_CASE("repeated words substitute consistently") {
    Corpus corpus;
    corpus.documents.push_back("she dreams she is dreaming.");
    auto types = collect_word_types(corpus);
    WordSubMap map = build_wordsub_map(types, {21, "wordsub"});
    std::string out = wordsub_apply(corpus.documents[0], map);

    auto words = [](const std::string& text) {
        std::vector<std::string> w;
        std::string cur;
        for (char c : text) {
            if (std::isalpha(static_cast<unsigned char>(c))) {
                cur.push_back(c);
            } else if (!cur.empty()) {
                w.push_back(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) w.push_back(cur);
        return w;
    };
    auto in_words = words(corpus.documents[0]);
    auto out_words = words(out);
    REQUIRE(in_words.size() == out_words.size());
    CHECK(out_words[0] == out_words[2]); // both "she"
    CHECK(out.back() == '.');
    CHECK(out[3] == ' ');
}

TEST_CASE("wordsub with a hand-built map reproduces the expected sentence") {
    WordSubMap map;
    map.mapping = {{"she", "wij"},
                   {"dreams", "gkaswd"},
                   {"is", "dj"},
                   {"dreaming", "qwdmfans"}};
    CHECK(wordsub_apply("she dreams she is dreaming.", map) ==
          "wij gkaswd wij dj qwdmfans.");
    CHECK(wordsub_apply(".", map) == ".");
}

TEST_CASE("unmapped word types are reported by name") {
    WordSubMap map;
    map.mapping = {{"known", "zzzzz"}};
    CHECK_THROWS_WITH_AS(wordsub_apply("known unknown", map),
                         doctest::Contains("unknown"), DataError);
}

TEST_CASE("wordsub inversion recovers the original corpus") {
    Corpus corpus;
    corpus.documents.push_back("the cat sat on the mat, twice.");
    corpus.documents.push_back("more CATS and Cats arrive!");
    auto types = collect_word_types(corpus);
    WordSubMap map = build_wordsub_map(types, {8, "wordsub"});
    Corpus transformed = wordsub_corpus(corpus, map);
    CHECK(transformed.documents != corpus.documents);
    Corpus recovered = wordsub_corpus(transformed, map.inverted());
    CHECK(recovered.documents == corpus.documents);
}

TEST_CASE("wordsub preserves the distinct type count") {
    Corpus corpus;
    corpus.documents.push_back("one two three two one four five six");
    auto types = collect_word_types(corpus);
    WordSubMap map = build_wordsub_map(types, {13, "wordsub"});
    Corpus transformed = wordsub_corpus(corpus, map);
    CHECK(collect_word_types(transformed).size() == types.size());
}

TEST_CASE("token substitution preserves marker flag and length per position") {
    Tokenizer tok = build_controlled_tokenizer(SeedSpec{17, "controlled"});
    Corpus corpus;
    corpus.documents.push_back("def ac def qda");
    TokenizedCorpus enc = encode_corpus(corpus, TokenizerKind::kControlled, tok.vocab,
                                        &tok.merges);
    RandomStream stream = derive_stream({17, "toksub"}, 0);
    TokenizedCorpus sub = token_substitute(enc, tok.vocab, stream);
    REQUIRE(sub.documents.size() == enc.documents.size());
    for (size_t d = 0; d < enc.documents.size(); ++d) {
        REQUIRE(sub.documents[d].size() == enc.documents[d].size());
        for (size_t i = 0; i < enc.documents[d].size(); ++i) {
            const std::string& before = tok.vocab.token_of(enc.documents[d][i]);
            const std::string& after = tok.vocab.token_of(sub.documents[d][i]);
            CHECK(has_marker(before) == has_marker(after));
            CHECK(token_alpha_length(before) == token_alpha_length(after));
        }
    }
}

TEST_CASE("token substitution of an empty corpus is empty") {
    Tokenizer tok = build_controlled_tokenizer(SeedSpec{17, "controlled"}, 3);
    TokenizedCorpus empty;
    RandomStream stream = derive_stream({17, "toksub"}, 0);
    CHECK(token_substitute(empty, tok.vocab, stream).documents.empty());
    TokenizedCorpus one_empty_doc;
    one_empty_doc.documents.push_back({});
    CHECK(token_substitute(one_empty_doc, tok.vocab, stream).documents[0].empty());
}

TEST_CASE("token substitution draws uniformly within a class") {
    // replacements of a fixed marker+3 token over 1e6 draws, chi-squared
    // against uniform across all 17,576 candidates
    Tokenizer tok = build_controlled_tokenizer(SeedSpec{23, "controlled"});
    int32_t probe = *tok.vocab.id_of(kG + "abc");
    TokenizedCorpus corpus;
    corpus.documents.push_back(std::vector<int32_t>(1000000, probe));
    RandomStream stream = derive_stream({23, "toksub"}, 0);
    TokenizedCorpus sub = token_substitute(corpus, tok.vocab, stream);

    std::unordered_map<int32_t, uint64_t> histogram;
    for (int32_t id : sub.documents[0]) histogram[id]++;
    std::vector<uint64_t> bins;
    bins.reserve(17576);
    uint64_t total = 0;
    for (size_t id = 0; id < tok.vocab.size(); ++id) {
        const std::string& token = tok.vocab.token_of(static_cast<int32_t>(id));
        if (has_marker(token) && token_alpha_length(token) == 3) {
            auto it = histogram.find(static_cast<int32_t>(id));
            uint64_t c = it == histogram.end() ? 0 : it->second;
            bins.push_back(c);
            total += c;
        }
    }
    REQUIRE(bins.size() == 17576);
    CHECK(total == 1000000);
    // chi-square df = 17575: mean 17575, sd ~187.5; 18500 is ~4.9 sigma
    CHECK(testutil::chi_square_uniform(bins, total) < 18500.0);
}

TEST_CASE("lemma map lookups fall back to identity") {
    testutil::TempDir tmp;
    {
        std::ofstream out(tmp.file("lemmas.tsv"));
        out << "# comment line\n";
        out << "dreams\tdream\n";
        out << "walked\twalk\n";
    }
    LemmaMap map = load_lemma_map(tmp.file("lemmas.tsv"));
    CHECK(lemmatize("dreams", map) == "dream");
    CHECK(lemmatize("walked", map) == "walk");
    CHECK(lemmatize("qwerty", map) == "qwerty");
}

TEST_CASE("shipped lemma resource loads and covers the basics") {
    LemmaMap map = load_lemma_map(std::string(CHARPROBE_DATA_DIR) + "/lemmas_en.tsv");
    CHECK(map.mapping.size() > 200);
    CHECK(lemmatize("dreams", map) == "dream");
    CHECK(lemmatize("walked", map) == "walk");
    CHECK(lemmatize("children", map) == "child");
}

TEST_CASE("malformed lemma files are rejected") {
    testutil::TempDir tmp;
    {
        std::ofstream out(tmp.file("bad.tsv"));
        out << "nodelimiter\n";
    }
    CHECK_THROWS_AS(load_lemma_map(tmp.file("bad.tsv")), DataError);
    {
        std::ofstream out(tmp.file("dup.tsv"));
        out << "a\tb\na\tc\n";
    }
    CHECK_THROWS_AS(load_lemma_map(tmp.file("dup.tsv")), DataError);
}

TEST_CASE("corpus-level stemming and lemmatization keep the skeleton") {
    Corpus corpus;
    corpus.documents.push_back("She dreams, walked quickly!");
    Corpus stemmed = stem_corpus(corpus);
    CHECK(stemmed.documents[0].back() == '!');
    CHECK(stemmed.documents[0].find(',') != std::string::npos);
    CHECK(stemmed.documents[0] == "she dream, walk quickli!");

    LemmaMap map;
    map.mapping = {{"dreams", "dream"}, {"walked", "walk"}};
    Corpus lemmed = lemma_corpus(corpus, map);
    CHECK(lemmed.documents[0] == "She dream, walk quickly!");
}
