#include "charprobe/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "charprobe/error.hpp"
#include "charprobe/parallel.hpp"

namespace charprobe {

namespace {

bool is_ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

} // namespace

std::string charpert(std::string_view document, RandomStream& stream) {
    std::string out(document);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z')
            c = stream.next_lowercase();
        else if (c >= 'A' && c <= 'Z')
            c = stream.next_uppercase();
    }
    return out;
}

Corpus charpert_corpus(const Corpus& corpus, const SeedSpec& seed) {
    Corpus out;
    out.documents.resize(corpus.documents.size());
    parallel_for(corpus.documents.size(), [&](size_t i) {
        RandomStream stream = derive_stream(seed, i);
        out.documents[i] = charpert(corpus.documents[i], stream);
    });
    return out;
}

WordSubMap WordSubMap::inverted() const {
    WordSubMap inv;
    inv.mapping.reserve(mapping.size());
    for (const auto& [word, repl] : mapping) {
        if (!inv.mapping.emplace(repl, word).second)
            throw DataError("word substitution map is not injective at: " + repl);
    }
    return inv;
}

std::vector<std::string> collect_word_types(const Corpus& corpus) {
    std::set<std::string> types;
    for (const auto& doc : corpus.documents) {
        size_t i = 0;
        while (i < doc.size()) {
            if (!is_ascii_alpha(doc[i])) {
                ++i;
                continue;
            }
            size_t start = i;
            while (i < doc.size() && is_ascii_alpha(doc[i])) ++i;
            types.insert(doc.substr(start, i - start));
        }
    }
    return {types.begin(), types.end()};
}

namespace {

// Lowercase draw with non-letter positions fixed; the case pattern of the
// original is applied separately.
std::string draw_lower(const std::string& word, RandomStream& stream) {
    std::string repl(word);
    for (char& c : repl)
        if (is_ascii_alpha(c)) c = stream.next_lowercase();
    return repl;
}

// Advances the letters like an odometer, wrapping around; non-letter
// positions are fixed.
void advance_lower(std::string& repl) {
    for (size_t i = repl.size(); i-- > 0;) {
        char& c = repl[i];
        if (c >= 'a' && c < 'z') { ++c; return; }
        if (c == 'z') { c = 'a'; continue; }
    }
}

std::string apply_case_pattern(const std::string& word, const std::string& lower) {
    std::string out(lower);
    for (size_t i = 0; i < word.size(); ++i)
        if (word[i] >= 'A' && word[i] <= 'Z')
            out[i] = static_cast<char>(out[i] - 'a' + 'A');
    return out;
}

// Replacements are drawn in a case-folded space, so types differing only in
// case compete for the same 26^letters slots.
std::string folded_skeleton(const std::string& word) {
    std::string s(word);
    for (char& c : s)
        if (is_ascii_alpha(c)) c = 'a';
    return s;
}

double skeleton_capacity(const std::string& skeleton) {
    double cap = 1.0;
    for (char c : skeleton)
        if (c == 'a') cap *= 26.0;
    return cap;
}

} // namespace

WordSubMap build_wordsub_map(const std::vector<std::string>& types, const SeedSpec& seed) {
    std::vector<std::string> ordered(types);
    std::sort(ordered.begin(), ordered.end());
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

    // Collisions are only possible between types sharing a folded skeleton;
    // reject upfront any skeleton with more types than available slots.
    std::unordered_map<std::string, uint64_t> skeleton_counts;
    for (const auto& word : ordered) skeleton_counts[folded_skeleton(word)]++;
    for (const auto& [skel, count] : skeleton_counts) {
        if (static_cast<double>(count) > skeleton_capacity(skel)) {
            std::string listing;
            for (const auto& word : ordered) {
                if (folded_skeleton(word) != skel) continue;
                if (!listing.empty()) listing += ", ";
                listing += word;
                if (listing.size() > 200) { listing += ", ..."; break; }
            }
            throw DataError("cannot assign unique replacements for " +
                            std::to_string(count) + " word types of shape '" + skel +
                            "': " + listing);
        }
    }

    RandomStream stream = derive_stream(seed, 0);
    WordSubMap map;
    map.mapping.reserve(ordered.size());
    std::unordered_map<std::string, std::set<std::string>> used_by_skeleton;

    for (const auto& word : ordered) {
        auto& used = used_by_skeleton[folded_skeleton(word)];
        std::string lower = draw_lower(word, stream);
        int attempts = 0;
        while (used.count(lower)) {
            if (++attempts < 64) {
                lower = draw_lower(word, stream);
            } else {
                // dense class: walk deterministically to the next free slot
                advance_lower(lower);
            }
        }
        used.insert(lower);
        map.mapping.emplace(word, apply_case_pattern(word, lower));
    }
    return map;
}

std::string wordsub_apply(std::string_view document, const WordSubMap& map) {
    std::string out;
    out.reserve(document.size());
    size_t i = 0;
    while (i < document.size()) {
        if (!is_ascii_alpha(document[i])) {
            out.push_back(document[i]);
            ++i;
            continue;
        }
        size_t start = i;
        while (i < document.size() && is_ascii_alpha(document[i])) ++i;
        std::string word(document.substr(start, i - start));
        auto it = map.mapping.find(word);
        if (it == map.mapping.end())
            throw DataError("word type not in substitution map: " + word);
        out.append(it->second);
    }
    return out;
}

Corpus wordsub_corpus(const Corpus& corpus, const WordSubMap& map) {
    Corpus out;
    out.documents.resize(corpus.documents.size());
    parallel_for(corpus.documents.size(), [&](size_t i) {
        out.documents[i] = wordsub_apply(corpus.documents[i], map);
    });
    return out;
}

TokenizedCorpus token_substitute(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                                 const RandomStream& stream) {
    // (marker flag, letter count) -> candidate ids, in id order
    std::unordered_map<uint64_t, std::vector<int32_t>> buckets;
    auto class_key = [](std::string_view token) {
        return (static_cast<uint64_t>(has_marker(token)) << 32) |
               static_cast<uint64_t>(token_alpha_length(token));
    };
    for (size_t id = 0; id < vocab.size(); ++id)
        buckets[class_key(vocab.token_of(static_cast<int32_t>(id)))].push_back(
            static_cast<int32_t>(id));

    TokenizedCorpus out;
    out.documents.resize(corpus.documents.size());
    parallel_for(corpus.documents.size(), [&](size_t d) {
        RandomStream doc_stream = stream.fork(d);
        const auto& doc = corpus.documents[d];
        std::vector<int32_t> repl;
        repl.reserve(doc.size());
        for (int32_t id : doc) {
            const auto& bucket = buckets.at(class_key(vocab.token_of(id)));
            repl.push_back(bucket[doc_stream.next_below(bucket.size())]);
        }
        out.documents[d] = std::move(repl);
    });
    return out;
}

LemmaMap load_lemma_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open lemma map: " + path);
    LemmaMap map;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
            throw DataError("malformed lemma map line " + std::to_string(lineno) +
                            " in " + path);
        std::string inflected = line.substr(0, tab);
        std::string lemma = line.substr(tab + 1);
        if (!map.mapping.emplace(std::move(inflected), std::move(lemma)).second)
            throw DataError("duplicate lemma map key at line " + std::to_string(lineno) +
                            " in " + path);
    }
    return map;
}

std::string lemmatize(std::string_view word, const LemmaMap& map) {
    auto it = map.mapping.find(std::string(word));
    return it == map.mapping.end() ? std::string(word) : it->second;
}

namespace {

template <typename Fn>
std::string map_alpha_runs(std::string_view document, Fn&& fn) {
    std::string out;
    out.reserve(document.size());
    size_t i = 0;
    while (i < document.size()) {
        if (!is_ascii_alpha(document[i])) {
            out.push_back(document[i]);
            ++i;
            continue;
        }
        size_t start = i;
        while (i < document.size() && is_ascii_alpha(document[i])) ++i;
        out.append(fn(document.substr(start, i - start)));
    }
    return out;
}

} // namespace

Corpus stem_corpus(const Corpus& corpus) {
    Corpus out;
    out.documents.resize(corpus.documents.size());
    parallel_for(corpus.documents.size(), [&](size_t i) {
        out.documents[i] = map_alpha_runs(corpus.documents[i], [](std::string_view run) {
            std::string lower(run);
            for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return porter_stem(lower);
        });
    });
    return out;
}

Corpus lemma_corpus(const Corpus& corpus, const LemmaMap& map) {
    Corpus out;
    out.documents.resize(corpus.documents.size());
    parallel_for(corpus.documents.size(), [&](size_t i) {
        out.documents[i] = map_alpha_runs(corpus.documents[i], [&](std::string_view run) {
            return lemmatize(run, map);
        });
    });
    return out;
}

} // namespace charprobe
