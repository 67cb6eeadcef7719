#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "charprobe/corpus.hpp"
#include "charprobe/rng.hpp"
#include "charprobe/tokenizer.hpp"

namespace charprobe {

// --- character perturbation --------------------------------------------
//
// Every ASCII letter is independently replaced by a uniformly random letter
// of the same case (a replacement may equal the original). Everything else
// is a fixed point, so |output| == |input| and the space/punctuation
// skeleton is preserved.

std::string charpert(std::string_view document, RandomStream& stream);

// Corpus-wide variant; document i draws from derive_stream(seed, i), so
// documents can be processed in parallel with identical results.
Corpus charpert_corpus(const Corpus& corpus, const SeedSpec& seed);

// --- word substitution ---------------------------------------------------
//
// Type-level replacement: each word type maps to a unique random string of
// the same alphabetic length, case pattern re-applied, non-letters passed
// through. Injective on its domain.

struct WordSubMap {
    std::unordered_map<std::string, std::string> mapping;

    // Swaps keys and values; valid because the mapping is injective.
    WordSubMap inverted() const;
};

// Word types = maximal ASCII-alphabetic runs, sorted.
std::vector<std::string> collect_word_types(const Corpus& corpus);

WordSubMap build_wordsub_map(const std::vector<std::string>& types, const SeedSpec& seed);

// Replaces every maximal alphabetic run via the map; punctuation, digits and
// whitespace pass through. Throws naming any unmapped word type.
std::string wordsub_apply(std::string_view document, const WordSubMap& map);
Corpus wordsub_corpus(const Corpus& corpus, const WordSubMap& map);

// --- random token substitution -------------------------------------------
//
// Each token occurrence is independently replaced by a uniformly random
// vocabulary token with the same leading-marker flag and letter count.
// Document i draws from stream.fork(i).

TokenizedCorpus token_substitute(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                                 const RandomStream& stream);

// --- suffix stripping ------------------------------------------------------

// Porter stemmer over ASCII lowercase words; anything containing a
// non-lowercase-letter byte passes through unchanged.
std::string porter_stem(std::string_view word);

// --- lemmatization ---------------------------------------------------------

struct LemmaMap {
    std::unordered_map<std::string, std::string> mapping;
};

// TSV resource, "inflected<TAB>lemma" per line; '#' lines are comments.
LemmaMap load_lemma_map(const std::string& path);

// map[word] when present, otherwise the word unchanged. Exact-match lookup.
std::string lemmatize(std::string_view word, const LemmaMap& map);

// Corpus transforms applying porter_stem / lemmatize to every maximal
// alphabetic run. Stemming lowercases runs first (the stemmer is defined on
// lowercase input); lemmatization looks up runs verbatim.
Corpus stem_corpus(const Corpus& corpus);
Corpus lemma_corpus(const Corpus& corpus, const LemmaMap& map);

} // namespace charprobe
