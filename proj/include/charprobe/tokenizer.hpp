#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "charprobe/corpus.hpp"
#include "charprobe/rng.hpp"

namespace charprobe {

// U+0120, the leading-whitespace marker. Appears only token-initially.
inline constexpr std::string_view kSpaceMarker = "\xC4\xA0";

// True if the token begins with the marker; rest() strips it.
bool has_marker(std::string_view token);
std::string_view strip_marker(std::string_view token);

// Letter count of a token, marker excluded.
size_t token_alpha_length(std::string_view token);

// Merge-rule construction stages of the fixed tokenizer, in priority order:
// marker+1 letter, 2 letters, marker+2, 3 letters, marker+3. Trained tables
// carry kNone.
enum class MergeStage : uint8_t { kMarker1, kChar2, kMarker2, kChar3, kMarker3, kNone };

const char* merge_stage_name(MergeStage stage);

struct MergeRule {
    std::string left;
    std::string right;
    uint32_t rank = 0; // 0 = highest priority
    MergeStage stage = MergeStage::kNone;
};

// Ordered merge rules with O(1) pair-to-rank lookup. Ranks are unique and
// contiguous from 0; greedy application is a pure function of (word, table).
class MergeTable {
public:
    void add_rule(std::string left, std::string right, MergeStage stage = MergeStage::kNone);
    void add_base_symbol(std::string symbol);

    const std::vector<MergeRule>& rules() const { return rules_; }
    size_t rule_count() const { return rules_.size(); }

    std::optional<uint32_t> rank_of(std::string_view left, std::string_view right) const;

    // Strength orders inversely to rank: rank 0 is strongest. Absent pairs
    // get kNoRuleStrength, strictly below every present pair.
    static constexpr int64_t kNoRuleStrength = std::numeric_limits<int64_t>::min();
    int64_t strength(std::string_view left, std::string_view right) const;

    bool covers_symbol(std::string_view symbol) const;
    const std::unordered_set<std::string>& base_symbols() const { return base_symbols_; }

    bool stage_major = false; // set for explicitly constructed tables

private:
    std::vector<MergeRule> rules_;
    std::unordered_map<std::string, uint32_t> rank_by_pair_; // "left right"
    std::unordered_set<std::string> base_symbols_;
};

// Token string <-> contiguous integer id. Enforces the marker-position
// invariant on insert.
class Vocabulary {
public:
    int32_t add(std::string token); // throws on duplicate or misplaced marker
    std::optional<int32_t> id_of(std::string_view token) const;
    const std::string& token_of(int32_t id) const;
    size_t size() const { return id_to_token_.size(); }
    const std::vector<std::string>& tokens() const { return id_to_token_; }

    // FNV-1a over the canonical vocab-file bytes (token + LF per line).
    uint64_t content_hash() const;

private:
    std::unordered_map<std::string, int32_t> token_to_id_;
    std::vector<std::string> id_to_token_;
};

struct Tokenizer {
    Vocabulary vocab;
    MergeTable merges;
};

// Token ids per document. Pairs with the Vocabulary that produced it.
struct TokenizedCorpus {
    std::vector<std::vector<int32_t>> documents;

    size_t token_count() const;
};

// --- pretokenization -------------------------------------------------------
//
// Documents are split on whitespace runs; a word carries the marker exactly
// when whitespace precedes it. Detokenization concatenates and maps the
// marker back to a single space, so single-spaced text round-trips exactly.

std::vector<std::string> pretokenize(std::string_view text);
std::string detokenize(const std::vector<std::string>& tokens);

// --- tokenizers ------------------------------------------------------------

// Greedy merge application: the applicable rule with the smallest rank fires
// first, leftmost occurrence first, until no rule applies. Throws DataError
// naming any symbol the table's base alphabet cannot cover.
std::vector<std::string> apply_merges(std::string_view word, const MergeTable& table);

// Frequency-trained merge table over pretokenized words. Equal-frequency
// pairs are broken lexicographically by (left, right). Vocabulary ids:
// base symbols in lexicographic order, then merge outputs in rank order.
Tokenizer train_bpe(const Corpus& corpus, size_t vocab_size);

// Fixed tokenizer: every 1..3-letter string over the first alphabet_size
// lowercase letters, with and without the marker. 3-letter tokens derive as
// (2 letters, 1 letter); marker+3 tokens as (marker+1, 2 letters). Rule
// order is shuffled within each stage by streams derived from seed; ranks
// are stage-major. For the full alphabet the vocabulary has 36,556 tokens.
Tokenizer build_controlled_tokenizer(const SeedSpec& seed, int alphabet_size = 26);

// Same construction but drawing stage shuffles from forks of an existing
// stream; used by randomized enumeration over reduced alphabets.
Tokenizer build_controlled_tokenizer(RandomStream& stream, int alphabet_size = 26);

// Strength of the (left, right) merge; absent pairs are weakest.
int64_t merge_strength(const MergeTable& table, std::string_view left, std::string_view right);

// Three-letter chunking: left-to-right chunks of 3 letters, trailing 1-2
// letter remainder kept as the final token, words of <= 2 letters kept
// whole. The marker stays on the first chunk and is not counted.
std::vector<std::string> tokenize_tcs(std::string_view word);

// Whitespace tokenization: each pretokenized word is one token.
std::vector<std::string> tokenize_word(std::string_view text);

enum class TokenizerKind { kBpe, kControlled, kTcs, kWord };

// Tokenizes one document under the given regime. kBpe and kControlled need
// the merge table; kTcs and kWord ignore it.
std::vector<std::string> tokenize_document(std::string_view text, TokenizerKind kind,
                                           const MergeTable* table = nullptr);

// --- corpus encoding -------------------------------------------------------

enum class OovPolicy { kError, kSkip };

// Word-type vocabulary capped to the max_size most frequent types
// (ties lexicographic). Uncapped when max_size == 0.
Vocabulary build_word_vocab(const Corpus& corpus, size_t max_size = 0);

// Collects every token the tokenizer produces on the corpus, ids in
// lexicographic order.
Vocabulary collect_token_vocab(const Corpus& corpus, TokenizerKind kind,
                               const MergeTable* table = nullptr);

TokenizedCorpus encode_corpus(const Corpus& corpus, TokenizerKind kind,
                              const Vocabulary& vocab, const MergeTable* table,
                              OovPolicy oov = OovPolicy::kError);

// --- on-disk formats -------------------------------------------------------

// merges file: one "left right" per line, line order = rank order; header
// "#stage-major v1" when the table was explicitly constructed.
void write_merges(const MergeTable& table, const std::string& path);
MergeTable read_merges(const std::string& path);

// vocab file: one token per line, line number = id.
void write_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary read_vocab(const std::string& path);

// tokens file: one document per line, space-separated token ids.
void write_tokenized(const TokenizedCorpus& corpus, const std::string& path);
TokenizedCorpus read_tokenized(const std::string& path);

} // namespace charprobe
