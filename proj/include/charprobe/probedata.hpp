#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "charprobe/rng.hpp"
#include "charprobe/tokenizer.hpp"

namespace charprobe {

struct ProbeExample {
    std::string token;
    int32_t token_id = 0;
    bool label = false; // token contains the target letter (marker ignored)
};

enum class MatchingMode { kMatched, kUnmatched };

const char* matching_mode_name(MatchingMode mode);

// Balanced positive/negative token set for one target letter. In matched
// mode the positive and negative token-length histograms are equal exactly.
struct ProbeDataset {
    char target_char = 'a';
    MatchingMode mode = MatchingMode::kMatched;
    std::vector<ProbeExample> examples;
};

// Case-insensitive containment of the target letter, marker excluded.
bool token_contains(std::string_view token, char alpha);

// Ids of tokens that are an optional marker followed by one or more ASCII
// letters. Everything else is excluded from probing.
std::vector<int32_t> filter_vocab(const Vocabulary& vocab);

// Matched mode: per token length, pair each positive with a distinct
// negative of identical length, dropping positives whose length stratum runs
// out of negatives. Unmatched mode: negatives drawn without regard to
// length. Both modes are label-balanced.
ProbeDataset build_dataset(const Vocabulary& vocab, const std::vector<int32_t>& filtered_ids,
                           char alpha, MatchingMode mode, RandomStream stream);

// Length partition {<=3, 4, 5, 6, >=7}, marker excluded from the count.
// Matched datasets stay label-balanced in every bucket.
std::array<ProbeDataset, 5> length_buckets(const ProbeDataset& dataset);

const char* length_bucket_name(size_t bucket);

// (has marker, 1-based index of the first occurrence of the target letter).
// Tokens must carry at most 3 letters.
using SixGroupKey = std::pair<bool, int>;
std::map<SixGroupKey, std::vector<ProbeExample>> six_group_partition(
    const std::vector<ProbeExample>& positives, char alpha);

std::string six_group_label(const SixGroupKey& key);

enum class ContextSide { kPreceding, kFollowing };

// Cross-validation folds whose positive context groups are disjoint. A
// positive's group is the character adjacent to the first occurrence of the
// target letter ("word-start"/"word-end" sentinels at the edges). Groups are
// packed by descending frequency onto the currently smallest fold; negatives
// are spread uniformly at random.
struct FoldSpec {
    int k = 5;
    ContextSide side = ContextSide::kPreceding;
    std::map<std::string, int> group_to_fold;
    std::vector<int> fold_of; // parallel to dataset.examples
    std::vector<uint64_t> fold_sizes;

    double balance_ratio() const; // max fold size / min fold size
};

FoldSpec context_group_folds(const ProbeDataset& dataset, char alpha, ContextSide side,
                             int k, RandomStream stream);

// TSV: header comment recording the target letter, mode and seed, then
// "token<TAB>token_id<TAB>label" rows.
void write_dataset(const ProbeDataset& dataset, const std::string& path,
                   const std::string& seed_desc);
ProbeDataset read_dataset(const std::string& path);

} // namespace charprobe
