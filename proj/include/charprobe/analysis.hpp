#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "charprobe/rng.hpp"
#include "charprobe/tokenizer.hpp"

namespace charprobe {

// Frequencies of (last character of a token, first non-marker character of
// the next token) over adjacent token pairs. Within-word scope skips pairs
// whose successor starts a new word.
struct BoundaryPairTable {
    std::vector<uint64_t> counts = std::vector<uint64_t>(256 * 256, 0);
    bool within_word_only = true;
    uint64_t total = 0;

    uint64_t count(unsigned char left, unsigned char right) const {
        return counts[static_cast<size_t>(left) * 256 + right];
    }
};

BoundaryPairTable boundary_pair_stats(const TokenizedCorpus& corpus,
                                      const Vocabulary& vocab,
                                      bool within_word_only = true);

struct SpearmanResult {
    double rho = 0.0;
    size_t n = 0;
    bool degenerate = false; // constant input on either axis
};

// Spearman rank correlation with average ranks for ties.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

// One-sided (greater) permutation p-value for spearman(x, y):
// (1 + #{rho_perm >= rho_obs}) / (permutations + 1).
double spearman_permutation_pvalue(const std::vector<double>& x,
                                   const std::vector<double>& y, size_t permutations,
                                   RandomStream stream);

// Rank position of each single-letter pair (later table position = weaker)
// against its boundary frequency. Pairs that were counted but have no rule
// sit at rank position rule_count, below everything in the table.
struct BoundaryCorrelation {
    struct Row {
        char left, right;
        uint32_t rank_position;
        uint64_t frequency;
    };
    std::vector<Row> rows;
    SpearmanResult correlation;
};

BoundaryCorrelation correlate_strength_frequency(const BoundaryPairTable& table,
                                                 const MergeTable& merges);

// CSV "left_char,right_char,merge_rank,frequency"
void write_boundary_csv(const BoundaryCorrelation& correlation, const std::string& path);

// Standalone SVG scatter of rank position vs boundary frequency.
void write_scatter_svg(const BoundaryCorrelation& correlation, const std::string& path,
                       const std::string& title);

// --- segmentation necessary conditions -------------------------------------
//
// Under an explicitly constructed table, each target segmentation below can
// occur only when the stated strength comparisons hold. check_condition runs
// the greedy merge on the concrete string and verifies the implication
// (target observed => condition true); the converse is not claimed.
//
// When letter coincidences put the same rule at two competing positions, the
// leftmost occurrence fires first, so comparisons where the left position
// competes are non-strict. For distinct rules every comparison is strict.

enum class ConditionPattern {
    kMarker23,  // marker a b | x y g  ->  [marker+ab, xyg]
    kMarker2X3, // marker a b | x g d  ->  [marker+ab, xgd]
    kPlain32,   // a b x | g d        ->  [abx, gd]
    kMarker32   // marker a b x | g d ->  [marker+abx, gd]
};

const char* condition_pattern_name(ConditionPattern pattern);

struct ConditionCase {
    ConditionPattern pattern;
    char alpha, beta, gamma, delta, x, y;
};

struct ConditionOutcome {
    std::vector<std::string> segmentation;
    bool target_matched = false;
    bool condition_holds = false;
    bool implication_ok = true;
};

ConditionOutcome check_condition(const ConditionCase& c, const MergeTable& merges);

struct ConditionReport {
    struct PatternStats {
        uint64_t trials = 0;
        uint64_t target_hits = 0;
        uint64_t violations = 0;
    };
    std::array<PatternStats, 4> patterns;

    uint64_t total_violations() const;
};

// Random controlled tables over a reduced alphabet, random letter bindings,
// all four patterns per trial. Expected violation count: zero.
ConditionReport enumerate_conditions(int alphabet_size, uint64_t trials,
                                     RandomStream stream);

// CSV "pattern,trials,violations"
void write_condition_csv(const ConditionReport& report, const std::string& path);

} // namespace charprobe
