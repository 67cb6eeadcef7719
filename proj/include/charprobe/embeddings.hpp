#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "charprobe/rng.hpp"
#include "charprobe/tokenizer.hpp"

namespace charprobe {

// Dense per-token vectors, row i = token id i. vocab_hash ties the matrix to
// the vocab file it was trained against.
struct EmbeddingMatrix {
    uint32_t vocab_size = 0;
    uint32_t dim = 0;
    uint64_t vocab_hash = 0;
    std::vector<float> values; // row-major vocab_size x dim

    float* row(uint32_t id) { return values.data() + static_cast<size_t>(id) * dim; }
    const float* row(uint32_t id) const {
        return values.data() + static_cast<size_t>(id) * dim;
    }
};

// Skip-gram with negative sampling over token-id sequences; the desk-scale
// stand-in for LM pretraining. Single-threaded and fully determined by the
// stream.
struct SgnsConfig {
    uint32_t dim = 128;
    uint32_t window = 5; // dynamic window, 1..window per position
    uint32_t negatives = 5;
    uint32_t epochs = 5;
    float initial_lr = 0.025f;
};

struct SgnsStats {
    std::vector<double> epoch_mean_loss;
};

EmbeddingMatrix train_embeddings(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                                 const SgnsConfig& config, RandomStream stream,
                                 SgnsStats* stats = nullptr);

// Binary matrix file, bit-exact across platforms:
//   "CPEM", version u32, vocab_size u64 (all little-endian)   -- 16 bytes
//   dim u32, vocab_hash u64                                    -- 12 bytes
//   vocab_size * dim float32 rows
void write_matrix(const EmbeddingMatrix& matrix, const std::string& path);
EmbeddingMatrix read_matrix(const std::string& path);

// Refuses the load when the stored hash differs from expected_vocab_hash.
EmbeddingMatrix read_matrix(const std::string& path, uint64_t expected_vocab_hash);

// Text import: one "token v1 ... vdim" line per row. Line order gives ids.
std::pair<Vocabulary, EmbeddingMatrix> import_text_matrix(const std::string& path);

} // namespace charprobe
