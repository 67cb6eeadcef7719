#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "charprobe/embeddings.hpp"
#include "charprobe/probedata.hpp"
#include "charprobe/rng.hpp"

namespace charprobe {

// Published SELU constants.
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;

// Two-hidden-layer binary classifier over frozen token embeddings:
// affine -> SELU -> dropout -> affine -> tanh -> dropout -> affine -> logit.
// Dropout is inverted (train-time scaling) and inactive at evaluation.
struct ProbeMlp {
    uint32_t input_dim = 0;
    uint32_t hidden1 = 256;
    uint32_t hidden2 = 128;
    double dropout_rate = 0.1;
    std::vector<double> w1, b1; // hidden1 x input_dim, hidden1
    std::vector<double> w2, b2; // hidden2 x hidden1, hidden2
    std::vector<double> w3;     // hidden2
    double b3 = 0.0;

    size_t parameter_count() const;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    uint32_t epochs = 3;
    uint32_t batch_size = 64;
    uint32_t hidden1 = 256;
    uint32_t hidden2 = 128;
    double dropout_rate = 0.1;
    SeedSpec seed;
};

struct EvalCounts {
    uint64_t correct = 0;
    uint64_t total = 0;
    std::map<char, std::pair<uint64_t, uint64_t>> per_char; // (correct, total)
};

// Sigmoid cross-entropy, Adam, shuffled mini-batches, dropout active;
// deterministic given the config seed. Throws on out-of-range token ids and
// on non-finite loss (reporting the batch index).
ProbeMlp train_probe(const EmbeddingMatrix& embeddings, const ProbeDataset& data,
                     const TrainConfig& config);

// Dropout off; prediction is sigmoid(logit) > 0.5, ties predict negative.
EvalCounts eval_probe(const ProbeMlp& model, const EmbeddingMatrix& embeddings,
                      const ProbeDataset& data);

// Per-example predictions under the same rule, in dataset order.
std::vector<bool> predict_probe(const ProbeMlp& model, const EmbeddingMatrix& embeddings,
                                const ProbeDataset& data);

// Total correct over total examples across the per-letter counts.
double micro_average(const std::vector<EvalCounts>& counts);

// Checkpoint: "CPPM", version u32, input_dim/hidden1/hidden2 u32, then all
// parameters row-major as little-endian float32.
void write_probe(const ProbeMlp& model, const std::string& path);
ProbeMlp read_probe(const std::string& path);

namespace probe_detail {

// Flat parameter vector in the order w1, b1, w2, b2, w3, b3.
std::vector<double> pack_parameters(const ProbeMlp& model);
void unpack_parameters(ProbeMlp& model, const std::vector<double>& flat);

// Mean loss over the examples and, when grad != nullptr, its analytic
// gradient in pack_parameters order. Dropout is not applied; this is the
// surface the finite-difference check exercises.
double loss_and_gradient(const ProbeMlp& model, const EmbeddingMatrix& embeddings,
                         std::span<const ProbeExample> examples,
                         std::vector<double>* grad);

} // namespace probe_detail

} // namespace charprobe
