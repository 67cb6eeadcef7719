#include "charprobe/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "charprobe/error.hpp"

namespace charprobe {

namespace {

// Walker alias table over unigram counts^0.75, the usual negative-sampling
// distribution. Construction and sampling are deterministic.
class AliasSampler {
public:
    AliasSampler(const std::vector<uint64_t>& counts) {
        for (size_t i = 0; i < counts.size(); ++i)
            if (counts[i] > 0) {
                ids_.push_back(static_cast<int32_t>(i));
                weights_.push_back(std::pow(static_cast<double>(counts[i]), 0.75));
            }
        size_t n = ids_.size();
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        double total = 0;
        for (double w : weights_) total += w;
        std::vector<double> scaled(n);
        std::vector<size_t> small, large;
        for (size_t i = 0; i < n; ++i) {
            scaled[i] = weights_[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            size_t s = small.back(); small.pop_back();
            size_t l = large.back(); large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (size_t s : small) prob_[s] = 1.0;
        for (size_t l : large) prob_[l] = 1.0;
    }

    bool empty() const { return ids_.empty(); }

    int32_t sample(RandomStream& stream) const {
        size_t slot = static_cast<size_t>(stream.next_below(ids_.size()));
        if (stream.next_double() < prob_[slot]) return ids_[slot];
        return ids_[alias_[slot]];
    }

private:
    std::vector<int32_t> ids_;
    std::vector<double> weights_;
    std::vector<double> prob_;
    std::vector<size_t> alias_;
};

inline float sigmoid(float x) {
    return 1.0f / (1.0f + std::exp(-x));
}

void store_u32le(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void store_u64le(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t load_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t load_u64le(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

constexpr uint32_t kMatrixVersion = 1;

} // namespace

EmbeddingMatrix train_embeddings(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                                 const SgnsConfig& config, RandomStream stream,
                                 SgnsStats* stats) {
    if (config.dim < 2) throw DataError("embedding dim must be at least 2");
    size_t total_tokens = corpus.token_count();
    if (total_tokens == 0) throw DataError("cannot train embeddings on an empty corpus");

    const uint32_t vocab_size = static_cast<uint32_t>(vocab.size());
    std::vector<uint64_t> counts(vocab_size, 0);
    for (const auto& doc : corpus.documents) {
        for (int32_t id : doc) {
            if (id < 0 || static_cast<uint32_t>(id) >= vocab_size)
                throw DataError("token id " + std::to_string(id) +
                                " outside vocabulary of size " + std::to_string(vocab_size));
            counts[static_cast<size_t>(id)]++;
        }
    }
    AliasSampler negatives(counts);

    const uint32_t dim = config.dim;
    EmbeddingMatrix input;
    input.vocab_size = vocab_size;
    input.dim = dim;
    input.vocab_hash = vocab.content_hash();
    input.values.resize(static_cast<size_t>(vocab_size) * dim);
    std::vector<float> output(static_cast<size_t>(vocab_size) * dim, 0.0f);

    RandomStream init_stream = stream.fork(0);
    for (float& v : input.values)
        v = static_cast<float>((init_stream.next_double() - 0.5) / dim);

    RandomStream train_stream = stream.fork(1);
    std::vector<float> grad_accum(dim);

    const double total_positions =
        static_cast<double>(total_tokens) * config.epochs;
    double processed = 0;
    float lr = config.initial_lr;

    for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0;
        uint64_t loss_pairs = 0;
        for (const auto& doc : corpus.documents) {
            const size_t doc_len = doc.size();
            for (size_t pos = 0; pos < doc_len; ++pos) {
                processed += 1;
                if (static_cast<uint64_t>(processed) % 10000 == 0) {
                    double frac = 1.0 - processed / (total_positions + 1.0);
                    lr = config.initial_lr * static_cast<float>(std::max(frac, 1e-4));
                }
                const size_t span = 1 + static_cast<size_t>(
                                            train_stream.next_below(config.window));
                const int32_t center = doc[pos];
                float* v_in = input.row(static_cast<uint32_t>(center));

                size_t lo = pos >= span ? pos - span : 0;
                size_t hi = std::min(doc_len - 1, pos + span);
                for (size_t ctx = lo; ctx <= hi; ++ctx) {
                    if (ctx == pos) continue;
                    const int32_t positive = doc[ctx];
                    std::fill(grad_accum.begin(), grad_accum.end(), 0.0f);

                    for (uint32_t n = 0; n <= config.negatives; ++n) {
                        int32_t target;
                        float label;
                        if (n == 0) {
                            target = positive;
                            label = 1.0f;
                        } else {
                            target = negatives.sample(train_stream);
                            if (target == positive) continue;
                            label = 0.0f;
                        }
                        float* v_out = output.data() + static_cast<size_t>(target) * dim;
                        float dot = 0;
                        for (uint32_t d = 0; d < dim; ++d) dot += v_in[d] * v_out[d];
                        float pred = sigmoid(dot);
                        float g = (label - pred) * lr;
                        for (uint32_t d = 0; d < dim; ++d) {
                            grad_accum[d] += g * v_out[d];
                            v_out[d] += g * v_in[d];
                        }
                        double p = label > 0.5f ? pred : 1.0f - pred;
                        loss_sum += -std::log(std::max(1e-10, static_cast<double>(p)));
                        ++loss_pairs;
                    }
                    for (uint32_t d = 0; d < dim; ++d) v_in[d] += grad_accum[d];
                }
            }
        }
        if (stats)
            stats->epoch_mean_loss.push_back(
                loss_pairs ? loss_sum / static_cast<double>(loss_pairs) : 0.0);
    }

    for (float v : input.values)
        if (!std::isfinite(v)) throw DataError("non-finite embedding value after training");
    return input;
}

void write_matrix(const EmbeddingMatrix& matrix, const std::string& path) {
    if (matrix.values.size() !=
        static_cast<size_t>(matrix.vocab_size) * matrix.dim)
        throw DataError("embedding matrix shape mismatch");
    for (float v : matrix.values)
        if (!std::isfinite(v)) throw DataError("refusing to write non-finite embedding value");

    std::string header;
    header.reserve(28);
    header += "CPEM";
    store_u32le(header, kMatrixVersion);
    store_u64le(header, matrix.vocab_size);
    store_u32le(header, matrix.dim);
    store_u64le(header, matrix.vocab_hash);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open matrix file for writing: " + path);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::string row;
    for (float v : matrix.values) {
        row.clear();
        store_u32le(row, std::bit_cast<uint32_t>(v));
        out.write(row.data(), 4);
    }
    if (!out) throw DataError("I/O failure writing matrix file: " + path);
}

EmbeddingMatrix read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open matrix file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string data = std::move(buf).str();

    if (data.size() < 28 || data.compare(0, 4, "CPEM") != 0)
        throw DataError("bad magic in matrix file: " + path);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
    uint32_t version = load_u32le(p + 4);
    if (version != kMatrixVersion)
        throw DataError("unsupported matrix file version " + std::to_string(version) +
                        " in " + path);
    EmbeddingMatrix matrix;
    uint64_t vocab_size = load_u64le(p + 8);
    matrix.dim = load_u32le(p + 16);
    matrix.vocab_hash = load_u64le(p + 20);
    matrix.vocab_size = static_cast<uint32_t>(vocab_size);

    size_t expected = 28 + static_cast<size_t>(vocab_size) * matrix.dim * 4;
    if (data.size() != expected)
        throw DataError("matrix file " + path + " has " + std::to_string(data.size()) +
                        " bytes, expected " + std::to_string(expected));

    matrix.values.resize(static_cast<size_t>(vocab_size) * matrix.dim);
    for (size_t i = 0; i < matrix.values.size(); ++i)
        matrix.values[i] = std::bit_cast<float>(load_u32le(p + 28 + i * 4));
    for (float v : matrix.values)
        if (!std::isfinite(v)) throw DataError("non-finite value in matrix file: " + path);
    return matrix;
}

EmbeddingMatrix read_matrix(const std::string& path, uint64_t expected_vocab_hash) {
    EmbeddingMatrix matrix = read_matrix(path);
    if (matrix.vocab_hash != expected_vocab_hash) {
        std::ostringstream msg;
        msg << "vocab hash mismatch for " << path << ": matrix has " << std::hex
            << matrix.vocab_hash << ", vocabulary has " << expected_vocab_hash;
        throw DataError(msg.str());
    }
    return matrix;
}

std::pair<Vocabulary, EmbeddingMatrix> import_text_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open text matrix: " + path);
    Vocabulary vocab;
    std::vector<float> values;
    uint32_t dim = 0;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string token;
        row >> token;
        std::vector<float> vec;
        double v;
        while (row >> v) vec.push_back(static_cast<float>(v));
        if (vec.empty())
            throw DataError("no values on line " + std::to_string(lineno) + " of " + path);
        if (dim == 0)
            dim = static_cast<uint32_t>(vec.size());
        else if (vec.size() != dim)
            throw DataError("row width " + std::to_string(vec.size()) + " on line " +
                            std::to_string(lineno) + " of " + path + ", expected " +
                            std::to_string(dim));
        vocab.add(token);
        values.insert(values.end(), vec.begin(), vec.end());
    }
    if (vocab.size() == 0) throw DataError("empty text matrix: " + path);
    EmbeddingMatrix matrix;
    matrix.vocab_size = static_cast<uint32_t>(vocab.size());
    matrix.dim = dim;
    matrix.vocab_hash = vocab.content_hash();
    matrix.values = std::move(values);
    return {std::move(vocab), std::move(matrix)};
}

} // namespace charprobe
