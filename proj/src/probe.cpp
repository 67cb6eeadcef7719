#include "charprobe/probe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "charprobe/error.hpp"

namespace charprobe {

namespace {

double selu(double z) {
    return z > 0 ? kSeluLambda * z : kSeluLambda * kSeluAlpha * std::expm1(z);
}

double selu_grad(double z) {
    return z > 0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z);
}

// Numerically stable sigmoid cross-entropy: softplus(logit) - y * logit.
double bce_loss(double logit, double y) {
    double soft = logit > 0 ? logit + std::log1p(std::exp(-logit))
                            : std::log1p(std::exp(logit));
    return soft - y * logit;
}

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

struct Workspace {
    std::vector<double> z1, a1, d1, z2, a2, d2;
    std::vector<double> dz1, dz2, dd1;
    std::vector<double> mask1, mask2;

    void resize(uint32_t h1, uint32_t h2) {
        z1.resize(h1); a1.resize(h1); d1.resize(h1);
        z2.resize(h2); a2.resize(h2); d2.resize(h2);
        dz1.resize(h1); dz2.resize(h2); dd1.resize(h1);
        mask1.assign(h1, 1.0);
        mask2.assign(h2, 1.0);
    }
};

struct GradOffsets {
    size_t w1 = 0, b1, w2, b2, w3, b3, total;

    explicit GradOffsets(const ProbeMlp& m) {
        b1 = w1 + static_cast<size_t>(m.hidden1) * m.input_dim;
        w2 = b1 + m.hidden1;
        b2 = w2 + static_cast<size_t>(m.hidden2) * m.hidden1;
        w3 = b2 + m.hidden2;
        b3 = w3 + m.hidden2;
        total = b3 + 1;
    }
};

// One example forward (+ optionally backward into flat gradient). The masks
// in ws are the inverted-dropout factors; all ones means dropout disabled.
double example_loss(const ProbeMlp& m, const double* x, double y, Workspace& ws,
                    std::vector<double>* grad, const GradOffsets* off) {
    const uint32_t d = m.input_dim, h1 = m.hidden1, h2 = m.hidden2;
    for (uint32_t i = 0; i < h1; ++i) {
        double acc = m.b1[i];
        const double* row = m.w1.data() + static_cast<size_t>(i) * d;
        for (uint32_t k = 0; k < d; ++k) acc += row[k] * x[k];
        ws.z1[i] = acc;
        ws.a1[i] = selu(acc);
        ws.d1[i] = ws.a1[i] * ws.mask1[i];
    }
    for (uint32_t i = 0; i < h2; ++i) {
        double acc = m.b2[i];
        const double* row = m.w2.data() + static_cast<size_t>(i) * h1;
        for (uint32_t k = 0; k < h1; ++k) acc += row[k] * ws.d1[k];
        ws.z2[i] = acc;
        ws.a2[i] = std::tanh(acc);
        ws.d2[i] = ws.a2[i] * ws.mask2[i];
    }
    double logit = m.b3;
    for (uint32_t i = 0; i < h2; ++i) logit += m.w3[i] * ws.d2[i];
    double loss = bce_loss(logit, y);
    if (!grad) return loss;

    double dlogit = sigmoid(logit) - y;
    (*grad)[off->b3] += dlogit;
    for (uint32_t i = 0; i < h2; ++i) {
        (*grad)[off->w3 + i] += dlogit * ws.d2[i];
        double da2 = dlogit * m.w3[i] * ws.mask2[i];
        ws.dz2[i] = da2 * (1.0 - ws.a2[i] * ws.a2[i]);
    }
    std::fill(ws.dd1.begin(), ws.dd1.end(), 0.0);
    for (uint32_t i = 0; i < h2; ++i) {
        double g = ws.dz2[i];
        (*grad)[off->b2 + i] += g;
        double* grow = grad->data() + off->w2 + static_cast<size_t>(i) * h1;
        const double* row = m.w2.data() + static_cast<size_t>(i) * h1;
        for (uint32_t k = 0; k < h1; ++k) {
            grow[k] += g * ws.d1[k];
            ws.dd1[k] += g * row[k];
        }
    }
    for (uint32_t i = 0; i < h1; ++i) {
        double da1 = ws.dd1[i] * ws.mask1[i];
        double g = da1 * selu_grad(ws.z1[i]);
        (*grad)[off->b1 + i] += g;
        double* grow = grad->data() + off->w1 + static_cast<size_t>(i) * d;
        for (uint32_t k = 0; k < d; ++k) grow[k] += g * x[k];
    }
    return loss;
}

const float* feature_row(const EmbeddingMatrix& emb, const ProbeExample& ex) {
    if (ex.token_id < 0 || static_cast<uint32_t>(ex.token_id) >= emb.vocab_size)
        throw DataError("token id " + std::to_string(ex.token_id) +
                        " outside embedding matrix of size " +
                        std::to_string(emb.vocab_size));
    return emb.row(static_cast<uint32_t>(ex.token_id));
}

} // namespace

size_t ProbeMlp::parameter_count() const {
    return GradOffsets(*this).total;
}

namespace probe_detail {

std::vector<double> pack_parameters(const ProbeMlp& m) {
    std::vector<double> flat;
    flat.reserve(m.parameter_count());
    flat.insert(flat.end(), m.w1.begin(), m.w1.end());
    flat.insert(flat.end(), m.b1.begin(), m.b1.end());
    flat.insert(flat.end(), m.w2.begin(), m.w2.end());
    flat.insert(flat.end(), m.b2.begin(), m.b2.end());
    flat.insert(flat.end(), m.w3.begin(), m.w3.end());
    flat.push_back(m.b3);
    return flat;
}

void unpack_parameters(ProbeMlp& m, const std::vector<double>& flat) {
    GradOffsets off(m);
    if (flat.size() != off.total) throw DataError("parameter vector size mismatch");
    std::copy(flat.begin() + static_cast<ptrdiff_t>(off.w1),
              flat.begin() + static_cast<ptrdiff_t>(off.b1), m.w1.begin());
    std::copy(flat.begin() + static_cast<ptrdiff_t>(off.b1),
              flat.begin() + static_cast<ptrdiff_t>(off.w2), m.b1.begin());
    std::copy(flat.begin() + static_cast<ptrdiff_t>(off.w2),
              flat.begin() + static_cast<ptrdiff_t>(off.b2), m.w2.begin());
    std::copy(flat.begin() + static_cast<ptrdiff_t>(off.b2),
              flat.begin() + static_cast<ptrdiff_t>(off.w3), m.b2.begin());
    std::copy(flat.begin() + static_cast<ptrdiff_t>(off.w3),
              flat.begin() + static_cast<ptrdiff_t>(off.b3), m.w3.begin());
    m.b3 = flat[off.b3];
}

double loss_and_gradient(const ProbeMlp& model, const EmbeddingMatrix& embeddings,
                         std::span<const ProbeExample> examples,
                         std::vector<double>* grad) {
    if (examples.empty()) throw DataError("empty example span");
    GradOffsets off(model);
    if (grad) grad->assign(off.total, 0.0);
    Workspace ws;
    ws.resize(model.hidden1, model.hidden2);
    std::vector<double> x(model.input_dim);
    double loss = 0;
    for (const auto& ex : examples) {
        const float* row = feature_row(embeddings, ex);
        for (uint32_t k = 0; k < model.input_dim; ++k) x[k] = row[k];
        loss += example_loss(model, x.data(), ex.label ? 1.0 : 0.0, ws,
                             grad, grad ? &off : nullptr);
    }
    double inv = 1.0 / static_cast<double>(examples.size());
    if (grad)
        for (double& g : *grad) g *= inv;
    return loss * inv;
}

} // namespace probe_detail

ProbeMlp train_probe(const EmbeddingMatrix& embeddings, const ProbeDataset& data,
                     const TrainConfig& config) {
    if (data.examples.empty()) throw DataError("cannot train a probe on an empty dataset");
    if (embeddings.dim == 0) throw DataError("embedding matrix has zero dim");

    ProbeMlp model;
    model.input_dim = embeddings.dim;
    model.hidden1 = config.hidden1;
    model.hidden2 = config.hidden2;
    model.dropout_rate = config.dropout_rate;
    model.w1.resize(static_cast<size_t>(model.hidden1) * model.input_dim);
    model.b1.assign(model.hidden1, 0.0);
    model.w2.resize(static_cast<size_t>(model.hidden2) * model.hidden1);
    model.b2.assign(model.hidden2, 0.0);
    model.w3.resize(model.hidden2);

    RandomStream init_stream = derive_stream(config.seed, 0);
    auto glorot = [&](std::vector<double>& w, uint32_t fan_in, uint32_t fan_out) {
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : w) v = (init_stream.next_double() * 2.0 - 1.0) * limit;
    };
    glorot(model.w1, model.input_dim, model.hidden1);
    glorot(model.w2, model.hidden1, model.hidden2);
    glorot(model.w3, model.hidden2, 1);

    // features once, contiguous
    const uint32_t dim = embeddings.dim;
    std::vector<double> features(data.examples.size() * static_cast<size_t>(dim));
    std::vector<double> labels(data.examples.size());
    for (size_t i = 0; i < data.examples.size(); ++i) {
        const float* row = feature_row(embeddings, data.examples[i]);
        for (uint32_t k = 0; k < dim; ++k) features[i * dim + k] = row[k];
        labels[i] = data.examples[i].label ? 1.0 : 0.0;
    }

    RandomStream shuffle_stream = derive_stream(config.seed, 1);
    RandomStream dropout_stream = derive_stream(config.seed, 2);

    GradOffsets off(model);
    std::vector<double> grad(off.total), adam_m(off.total, 0.0), adam_v(off.total, 0.0);
    std::vector<double> params = probe_detail::pack_parameters(model);
    Workspace ws;
    ws.resize(model.hidden1, model.hidden2);

    const double keep = 1.0 - config.dropout_rate;
    std::vector<size_t> order(data.examples.size());
    std::iota(order.begin(), order.end(), size_t{0});

    uint64_t step = 0;
    size_t batch_index = 0;
    for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_stream.shuffle(order);
        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            size_t end = std::min(order.size(), start + config.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0;
            for (size_t b = start; b < end; ++b) {
                if (config.dropout_rate > 0.0) {
                    for (double& mk : ws.mask1)
                        mk = dropout_stream.next_double() < keep ? 1.0 / keep : 0.0;
                    for (double& mk : ws.mask2)
                        mk = dropout_stream.next_double() < keep ? 1.0 / keep : 0.0;
                }
                size_t idx = order[b];
                batch_loss += example_loss(model, features.data() + idx * dim,
                                           labels[idx], ws, &grad, &off);
            }
            double inv = 1.0 / static_cast<double>(end - start);
            batch_loss *= inv;
            if (!std::isfinite(batch_loss))
                throw DataError("non-finite training loss at batch " +
                                std::to_string(batch_index));
            ++step;
            double bias1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
            double bias2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
            for (size_t i = 0; i < off.total; ++i) {
                double g = grad[i] * inv;
                adam_m[i] = config.adam_beta1 * adam_m[i] + (1.0 - config.adam_beta1) * g;
                adam_v[i] = config.adam_beta2 * adam_v[i] + (1.0 - config.adam_beta2) * g * g;
                double mhat = adam_m[i] / bias1;
                double vhat = adam_v[i] / bias2;
                params[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
            }
            probe_detail::unpack_parameters(model, params);
            ++batch_index;
        }
    }
    std::fill(ws.mask1.begin(), ws.mask1.end(), 1.0);
    std::fill(ws.mask2.begin(), ws.mask2.end(), 1.0);
    return model;
}

std::vector<bool> predict_probe(const ProbeMlp& model, const EmbeddingMatrix& embeddings,
                                const ProbeDataset& data) {
    std::vector<bool> predictions;
    predictions.reserve(data.examples.size());
    Workspace ws;
    ws.resize(model.hidden1, model.hidden2);
    std::vector<double> x(model.input_dim);
    const uint32_t h1 = model.hidden1, h2 = model.hidden2, d = model.input_dim;
    for (const auto& ex : data.examples) {
        const float* row = feature_row(embeddings, ex);
        for (uint32_t k = 0; k < d; ++k) x[k] = row[k];
        for (uint32_t i = 0; i < h1; ++i) {
            double acc = model.b1[i];
            const double* wrow = model.w1.data() + static_cast<size_t>(i) * d;
            for (uint32_t k = 0; k < d; ++k) acc += wrow[k] * x[k];
            ws.d1[i] = selu(acc);
        }
        for (uint32_t i = 0; i < h2; ++i) {
            double acc = model.b2[i];
            const double* wrow = model.w2.data() + static_cast<size_t>(i) * h1;
            for (uint32_t k = 0; k < h1; ++k) acc += wrow[k] * ws.d1[k];
            ws.d2[i] = std::tanh(acc);
        }
        double logit = model.b3;
        for (uint32_t i = 0; i < h2; ++i) logit += model.w3[i] * ws.d2[i];
        predictions.push_back(logit > 0.0); // sigmoid > 0.5; ties predict negative
    }
    return predictions;
}

EvalCounts eval_probe(const ProbeMlp& model, const EmbeddingMatrix& embeddings,
                      const ProbeDataset& data) {
    EvalCounts counts;
    auto& per = counts.per_char[data.target_char];
    std::vector<bool> predictions = predict_probe(model, embeddings, data);
    for (size_t i = 0; i < data.examples.size(); ++i) {
        counts.total += 1;
        per.second += 1;
        if (predictions[i] == data.examples[i].label) {
            counts.correct += 1;
            per.first += 1;
        }
    }
    return counts;
}

double micro_average(const std::vector<EvalCounts>& counts) {
    if (counts.empty()) throw DataError("micro_average over empty counts");
    uint64_t correct = 0, total = 0;
    for (const auto& c : counts) {
        correct += c.correct;
        total += c.total;
    }
    if (total == 0) throw DataError("micro_average over zero examples");
    return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

void put_u32(std::ofstream& out, uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

} // namespace

void write_probe(const ProbeMlp& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open probe checkpoint for writing: " + path);
    out.write("CPPM", 4);
    put_u32(out, 1);
    put_u32(out, model.input_dim);
    put_u32(out, model.hidden1);
    put_u32(out, model.hidden2);
    for (double v : probe_detail::pack_parameters(model))
        put_u32(out, std::bit_cast<uint32_t>(static_cast<float>(v)));
    if (!out) throw DataError("I/O failure writing probe checkpoint: " + path);
}

ProbeMlp read_probe(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open probe checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != "CPPM")
        throw DataError("bad magic in probe checkpoint: " + path);
    uint32_t version = get_u32(in);
    if (version != 1)
        throw DataError("unsupported probe checkpoint version in " + path);
    ProbeMlp model;
    model.input_dim = get_u32(in);
    model.hidden1 = get_u32(in);
    model.hidden2 = get_u32(in);
    model.w1.resize(static_cast<size_t>(model.hidden1) * model.input_dim);
    model.b1.resize(model.hidden1);
    model.w2.resize(static_cast<size_t>(model.hidden2) * model.hidden1);
    model.b2.resize(model.hidden2);
    model.w3.resize(model.hidden2);
    std::vector<double> flat(model.parameter_count());
    for (double& v : flat) {
        uint32_t bits = get_u32(in);
        if (!in) throw DataError("truncated probe checkpoint: " + path);
        v = static_cast<double>(std::bit_cast<float>(bits));
    }
    probe_detail::unpack_parameters(model, flat);
    return model;
}

} // namespace charprobe
