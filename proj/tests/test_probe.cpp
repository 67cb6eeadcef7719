#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "charprobe/error.hpp"
#include "charprobe/probe.hpp"
#include "test_util.hpp"

using namespace charprobe;

namespace {

// synthetic embedding matrix + balanced dataset over it
struct Fixture {
    EmbeddingMatrix emb;
    ProbeDataset data;
};

Fixture planted_separable(uint32_t n_per_class, uint32_t dim) {
    Fixture f;
    f.emb.vocab_size = 2 * n_per_class;
    f.emb.dim = dim;
    f.emb.values.assign(static_cast<size_t>(2 * n_per_class) * dim, 0.0f);
    f.data.target_char = 'a';
    f.data.mode = MatchingMode::kMatched;
    for (uint32_t i = 0; i < 2 * n_per_class; ++i) {
        bool positive = i < n_per_class;
        f.emb.row(i)[0] = positive ? 1.0f : -1.0f;
        f.data.examples.push_back(
            {positive ? "pos" : "neg", static_cast<int32_t>(i), positive});
    }
    return f;
}

Fixture random_embeddings(uint32_t n_per_class, uint32_t dim, uint64_t seed) {
    Fixture f;
    f.emb.vocab_size = 2 * n_per_class;
    f.emb.dim = dim;
    f.emb.values.resize(static_cast<size_t>(2 * n_per_class) * dim);
    RandomStream gen = derive_stream({seed, "fixture"}, 0);
    for (float& v : f.emb.values)
        v = static_cast<float>(gen.next_double() * 2 - 1);
    f.data.target_char = 'a';
    f.data.mode = MatchingMode::kMatched;
    for (uint32_t i = 0; i < 2 * n_per_class; ++i)
        f.data.examples.push_back({"t", static_cast<int32_t>(i), i < n_per_class});
    return f;
}

TrainConfig small_config(uint64_t seed) {
    TrainConfig cfg;
    cfg.hidden1 = 32;
    cfg.hidden2 = 16;
    cfg.seed = {seed, "probe"};
    return cfg;
}

} // namespace

TEST_CASE("selu constants match the published values to 12 decimals") {
    CHECK(std::abs(kSeluAlpha - 1.6732632423543772) < 1e-12);
    CHECK(std::abs(kSeluLambda - 1.0507009873554805) < 1e-12);
}

TEST_CASE("analytic gradients match central finite differences") {
    Fixture f = random_embeddings(24, 10, 31);
    ProbeMlp model;
    model.input_dim = 10;
    model.hidden1 = 14;
    model.hidden2 = 7;
    model.w1.resize(14 * 10);
    model.b1.resize(14);
    model.w2.resize(7 * 14);
    model.b2.resize(7);
    model.w3.resize(7);
    RandomStream init = derive_stream({31, "init"}, 0);
    auto params = probe_detail::pack_parameters(model);
    for (double& p : params) p = init.next_double() * 2 - 1;
    probe_detail::unpack_parameters(model, params);

    std::vector<double> grad;
    std::span<const ProbeExample> examples(f.data.examples);
    probe_detail::loss_and_gradient(model, f.emb, examples, &grad);

    RandomStream coord_pick = derive_stream({31, "coords"}, 0);
    int checked = 0;
    while (checked < 100) {
        size_t i = coord_pick.next_below(params.size());
        double h = 1e-5 * std::max(1.0, std::abs(params[i]));
        auto plus = params, minus = params;
        plus[i] += h;
        minus[i] -= h;
        ProbeMlp m_plus = model, m_minus = model;
        probe_detail::unpack_parameters(m_plus, plus);
        probe_detail::unpack_parameters(m_minus, minus);
        double numeric =
            (probe_detail::loss_and_gradient(m_plus, f.emb, examples, nullptr) -
             probe_detail::loss_and_gradient(m_minus, f.emb, examples, nullptr)) /
            (2 * h);
        double analytic = grad[i];
        double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        CAPTURE(i);
        CHECK(std::abs(numeric - analytic) / denom < 1e-4);
        ++checked;
    }
}

TEST_CASE("a linearly separable planted set is learned nearly perfectly") {
    Fixture f = planted_separable(200, 8);
    ProbeMlp model = train_probe(f.emb, f.data, small_config(7));
    EvalCounts counts = eval_probe(model, f.emb, f.data);
    double acc = static_cast<double>(counts.correct) / counts.total;
    CHECK(acc >= 0.99);
}

TEST_CASE("all-zero embeddings sit at chance") {
    Fixture f = planted_separable(100, 8);
    std::fill(f.emb.values.begin(), f.emb.values.end(), 0.0f);
    ProbeMlp model = train_probe(f.emb, f.data, small_config(8));
    EvalCounts counts = eval_probe(model, f.emb, f.data);
    double acc = static_cast<double>(counts.correct) / counts.total;
    CHECK(acc >= 0.45);
    CHECK(acc <= 0.55);
}

TEST_CASE("an all-zero final layer predicts negative everywhere") {
    Fixture f = random_embeddings(50, 6, 9);
    ProbeMlp model;
    model.input_dim = 6;
    model.hidden1 = 4;
    model.hidden2 = 3;
    model.w1.assign(4 * 6, 0.3);
    model.b1.assign(4, 0.1);
    model.w2.assign(3 * 4, -0.2);
    model.b2.assign(3, 0.0);
    model.w3.assign(3, 0.0);
    model.b3 = 0.0;
    EvalCounts counts = eval_probe(model, f.emb, f.data);
    // logit identically 0 -> sigmoid 0.5 -> tie predicts negative
    CHECK(counts.correct == counts.total / 2);
}

TEST_CASE("training twice with one seed is bit-identical") {
    Fixture f = random_embeddings(60, 8, 10);
    ProbeMlp a = train_probe(f.emb, f.data, small_config(11));
    ProbeMlp b = train_probe(f.emb, f.data, small_config(11));
    CHECK(probe_detail::pack_parameters(a) == probe_detail::pack_parameters(b));
    ProbeMlp c = train_probe(f.emb, f.data, small_config(12));
    CHECK(probe_detail::pack_parameters(a) != probe_detail::pack_parameters(c));
}

TEST_CASE("evaluation is dropout-free and repeatable") {
    Fixture f = random_embeddings(40, 8, 13);
    ProbeMlp model = train_probe(f.emb, f.data, small_config(13));
    EvalCounts a = eval_probe(model, f.emb, f.data);
    EvalCounts b = eval_probe(model, f.emb, f.data);
    CHECK(a.correct == b.correct);
    CHECK(a.total == b.total);
}

TEST_CASE("label-shuffled data stays inside the 99% chance band") {
    Fixture f = random_embeddings(400, 12, 14);
    // shuffle labels, train on 80%, evaluate on the held-out 20%
    std::vector<bool> labels;
    for (const auto& ex : f.data.examples) labels.push_back(ex.label);
    RandomStream shuffler = derive_stream({14, "shuffle"}, 0);
    shuffler.shuffle(labels);
    for (size_t i = 0; i < labels.size(); ++i) f.data.examples[i].label = labels[i];

    ProbeDataset train, eval;
    train.target_char = eval.target_char = 'a';
    for (size_t i = 0; i < f.data.examples.size(); ++i)
        (i % 5 == 4 ? eval : train).examples.push_back(f.data.examples[i]);

    ProbeMlp model = train_probe(f.emb, train, small_config(15));
    EvalCounts counts = eval_probe(model, f.emb, eval);
    double acc = static_cast<double>(counts.correct) / counts.total;
    double band = testutil::binomial_band(testutil::kZ99, counts.total);
    CHECK(std::abs(acc - 0.5) <= band + 1e-12);
}

TEST_CASE("per-character bookkeeping sums to the totals") {
    Fixture f = random_embeddings(30, 6, 16);
    ProbeMlp model = train_probe(f.emb, f.data, small_config(16));
    EvalCounts counts = eval_probe(model, f.emb, f.data);
    uint64_t sum_correct = 0, sum_total = 0;
    for (const auto& [ch, pair] : counts.per_char) {
        sum_correct += pair.first;
        sum_total += pair.second;
    }
    CHECK(sum_correct == counts.correct);
    CHECK(sum_total == counts.total);
}

TEST_CASE("micro average is total-weighted") {
    EvalCounts a;
    a.correct = 9;
    a.total = 10;
    a.per_char['a'] = {9, 10};
    EvalCounts b;
    b.correct = 1;
    b.total = 10;
    b.per_char['b'] = {1, 10};
    CHECK(micro_average({a, b}) == doctest::Approx(0.5));
    CHECK(micro_average({a}) == doctest::Approx(0.9));

    EvalCounts perfect;
    perfect.correct = 42;
    perfect.total = 42;
    CHECK(micro_average({perfect, perfect}) == doctest::Approx(1.0));

    EvalCounts single;
    single.correct = 8;
    single.total = 10;
    CHECK(micro_average({single}) == doctest::Approx(0.8));

    CHECK_THROWS_AS(micro_average({}), DataError);
}

TEST_CASE("dataset ids outside the matrix are rejected") {
    Fixture f = random_embeddings(10, 4, 17);
    f.data.examples.push_back({"bad", 1000, true});
    CHECK_THROWS_AS(train_probe(f.emb, f.data, small_config(17)), DataError);
}

TEST_CASE("checkpoints round trip through float32") {
    testutil::TempDir tmp;
    Fixture f = random_embeddings(30, 6, 18);
    ProbeMlp model = train_probe(f.emb, f.data, small_config(18));
    write_probe(model, tmp.file("probe.bin"));
    ProbeMlp back = read_probe(tmp.file("probe.bin"));
    CHECK(back.input_dim == model.input_dim);
    CHECK(back.hidden1 == model.hidden1);
    CHECK(back.hidden2 == model.hidden2);
    auto orig = probe_detail::pack_parameters(model);
    auto loaded = probe_detail::pack_parameters(back);
    REQUIRE(orig.size() == loaded.size());
    for (size_t i = 0; i < orig.size(); ++i)
        CHECK(loaded[i] == static_cast<double>(static_cast<float>(orig[i])));

    // quantized model still evaluates identically enough to keep counts
    EvalCounts a = eval_probe(model, f.emb, f.data);
    EvalCounts b = eval_probe(back, f.emb, f.data);
    CHECK(std::abs(static_cast<double>(a.correct) - static_cast<double>(b.correct)) <=
          2.0);
}
