#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "charprobe/analysis.hpp"
#include "charprobe/corpus.hpp"
#include "charprobe/embeddings.hpp"
#include "charprobe/error.hpp"
#include "charprobe/probe.hpp"
#include "charprobe/probedata.hpp"
#include "charprobe/rng.hpp"
#include "charprobe/tokenizer.hpp"
#include "charprobe/transforms.hpp"

namespace py = pybind11;
using namespace charprobe;

namespace {

TokenizerKind kind_from_name(const std::string& name) {
    if (name == "bpe") return TokenizerKind::kBpe;
    if (name == "controlled") return TokenizerKind::kControlled;
    if (name == "tcs") return TokenizerKind::kTcs;
    if (name == "word") return TokenizerKind::kWord;
    throw DataError("unknown tokenizer kind: " + name);
}

py::array_t<float> matrix_values(const EmbeddingMatrix& m) {
    py::array_t<float> out({static_cast<py::ssize_t>(m.vocab_size),
                            static_cast<py::ssize_t>(m.dim)});
    std::memcpy(out.mutable_data(), m.values.data(), m.values.size() * sizeof(float));
    return out;
}

} // namespace

PYBIND11_MODULE(_charprobe, m) {
    m.doc() = "tokenizer construction, corpus transforms and character probes";

    py::register_exception<DataError>(m, "DataError");

    m.attr("SPACE_MARKER") = std::string(kSpaceMarker);
    m.attr("SELU_ALPHA") = kSeluAlpha;
    m.attr("SELU_LAMBDA") = kSeluLambda;

    // rng
    py::class_<SeedSpec>(m, "SeedSpec")
        .def(py::init([](uint64_t seed, const std::string& label) {
                 return SeedSpec{seed, label};
             }),
             py::arg("global_seed"), py::arg("stream_label"))
        .def_readwrite("global_seed", &SeedSpec::global_seed)
        .def_readwrite("stream_label", &SeedSpec::stream_label);

    py::class_<RandomStream>(m, "RandomStream")
        .def("next_u64", &RandomStream::next_u64)
        .def("next_double", &RandomStream::next_double)
        .def("next_below", &RandomStream::next_below)
        .def("fork", &RandomStream::fork);

    m.def("derive_stream", &derive_stream, py::arg("seed"), py::arg("index") = 0);
    m.def("fnv1a64", [](const std::string& data) { return fnv1a64(data); });

    // corpus
    py::class_<Corpus>(m, "Corpus")
        .def(py::init<>())
        .def(py::init([](std::vector<std::string> docs) {
                 Corpus c;
                 c.documents = std::move(docs);
                 return c;
             }),
             py::arg("documents"))
        .def_readwrite("documents", &Corpus::documents)
        .def_property_readonly("doc_count", &Corpus::doc_count);

    m.def("load_corpus", &load_corpus);
    m.def("write_corpus", &write_corpus);

    // tokenizers
    py::enum_<MergeStage>(m, "MergeStage")
        .value("MARKER1", MergeStage::kMarker1)
        .value("CHAR2", MergeStage::kChar2)
        .value("MARKER2", MergeStage::kMarker2)
        .value("CHAR3", MergeStage::kChar3)
        .value("MARKER3", MergeStage::kMarker3)
        .value("NONE", MergeStage::kNone);

    py::class_<MergeRule>(m, "MergeRule")
        .def_readonly("left", &MergeRule::left)
        .def_readonly("right", &MergeRule::right)
        .def_readonly("rank", &MergeRule::rank)
        .def_readonly("stage", &MergeRule::stage);

    py::class_<MergeTable>(m, "MergeTable")
        .def(py::init<>())
        .def("add_rule", &MergeTable::add_rule, py::arg("left"), py::arg("right"),
             py::arg("stage") = MergeStage::kNone)
        .def("add_base_symbol", &MergeTable::add_base_symbol)
        .def("rules", &MergeTable::rules, py::return_value_policy::reference_internal)
        .def_property_readonly("rule_count", &MergeTable::rule_count)
        .def("rank_of",
             [](const MergeTable& t, const std::string& l, const std::string& r) {
                 return t.rank_of(l, r);
             })
        .def("strength",
             [](const MergeTable& t, const std::string& l, const std::string& r) {
                 return t.strength(l, r);
             })
        .def_readwrite("stage_major", &MergeTable::stage_major);

    py::class_<Vocabulary>(m, "Vocabulary")
        .def(py::init<>())
        .def("add", &Vocabulary::add)
        .def("id_of", [](const Vocabulary& v, const std::string& t) { return v.id_of(t); })
        .def("token_of", &Vocabulary::token_of, py::return_value_policy::copy)
        .def("__len__", &Vocabulary::size)
        .def("tokens", &Vocabulary::tokens)
        .def("content_hash", &Vocabulary::content_hash);

    py::class_<Tokenizer>(m, "Tokenizer")
        .def(py::init<>())
        .def_readwrite("vocab", &Tokenizer::vocab)
        .def_readwrite("merges", &Tokenizer::merges);

    py::class_<TokenizedCorpus>(m, "TokenizedCorpus")
        .def(py::init<>())
        .def_readwrite("documents", &TokenizedCorpus::documents)
        .def_property_readonly("token_count", &TokenizedCorpus::token_count);

    m.def("has_marker", [](const std::string& t) { return has_marker(t); });
    m.def("strip_marker",
          [](const std::string& t) { return std::string(strip_marker(t)); });
    m.def("token_alpha_length",
          [](const std::string& t) { return token_alpha_length(t); });
    m.def("pretokenize", [](const std::string& t) { return pretokenize(t); });
    m.def("detokenize", &detokenize);
    m.def("apply_merges",
          [](const std::string& word, const MergeTable& table) {
              return apply_merges(word, table);
          });
    m.def("train_bpe", &train_bpe, py::arg("corpus"), py::arg("vocab_size"));
    m.def(
        "build_controlled_tokenizer",
        [](const SeedSpec& seed, int alphabet) {
            return build_controlled_tokenizer(seed, alphabet);
        },
        py::arg("seed"), py::arg("alphabet_size") = 26);
    m.def("merge_strength",
          [](const MergeTable& t, const std::string& l, const std::string& r) {
              return merge_strength(t, l, r);
          });
    m.def("tokenize_tcs", [](const std::string& w) { return tokenize_tcs(w); });
    m.def("tokenize_word", [](const std::string& t) { return tokenize_word(t); });
    m.def(
        "tokenize_document",
        [](const std::string& text, const std::string& kind, const MergeTable* table) {
            return tokenize_document(text, kind_from_name(kind), table);
        },
        py::arg("text"), py::arg("kind"), py::arg("merges") = nullptr);
    m.def("build_word_vocab", &build_word_vocab, py::arg("corpus"),
          py::arg("max_size") = 0);
    m.def(
        "encode_corpus",
        [](const Corpus& corpus, const std::string& kind, const Vocabulary& vocab,
           const MergeTable* table, bool skip_oov) {
            return encode_corpus(corpus, kind_from_name(kind), vocab, table,
                                 skip_oov ? OovPolicy::kSkip : OovPolicy::kError);
        },
        py::arg("corpus"), py::arg("kind"), py::arg("vocab"),
        py::arg("merges") = nullptr, py::arg("skip_oov") = false);
    m.def("write_merges", &write_merges);
    m.def("read_merges", &read_merges);
    m.def("write_vocab", &write_vocab);
    m.def("read_vocab", &read_vocab);
    m.def("write_tokenized", &write_tokenized);
    m.def("read_tokenized", &read_tokenized);

    // transforms
    m.def("charpert", [](const std::string& doc, RandomStream& stream) {
        return charpert(doc, stream);
    });
    m.def("charpert_corpus", &charpert_corpus);

    py::class_<WordSubMap>(m, "WordSubMap")
        .def(py::init<>())
        .def_readwrite("mapping", &WordSubMap::mapping)
        .def("inverted", &WordSubMap::inverted);

    m.def("collect_word_types", &collect_word_types);
    m.def("build_wordsub_map", &build_wordsub_map);
    m.def("wordsub_apply", [](const std::string& doc, const WordSubMap& map) {
        return wordsub_apply(doc, map);
    });
    m.def("wordsub_corpus", &wordsub_corpus);
    m.def("token_substitute", &token_substitute);
    m.def("porter_stem", [](const std::string& w) { return porter_stem(w); });

    py::class_<LemmaMap>(m, "LemmaMap")
        .def(py::init<>())
        .def_readwrite("mapping", &LemmaMap::mapping);
    m.def("load_lemma_map", &load_lemma_map);
    m.def("lemmatize", [](const std::string& w, const LemmaMap& map) {
        return lemmatize(w, map);
    });
    m.def("stem_corpus", &stem_corpus);
    m.def("lemma_corpus", &lemma_corpus);

    // probe data
    py::enum_<MatchingMode>(m, "MatchingMode")
        .value("MATCHED", MatchingMode::kMatched)
        .value("UNMATCHED", MatchingMode::kUnmatched);

    py::class_<ProbeExample>(m, "ProbeExample")
        .def(py::init([](std::string token, int32_t id, bool label) {
                 return ProbeExample{std::move(token), id, label};
             }),
             py::arg("token"), py::arg("token_id"), py::arg("label"))
        .def_readwrite("token", &ProbeExample::token)
        .def_readwrite("token_id", &ProbeExample::token_id)
        .def_readwrite("label", &ProbeExample::label);

    py::class_<ProbeDataset>(m, "ProbeDataset")
        .def(py::init<>())
        .def_readwrite("target_char", &ProbeDataset::target_char)
        .def_readwrite("mode", &ProbeDataset::mode)
        .def_readwrite("examples", &ProbeDataset::examples);

    m.def("token_contains", [](const std::string& t, char alpha) {
        return token_contains(t, alpha);
    });
    m.def("filter_vocab", &filter_vocab);
    m.def("build_dataset", &build_dataset, py::arg("vocab"), py::arg("filtered_ids"),
          py::arg("alpha"), py::arg("mode"), py::arg("stream"));
    m.def("length_buckets", &length_buckets);
    m.def("six_group_partition", &six_group_partition);
    m.def("six_group_label", &six_group_label);

    py::enum_<ContextSide>(m, "ContextSide")
        .value("PRECEDING", ContextSide::kPreceding)
        .value("FOLLOWING", ContextSide::kFollowing);

    py::class_<FoldSpec>(m, "FoldSpec")
        .def_readonly("k", &FoldSpec::k)
        .def_readonly("side", &FoldSpec::side)
        .def_readonly("group_to_fold", &FoldSpec::group_to_fold)
        .def_readonly("fold_of", &FoldSpec::fold_of)
        .def_readonly("fold_sizes", &FoldSpec::fold_sizes)
        .def("balance_ratio", &FoldSpec::balance_ratio);

    m.def("context_group_folds", &context_group_folds, py::arg("dataset"),
          py::arg("alpha"), py::arg("side"), py::arg("k"), py::arg("stream"));
    m.def("write_dataset", &write_dataset);
    m.def("read_dataset", &read_dataset);

    // embeddings
    py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
        .def(py::init<>())
        .def_readwrite("vocab_size", &EmbeddingMatrix::vocab_size)
        .def_readwrite("dim", &EmbeddingMatrix::dim)
        .def_readwrite("vocab_hash", &EmbeddingMatrix::vocab_hash)
        .def_property(
            "values", &matrix_values,
            [](EmbeddingMatrix& m_, py::array_t<float, py::array::c_style> arr) {
                if (arr.ndim() != 2) throw DataError("values must be 2-d");
                m_.vocab_size = static_cast<uint32_t>(arr.shape(0));
                m_.dim = static_cast<uint32_t>(arr.shape(1));
                m_.values.assign(arr.data(), arr.data() + arr.size());
            })
        .def("row", [](const EmbeddingMatrix& m_, uint32_t id) {
            if (id >= m_.vocab_size) throw DataError("row out of range");
            return std::vector<float>(m_.row(id), m_.row(id) + m_.dim);
        });

    py::class_<SgnsConfig>(m, "SgnsConfig")
        .def(py::init<>())
        .def_readwrite("dim", &SgnsConfig::dim)
        .def_readwrite("window", &SgnsConfig::window)
        .def_readwrite("negatives", &SgnsConfig::negatives)
        .def_readwrite("epochs", &SgnsConfig::epochs)
        .def_readwrite("initial_lr", &SgnsConfig::initial_lr);

    py::class_<SgnsStats>(m, "SgnsStats")
        .def(py::init<>())
        .def_readonly("epoch_mean_loss", &SgnsStats::epoch_mean_loss);

    m.def(
        "train_embeddings",
        [](const TokenizedCorpus& corpus, const Vocabulary& vocab,
           const SgnsConfig& cfg, RandomStream stream) {
            SgnsStats stats;
            EmbeddingMatrix matrix = train_embeddings(corpus, vocab, cfg,
                                                      stream, &stats);
            return py::make_tuple(std::move(matrix), std::move(stats));
        },
        py::arg("corpus"), py::arg("vocab"), py::arg("config"), py::arg("stream"));
    m.def("write_matrix", &write_matrix);
    m.def("read_matrix", py::overload_cast<const std::string&>(&read_matrix));
    m.def("read_matrix_checked",
          py::overload_cast<const std::string&, uint64_t>(&read_matrix));
    m.def("import_text_matrix", &import_text_matrix);

    // probe
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("hidden1", &TrainConfig::hidden1)
        .def_readwrite("hidden2", &TrainConfig::hidden2)
        .def_readwrite("dropout_rate", &TrainConfig::dropout_rate)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<ProbeMlp>(m, "ProbeMlp")
        .def_readonly("input_dim", &ProbeMlp::input_dim)
        .def_readonly("hidden1", &ProbeMlp::hidden1)
        .def_readonly("hidden2", &ProbeMlp::hidden2)
        .def_property_readonly("parameter_count", &ProbeMlp::parameter_count);

    py::class_<EvalCounts>(m, "EvalCounts")
        .def(py::init<>())
        .def_readwrite("correct", &EvalCounts::correct)
        .def_readwrite("total", &EvalCounts::total)
        .def_readwrite("per_char", &EvalCounts::per_char);

    m.def("train_probe", &train_probe);
    m.def("eval_probe", &eval_probe);
    m.def("predict_probe", &predict_probe);
    m.def("micro_average", &micro_average);
    m.def("write_probe", &write_probe);
    m.def("read_probe", &read_probe);

    // analysis
    py::class_<BoundaryPairTable>(m, "BoundaryPairTable")
        .def_readonly("total", &BoundaryPairTable::total)
        .def_readonly("within_word_only", &BoundaryPairTable::within_word_only)
        .def("count", [](const BoundaryPairTable& t, char l, char r) {
            return t.count(static_cast<unsigned char>(l), static_cast<unsigned char>(r));
        });

    m.def("boundary_pair_stats", &boundary_pair_stats, py::arg("corpus"),
          py::arg("vocab"), py::arg("within_word_only") = true);

    py::class_<SpearmanResult>(m, "SpearmanResult")
        .def_readonly("rho", &SpearmanResult::rho)
        .def_readonly("n", &SpearmanResult::n)
        .def_readonly("degenerate", &SpearmanResult::degenerate);

    m.def("spearman", &spearman);
    m.def("spearman_permutation_pvalue", &spearman_permutation_pvalue, py::arg("x"),
          py::arg("y"), py::arg("permutations"), py::arg("stream"));

    py::class_<BoundaryCorrelation::Row>(m, "BoundaryRow")
        .def_readonly("left", &BoundaryCorrelation::Row::left)
        .def_readonly("right", &BoundaryCorrelation::Row::right)
        .def_readonly("rank_position", &BoundaryCorrelation::Row::rank_position)
        .def_readonly("frequency", &BoundaryCorrelation::Row::frequency);

    py::class_<BoundaryCorrelation>(m, "BoundaryCorrelation")
        .def_readonly("rows", &BoundaryCorrelation::rows)
        .def_readonly("correlation", &BoundaryCorrelation::correlation);

    m.def("correlate_strength_frequency", &correlate_strength_frequency);
    m.def("write_boundary_csv", &write_boundary_csv);
    m.def("write_scatter_svg", &write_scatter_svg);

    py::enum_<ConditionPattern>(m, "ConditionPattern")
        .value("MARKER_2_3", ConditionPattern::kMarker23)
        .value("MARKER_2_X3", ConditionPattern::kMarker2X3)
        .value("PLAIN_3_2", ConditionPattern::kPlain32)
        .value("MARKER_3_2", ConditionPattern::kMarker32);

    py::class_<ConditionCase>(m, "ConditionCase")
        .def(py::init([](ConditionPattern pattern, char alpha, char beta, char gamma,
                         char delta, char x, char y) {
                 return ConditionCase{pattern, alpha, beta, gamma, delta, x, y};
             }),
             py::arg("pattern"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"),
             py::arg("delta"), py::arg("x"), py::arg("y") = 'a')
        .def_readwrite("pattern", &ConditionCase::pattern);

    py::class_<ConditionOutcome>(m, "ConditionOutcome")
        .def_readonly("segmentation", &ConditionOutcome::segmentation)
        .def_readonly("target_matched", &ConditionOutcome::target_matched)
        .def_readonly("condition_holds", &ConditionOutcome::condition_holds)
        .def_readonly("implication_ok", &ConditionOutcome::implication_ok);

    m.def("check_condition", &check_condition);

    py::class_<ConditionReport::PatternStats>(m, "PatternStats")
        .def_readonly("trials", &ConditionReport::PatternStats::trials)
        .def_readonly("target_hits", &ConditionReport::PatternStats::target_hits)
        .def_readonly("violations", &ConditionReport::PatternStats::violations);

    py::class_<ConditionReport>(m, "ConditionReport")
        .def_readonly("patterns", &ConditionReport::patterns)
        .def("total_violations", &ConditionReport::total_violations);

    m.def("enumerate_conditions", &enumerate_conditions, py::arg("alphabet_size"),
          py::arg("trials"), py::arg("stream"));
    m.def("write_condition_csv", &write_condition_csv);
    m.def("condition_pattern_name", &condition_pattern_name);
}
