// charprobe: tokenizer construction, corpus transforms, probe dataset and
// embedding pipelines, and the boundary/condition analyses, one subcommand
// per stage. Every artifact directory receives a manifest recording the
// command line, seed and input hashes.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "charprobe/analysis.hpp"
#include "charprobe/corpus.hpp"
#include "charprobe/embeddings.hpp"
#include "charprobe/error.hpp"
#include "charprobe/manifest.hpp"
#include "charprobe/parallel.hpp"
#include "charprobe/probe.hpp"
#include "charprobe/probedata.hpp"
#include "charprobe/rng.hpp"
#include "charprobe/tokenizer.hpp"
#include "charprobe/transforms.hpp"

namespace fs = std::filesystem;
using namespace charprobe;

namespace {

struct Ctx {
    std::vector<std::string> argv;
    std::optional<uint64_t> seed;
    std::vector<std::string> inputs;
    std::string out_dir;

    void finish() const {
        if (out_dir.empty()) return;
        write_manifest(make_manifest(argv, seed, inputs), out_dir);
    }
};

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

// vocab file + merges file; single-codepoint vocab entries extend the base
// alphabet so rule-free symbols still tokenize
Tokenizer load_tokenizer(const std::string& vocab_path, const std::string& merges_path) {
    Tokenizer tok;
    tok.vocab = read_vocab(vocab_path);
    tok.merges = read_merges(merges_path);
    for (const auto& token : tok.vocab.tokens()) {
        std::string_view body = strip_marker(token);
        bool single = !body.empty() &&
                      (body.size() == 1 ||
                       (static_cast<unsigned char>(body[0]) >= 0xC0 &&
                        body.size() <= 4 &&
                        (static_cast<unsigned char>(body[1]) & 0xC0) == 0x80));
        if (!has_marker(token) && single) tok.merges.add_base_symbol(token);
    }
    return tok;
}

std::string seed_desc(const SeedSpec& seed, uint64_t index) {
    return std::to_string(seed.global_seed) + "/" + seed.stream_label + "/" +
           std::to_string(index);
}

double accuracy_of(const EvalCounts& c) {
    return c.total == 0 ? 0.0 : static_cast<double>(c.correct) / static_cast<double>(c.total);
}

void write_eval_report(const std::map<char, EvalCounts>& by_char, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open report for writing: " + path);
    out << "char,correct,total,accuracy\n";
    uint64_t correct = 0, total = 0;
    out.precision(6);
    out << std::fixed;
    for (const auto& [ch, counts] : by_char) {
        out << ch << ',' << counts.correct << ',' << counts.total << ','
            << accuracy_of(counts) << '\n';
        correct += counts.correct;
        total += counts.total;
    }
    double micro = total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    out << "micro," << correct << ',' << total << ',' << micro << '\n';
    if (!out) throw DataError("I/O failure writing report: " + path);
}

// 80/20 split, stratified by label; split order comes from the stream
std::pair<ProbeDataset, ProbeDataset> split_dataset(const ProbeDataset& data,
                                                    RandomStream stream) {
    ProbeDataset train, eval;
    train.target_char = eval.target_char = data.target_char;
    train.mode = eval.mode = data.mode;
    for (bool label : {true, false}) {
        std::vector<size_t> indices;
        for (size_t i = 0; i < data.examples.size(); ++i)
            if (data.examples[i].label == label) indices.push_back(i);
        stream.shuffle(indices);
        size_t eval_count = indices.size() / 5;
        for (size_t k = 0; k < indices.size(); ++k)
            (k < eval_count ? eval : train).examples.push_back(data.examples[indices[k]]);
    }
    return {std::move(train), std::move(eval)};
}

std::vector<std::string> dataset_files(const std::string& data_dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(data_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.rfind("probe_", 0) == 0 && entry.path().extension() == ".tsv")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw DataError("no probe_<char>.tsv datasets found in " + data_dir);
    return files;
}

// ---------------------------------------------------------------------------

int cmd_train_bpe(Ctx& ctx, const std::string& in, size_t vocab_size) {
    ensure_out_dir(ctx.out_dir);
    Corpus corpus = load_corpus(in);
    Tokenizer tok = train_bpe(corpus, vocab_size);
    write_vocab(tok.vocab, ctx.out_dir + "/vocab.txt");
    write_merges(tok.merges, ctx.out_dir + "/merges.txt");
    std::cout << "trained " << tok.merges.rule_count() << " merges, vocabulary "
              << tok.vocab.size() << "\n";
    ctx.finish();
    return 0;
}

int cmd_build_controlled(Ctx& ctx, uint64_t seed, int alphabet) {
    ensure_out_dir(ctx.out_dir);
    Tokenizer tok = build_controlled_tokenizer(SeedSpec{seed, "controlled"}, alphabet);
    write_vocab(tok.vocab, ctx.out_dir + "/vocab.txt");
    write_merges(tok.merges, ctx.out_dir + "/merges.txt");
    std::cout << "controlled tokenizer: " << tok.vocab.size() << " tokens, "
              << tok.merges.rule_count() << " merge rules\n";
    ctx.finish();
    return 0;
}

int cmd_tokenize(Ctx& ctx, const std::string& kind, const std::string& in,
                 const std::string& vocab_path, const std::string& merges_path,
                 size_t max_vocab, bool oov_skip) {
    ensure_out_dir(ctx.out_dir);
    Corpus corpus = load_corpus(in);
    OovPolicy oov = oov_skip ? OovPolicy::kSkip : OovPolicy::kError;

    TokenizerKind tk;
    if (kind == "bpe") tk = TokenizerKind::kBpe;
    else if (kind == "controlled") tk = TokenizerKind::kControlled;
    else if (kind == "tcs") tk = TokenizerKind::kTcs;
    else tk = TokenizerKind::kWord;

    Vocabulary vocab;
    const MergeTable* merges = nullptr;
    Tokenizer loaded;
    if (tk == TokenizerKind::kBpe || tk == TokenizerKind::kControlled) {
        loaded = load_tokenizer(vocab_path, merges_path);
        vocab = std::move(loaded.vocab);
        merges = &loaded.merges;
    } else if (tk == TokenizerKind::kWord) {
        vocab = build_word_vocab(corpus, max_vocab);
        if (max_vocab > 0) oov = OovPolicy::kSkip; // capped vocab always skips
        write_vocab(vocab, ctx.out_dir + "/vocab.txt");
    } else {
        vocab = collect_token_vocab(corpus, tk);
        write_vocab(vocab, ctx.out_dir + "/vocab.txt");
    }

    TokenizedCorpus enc = encode_corpus(corpus, tk, vocab, merges, oov);
    write_tokenized(enc, ctx.out_dir + "/tokens.txt");
    std::cout << "tokenized " << corpus.doc_count() << " documents, "
              << enc.token_count() << " tokens\n";
    ctx.finish();
    return 0;
}

int cmd_transform(Ctx& ctx, const std::string& kind, const std::string& in,
                  uint64_t seed, const std::string& lemmas,
                  const std::string& tokens_path, const std::string& vocab_path) {
    ensure_out_dir(ctx.out_dir);
    if (kind == "toksub") {
        Vocabulary vocab = read_vocab(vocab_path);
        TokenizedCorpus tokens = read_tokenized(tokens_path);
        RandomStream stream = derive_stream({seed, "toksub"}, 0);
        TokenizedCorpus out = token_substitute(tokens, vocab, stream);
        write_tokenized(out, ctx.out_dir + "/tokens.txt");
        std::cout << "substituted " << out.token_count() << " token occurrences\n";
        ctx.finish();
        return 0;
    }

    Corpus corpus = load_corpus(in);
    Corpus out;
    if (kind == "charpert") {
        out = charpert_corpus(corpus, {seed, "charpert"});
    } else if (kind == "wordsub") {
        auto types = collect_word_types(corpus);
        WordSubMap map = build_wordsub_map(types, {seed, "wordsub"});
        out = wordsub_corpus(corpus, map);
    } else if (kind == "stem") {
        out = stem_corpus(corpus);
    } else { // lemma
        LemmaMap map = load_lemma_map(lemmas);
        out = lemma_corpus(corpus, map);
    }
    write_corpus(out, ctx.out_dir + "/corpus.txt");
    std::cout << "transformed " << out.doc_count() << " documents (" << kind << ")\n";
    ctx.finish();
    return 0;
}

int cmd_probe_data(Ctx& ctx, const std::string& chars, const std::string& mode_name,
                   const std::string& vocab_path, uint64_t seed) {
    ensure_out_dir(ctx.out_dir);
    Vocabulary vocab = read_vocab(vocab_path);
    auto filtered = filter_vocab(vocab);
    MatchingMode mode =
        mode_name == "matched" ? MatchingMode::kMatched : MatchingMode::kUnmatched;

    std::string targets = chars == "all" ? "abcdefghijklmnopqrstuvwxyz" : chars;
    SeedSpec spec{seed, "probedata"};
    for (char alpha : targets) {
        uint64_t index = static_cast<uint64_t>(alpha - 'a');
        ProbeDataset d = build_dataset(vocab, filtered, alpha, mode,
                                       derive_stream(spec, index));
        write_dataset(d, ctx.out_dir + "/probe_" + std::string(1, alpha) + ".tsv",
                      seed_desc(spec, index));
        std::cout << "char " << alpha << ": " << d.examples.size() << " examples\n";
    }
    ctx.finish();
    return 0;
}

int cmd_train_emb(Ctx& ctx, const std::string& tokens_path, const std::string& vocab_path,
                  const SgnsConfig& cfg, uint64_t seed) {
    ensure_out_dir(ctx.out_dir);
    Vocabulary vocab = read_vocab(vocab_path);
    TokenizedCorpus tokens = read_tokenized(tokens_path);
    SgnsStats stats;
    EmbeddingMatrix m = train_embeddings(tokens, vocab, cfg,
                                         derive_stream({seed, "sgns"}, 0), &stats);
    write_matrix(m, ctx.out_dir + "/emb.bin");
    std::cout << "trained " << m.vocab_size << " x " << m.dim << " embeddings";
    if (!stats.epoch_mean_loss.empty())
        std::cout << ", final epoch loss " << stats.epoch_mean_loss.back();
    std::cout << "\n";
    ctx.finish();
    return 0;
}

int cmd_import_emb(Ctx& ctx, const std::string& in) {
    ensure_out_dir(ctx.out_dir);
    auto [vocab, matrix] = import_text_matrix(in);
    write_vocab(vocab, ctx.out_dir + "/vocab.txt");
    write_matrix(matrix, ctx.out_dir + "/emb.bin");
    std::cout << "imported " << matrix.vocab_size << " x " << matrix.dim
              << " embeddings\n";
    ctx.finish();
    return 0;
}

struct ProbeFlags {
    bool train = false;
    bool eval = false;
    bool buckets = false;
    bool six_group = false;
    std::string context_folds; // "", "prev" or "next"
    uint32_t hidden1 = 256, hidden2 = 128, epochs = 3, batch = 64;
};

int cmd_probe(Ctx& ctx, const std::string& emb_path, const std::string& vocab_path,
              const std::string& data_dir, uint64_t seed, const ProbeFlags& flags) {
    ensure_out_dir(ctx.out_dir);
    Vocabulary vocab = read_vocab(vocab_path);
    EmbeddingMatrix emb = read_matrix(emb_path, vocab.content_hash());
    auto files = dataset_files(data_dir);

    auto config_for = [&](char alpha) {
        TrainConfig cfg;
        cfg.hidden1 = flags.hidden1;
        cfg.hidden2 = flags.hidden2;
        cfg.epochs = flags.epochs;
        cfg.batch_size = flags.batch;
        cfg.seed = {seed, std::string("probe-") + alpha};
        return cfg;
    };

    if (!flags.context_folds.empty()) {
        ContextSide side = flags.context_folds == "prev" ? ContextSide::kPreceding
                                                         : ContextSide::kFollowing;
        std::ofstream out(ctx.out_dir + "/context_folds.csv", std::ios::binary);
        out << "char,fold,correct,total,accuracy\n";
        out.precision(6);
        out << std::fixed;
        uint64_t grand_correct = 0, grand_total = 0;
        std::vector<std::string> rows(files.size());
        std::vector<std::pair<uint64_t, uint64_t>> sums(files.size());
        parallel_for(files.size(), [&](size_t i) {
            ProbeDataset data = read_dataset(files[i]);
            char alpha = data.target_char;
            FoldSpec folds = context_group_folds(
                data, alpha, side, 5,
                derive_stream({seed, std::string("folds-") + alpha}, 0));
            std::ostringstream local;
            local.precision(6);
            local << std::fixed;
            uint64_t correct = 0, total = 0;
            for (int f = 0; f < folds.k; ++f) {
                ProbeDataset train, eval;
                train.target_char = eval.target_char = alpha;
                for (size_t e = 0; e < data.examples.size(); ++e)
                    (folds.fold_of[e] == f ? eval : train)
                        .examples.push_back(data.examples[e]);
                TrainConfig cfg = config_for(alpha);
                cfg.seed.stream_label += "-fold" + std::to_string(f);
                ProbeMlp model = train_probe(emb, train, cfg);
                EvalCounts counts = eval_probe(model, emb, eval);
                local << alpha << ',' << f << ',' << counts.correct << ','
                      << counts.total << ',' << accuracy_of(counts) << '\n';
                correct += counts.correct;
                total += counts.total;
            }
            rows[i] = local.str();
            sums[i] = {correct, total};
        });
        for (size_t i = 0; i < files.size(); ++i) {
            out << rows[i];
            grand_correct += sums[i].first;
            grand_total += sums[i].second;
        }
        double micro = grand_total == 0
                           ? 0.0
                           : static_cast<double>(grand_correct) / grand_total;
        out << "micro,-," << grand_correct << ',' << grand_total << ',' << micro
            << '\n';
        std::cout << "context-fold CV micro accuracy: " << micro << "\n";
        ctx.finish();
        return 0;
    }

    std::map<char, EvalCounts> report;
    std::map<std::string, EvalCounts> bucket_report;
    std::map<std::string, std::pair<uint64_t, uint64_t>> six_report;
    std::mutex merge_mutex;

    parallel_for(files.size(), [&](size_t i) {
        ProbeDataset data = read_dataset(files[i]);
        char alpha = data.target_char;
        std::string ckpt = ctx.out_dir + "/probe_" + std::string(1, alpha) + ".bin";

        ProbeMlp model;
        ProbeDataset eval_set;
        if (flags.train) {
            auto [train, eval] = split_dataset(
                data, derive_stream({seed, std::string("split-") + alpha}, 0));
            model = train_probe(emb, train, config_for(alpha));
            write_probe(model, ckpt);
            eval_set = std::move(eval);
        } else {
            model = read_probe(ckpt);
            eval_set = std::move(data);
        }
        EvalCounts counts = eval_probe(model, emb, eval_set);

        std::map<std::string, EvalCounts> local_buckets;
        if (flags.buckets) {
            auto buckets = length_buckets(eval_set);
            for (size_t b = 0; b < buckets.size(); ++b)
                if (!buckets[b].examples.empty())
                    local_buckets[length_bucket_name(b)] =
                        eval_probe(model, emb, buckets[b]);
        }
        std::map<std::string, std::pair<uint64_t, uint64_t>> local_six;
        if (flags.six_group) {
            std::vector<ProbeExample> positives;
            for (const auto& ex : eval_set.examples)
                if (ex.label) positives.push_back(ex);
            for (auto& [key, members] : six_group_partition(positives, alpha)) {
                ProbeDataset group;
                group.target_char = alpha;
                group.examples = std::move(members);
                EvalCounts c = eval_probe(model, emb, group);
                local_six[six_group_label(key)] = {c.correct, c.total};
            }
        }

        std::lock_guard<std::mutex> lock(merge_mutex);
        report[alpha] = counts;
        for (auto& [name, c] : local_buckets) {
            bucket_report[name].correct += c.correct;
            bucket_report[name].total += c.total;
        }
        for (auto& [name, pair] : local_six) {
            six_report[name].first += pair.first;
            six_report[name].second += pair.second;
        }
    });

    write_eval_report(report, ctx.out_dir + "/report.csv");
    if (flags.buckets) {
        std::ofstream out(ctx.out_dir + "/buckets.csv", std::ios::binary);
        out << "bucket,correct,total,accuracy\n";
        out.precision(6);
        out << std::fixed;
        for (const auto& [name, c] : bucket_report)
            out << name << ',' << c.correct << ',' << c.total << ','
                << accuracy_of(c) << '\n';
    }
    if (flags.six_group) {
        std::ofstream out(ctx.out_dir + "/six_group.csv", std::ios::binary);
        out << "group,correct,total,accuracy\n";
        out.precision(6);
        out << std::fixed;
        for (const auto& [name, pair] : six_report) {
            double acc = pair.second == 0
                             ? 0.0
                             : static_cast<double>(pair.first) / pair.second;
            out << name << ',' << pair.first << ',' << pair.second << ',' << acc
                << '\n';
        }
    }

    std::vector<EvalCounts> all;
    for (const auto& [ch, c] : report) all.push_back(c);
    std::cout << "micro-averaged accuracy: " << micro_average(all) << "\n";
    ctx.finish();
    return 0;
}

int cmd_analyze_boundaries(Ctx& ctx, const std::string& tokens_path,
                           const std::string& vocab_path, const std::string& merges_path,
                           bool include_word_boundaries, size_t permutations,
                           uint64_t seed) {
    ensure_out_dir(ctx.out_dir);
    Vocabulary vocab = read_vocab(vocab_path);
    MergeTable merges = read_merges(merges_path);
    TokenizedCorpus tokens = read_tokenized(tokens_path);

    BoundaryPairTable table =
        boundary_pair_stats(tokens, vocab, !include_word_boundaries);
    BoundaryCorrelation corr = correlate_strength_frequency(table, merges);
    write_boundary_csv(corr, ctx.out_dir + "/boundaries.csv");

    std::cout << "pairs: " << corr.rows.size() << ", adjacencies: " << table.total
              << ", spearman rho: " << corr.correlation.rho;
    if (corr.correlation.degenerate) std::cout << " (degenerate)";
    std::cout << "\n";

    if (permutations > 0) {
        std::vector<double> positions, frequencies;
        for (const auto& row : corr.rows) {
            positions.push_back(static_cast<double>(row.rank_position));
            frequencies.push_back(static_cast<double>(row.frequency));
        }
        double p = spearman_permutation_pvalue(positions, frequencies, permutations,
                                               derive_stream({seed, "perm"}, 0));
        std::cout << "permutation p-value (greater): " << p << "\n";
    }
    ctx.finish();
    return 0;
}

int cmd_verify_conditions(Ctx& ctx, int alphabet, uint64_t trials, uint64_t seed) {
    ensure_out_dir(ctx.out_dir);
    ConditionReport report =
        enumerate_conditions(alphabet, trials, derive_stream({seed, "conditions"}, 0));
    write_condition_csv(report, ctx.out_dir + "/conditions.csv");
    constexpr ConditionPattern kPatterns[4] = {
        ConditionPattern::kMarker23, ConditionPattern::kMarker2X3,
        ConditionPattern::kPlain32, ConditionPattern::kMarker32};
    for (size_t p = 0; p < 4; ++p)
        std::cout << condition_pattern_name(kPatterns[p]) << ": "
                  << report.patterns[p].trials << " trials, "
                  << report.patterns[p].target_hits << " target hits, "
                  << report.patterns[p].violations << " violations\n";
    std::cout << "total violations: " << report.total_violations() << "\n";
    ctx.finish();
    return report.total_violations() == 0 ? 0 : 2;
}

int cmd_report(Ctx& ctx, const std::string& boundaries_csv, const std::string& out_svg,
               const std::string& title) {
    // re-read the CSV rows; the scatter is a standalone artifact
    std::ifstream in(boundaries_csv, std::ios::binary);
    if (!in) throw DataError("cannot open boundaries csv: " + boundaries_csv);
    BoundaryCorrelation corr;
    std::string line;
    std::getline(in, line);
    if (line != "left_char,right_char,merge_rank,frequency")
        throw DataError("unexpected header in " + boundaries_csv + ": " + line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string left, right, rank, freq;
        std::getline(row, left, ',');
        std::getline(row, right, ',');
        std::getline(row, rank, ',');
        std::getline(row, freq, ',');
        if (left.size() != 1 || right.size() != 1)
            throw DataError("malformed row in " + boundaries_csv + ": " + line);
        corr.rows.push_back({left[0], right[0],
                             static_cast<uint32_t>(std::stoul(rank)),
                             std::stoull(freq)});
    }
    if (corr.rows.empty()) throw DataError("no rows in " + boundaries_csv);
    write_scatter_svg(corr, out_svg, title);
    std::cout << "wrote " << out_svg << " (" << corr.rows.size() << " points)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"character-information tokenizer and probing toolkit"};
    app.require_subcommand(1);

    Ctx ctx;
    for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

    // train-bpe
    auto* sc_bpe = app.add_subcommand("train-bpe", "train a merge table on a corpus");
    std::string in_path, vocab_path, merges_path, tokens_path;
    size_t vocab_size = 0;
    sc_bpe->add_option("--in", in_path, "corpus file")->required();
    sc_bpe->add_option("--vocab-size", vocab_size, "target vocabulary size")->required();
    sc_bpe->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // build-controlled
    auto* sc_ctrl = app.add_subcommand("build-controlled",
                                       "construct the fixed 1..3-letter tokenizer");
    uint64_t seed = 0;
    int alphabet = 26;
    sc_ctrl->add_option("--seed", seed, "global seed")->required();
    sc_ctrl->add_option("--alphabet", alphabet, "alphabet size (default 26)");
    sc_ctrl->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // tokenize
    auto* sc_tok = app.add_subcommand("tokenize", "encode a corpus as token ids");
    std::string tokenizer_kind;
    size_t max_vocab = 0;
    bool oov_skip = false;
    sc_tok->add_option("--tokenizer", tokenizer_kind, "bpe|controlled|tcs|word")
        ->required()
        ->check(CLI::IsMember({"bpe", "controlled", "tcs", "word"}));
    sc_tok->add_option("--in", in_path, "corpus file")->required();
    sc_tok->add_option("--vocab", vocab_path, "vocab file (bpe/controlled)");
    sc_tok->add_option("--merges", merges_path, "merges file (bpe/controlled)");
    sc_tok->add_option("--max-vocab", max_vocab,
                       "cap word vocabulary to the most frequent types");
    sc_tok->add_flag("--oov-skip", oov_skip, "drop out-of-vocabulary tokens");
    sc_tok->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // transform
    auto* sc_tr = app.add_subcommand("transform", "apply a corpus transformation");
    std::string transform_kind, lemmas_path;
    sc_tr->add_option("--kind", transform_kind, "charpert|wordsub|toksub|stem|lemma")
        ->required()
        ->check(CLI::IsMember({"charpert", "wordsub", "toksub", "stem", "lemma"}));
    sc_tr->add_option("--in", in_path, "corpus file (text transforms)");
    sc_tr->add_option("--tokens", tokens_path, "tokens file (toksub)");
    sc_tr->add_option("--vocab", vocab_path, "vocab file (toksub)");
    sc_tr->add_option("--lemmas", lemmas_path, "lemma TSV (lemma)");
    auto* tr_seed = sc_tr->add_option("--seed", seed, "global seed (stochastic kinds)");
    sc_tr->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // probe-data
    auto* sc_pd = app.add_subcommand("probe-data", "build per-letter probe datasets");
    std::string chars = "all", mode_name = "matched";
    sc_pd->add_option("--char", chars, "a..z or all")->required();
    sc_pd->add_option("--mode", mode_name, "matched|unmatched")
        ->required()
        ->check(CLI::IsMember({"matched", "unmatched"}));
    sc_pd->add_option("--vocab", vocab_path, "vocab file")->required();
    sc_pd->add_option("--seed", seed, "global seed")->required();
    sc_pd->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // train-emb
    auto* sc_emb = app.add_subcommand("train-emb", "train skip-gram embeddings");
    SgnsConfig sgns;
    sc_emb->add_option("--tokens", tokens_path, "tokens file")->required();
    sc_emb->add_option("--vocab", vocab_path, "vocab file")->required();
    sc_emb->add_option("--dim", sgns.dim, "embedding width (default 128)");
    sc_emb->add_option("--window", sgns.window, "max window (default 5)");
    sc_emb->add_option("--negatives", sgns.negatives, "negative samples (default 5)");
    sc_emb->add_option("--epochs", sgns.epochs, "epochs (default 5)");
    sc_emb->add_option("--seed", seed, "global seed")->required();
    sc_emb->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // import-emb
    auto* sc_imp = app.add_subcommand("import-emb",
                                      "convert a text embedding matrix to binary");
    sc_imp->add_option("--in", in_path, "text matrix, one 'token v1..vd' per line")
        ->required();
    sc_imp->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // probe
    auto* sc_probe = app.add_subcommand("probe", "train/evaluate character probes");
    ProbeFlags pf;
    std::string data_dir, emb_path;
    sc_probe->add_flag("--train", pf.train, "train probes and evaluate the held-out split");
    sc_probe->add_flag("--eval", pf.eval, "evaluate existing checkpoints");
    sc_probe->add_flag("--buckets", pf.buckets, "report per-length-bucket accuracy");
    sc_probe->add_flag("--six-group", pf.six_group,
                       "report the marker x position partition of positives");
    sc_probe->add_option("--context-folds", pf.context_folds,
                         "grouped 5-fold cross-validation: prev|next")
        ->check(CLI::IsMember({"prev", "next"}));
    sc_probe->add_option("--emb", emb_path, "embedding matrix")->required();
    sc_probe->add_option("--vocab", vocab_path, "vocab file")->required();
    sc_probe->add_option("--data-dir", data_dir, "directory of probe_<char>.tsv")
        ->required();
    sc_probe->add_option("--seed", seed, "global seed")->required();
    sc_probe->add_option("--h1", pf.hidden1, "first hidden width (default 256)");
    sc_probe->add_option("--h2", pf.hidden2, "second hidden width (default 128)");
    sc_probe->add_option("--epochs", pf.epochs, "training epochs (default 3)");
    sc_probe->add_option("--batch", pf.batch, "batch size (default 64)");
    sc_probe->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // analyze-boundaries
    auto* sc_ab = app.add_subcommand("analyze-boundaries",
                                     "boundary pair stats vs merge strength");
    bool include_word_boundaries = false;
    size_t permutations = 0;
    sc_ab->add_option("--tokens", tokens_path, "tokens file")->required();
    sc_ab->add_option("--vocab", vocab_path, "vocab file")->required();
    sc_ab->add_option("--merges", merges_path, "merges file")->required();
    sc_ab->add_flag("--include-word-boundaries", include_word_boundaries,
                    "count marker-initial successors too");
    sc_ab->add_option("--permutations", permutations,
                      "permutation count for the significance test");
    auto* ab_seed = sc_ab->add_option("--seed", seed, "global seed (permutations)");
    sc_ab->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // verify-conditions
    auto* sc_vc = app.add_subcommand("verify-conditions",
                                     "randomized segmentation condition checks");
    uint64_t trials = 0;
    sc_vc->add_option("--alphabet", alphabet, "alphabet size, 3..8")->required();
    sc_vc->add_option("--trials", trials, "randomized trials")->required();
    sc_vc->add_option("--seed", seed, "global seed")->required();
    sc_vc->add_option("--out-dir", ctx.out_dir, "output directory")->required();

    // report
    auto* sc_rep = app.add_subcommand("report", "render the boundary scatter SVG");
    std::string boundaries_csv, out_svg, title = "merge strength vs boundary frequency";
    sc_rep->add_option("--boundaries", boundaries_csv, "boundaries.csv")->required();
    sc_rep->add_option("--out", out_svg, "output SVG path")->required();
    sc_rep->add_option("--title", title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sc_bpe) {
            ctx.inputs = {in_path};
            return cmd_train_bpe(ctx, in_path, vocab_size);
        }
        if (*sc_ctrl) {
            ctx.seed = seed;
            return cmd_build_controlled(ctx, seed, alphabet);
        }
        if (*sc_tok) {
            bool needs_table = tokenizer_kind == "bpe" || tokenizer_kind == "controlled";
            if (needs_table && (vocab_path.empty() || merges_path.empty())) {
                std::cerr << "error: --vocab and --merges are required for --tokenizer "
                          << tokenizer_kind << "\n";
                return 1;
            }
            ctx.inputs = {in_path};
            if (needs_table) {
                ctx.inputs.push_back(vocab_path);
                ctx.inputs.push_back(merges_path);
            }
            return cmd_tokenize(ctx, tokenizer_kind, in_path, vocab_path, merges_path,
                                max_vocab, oov_skip);
        }
        if (*sc_tr) {
            bool stochastic = transform_kind == "charpert" ||
                              transform_kind == "wordsub" || transform_kind == "toksub";
            if (stochastic && tr_seed->count() == 0) {
                std::cerr << "error: --seed is required for --kind " << transform_kind
                          << "\n";
                return 1;
            }
            if (transform_kind == "toksub") {
                if (tokens_path.empty() || vocab_path.empty()) {
                    std::cerr << "error: --tokens and --vocab are required for toksub\n";
                    return 1;
                }
                ctx.inputs = {tokens_path, vocab_path};
            } else if (in_path.empty()) {
                std::cerr << "error: --in is required for --kind " << transform_kind
                          << "\n";
                return 1;
            } else {
                ctx.inputs = {in_path};
                if (transform_kind == "lemma") {
                    if (lemmas_path.empty()) {
                        std::cerr << "error: --lemmas is required for --kind lemma\n";
                        return 1;
                    }
                    ctx.inputs.push_back(lemmas_path);
                }
            }
            if (stochastic) ctx.seed = seed;
            return cmd_transform(ctx, transform_kind, in_path, seed, lemmas_path,
                                 tokens_path, vocab_path);
        }
        if (*sc_pd) {
            if (chars != "all" && (chars.size() != 1 || chars[0] < 'a' || chars[0] > 'z')) {
                std::cerr << "error: --char must be a..z or all\n";
                return 1;
            }
            ctx.seed = seed;
            ctx.inputs = {vocab_path};
            return cmd_probe_data(ctx, chars, mode_name, vocab_path, seed);
        }
        if (*sc_emb) {
            ctx.seed = seed;
            ctx.inputs = {tokens_path, vocab_path};
            return cmd_train_emb(ctx, tokens_path, vocab_path, sgns, seed);
        }
        if (*sc_imp) {
            ctx.inputs = {in_path};
            return cmd_import_emb(ctx, in_path);
        }
        if (*sc_probe) {
            if (pf.train == pf.eval && pf.context_folds.empty()) {
                std::cerr << "error: exactly one of --train or --eval is required\n";
                return 1;
            }
            ctx.seed = seed;
            ctx.inputs = {emb_path, vocab_path};
            return cmd_probe(ctx, emb_path, vocab_path, data_dir, seed, pf);
        }
        if (*sc_ab) {
            if (permutations > 0 && ab_seed->count() == 0) {
                std::cerr << "error: --seed is required with --permutations\n";
                return 1;
            }
            if (permutations > 0) ctx.seed = seed;
            ctx.inputs = {tokens_path, vocab_path, merges_path};
            return cmd_analyze_boundaries(ctx, tokens_path, vocab_path, merges_path,
                                          include_word_boundaries, permutations, seed);
        }
        if (*sc_vc) {
            ctx.seed = seed;
            return cmd_verify_conditions(ctx, alphabet, trials, seed);
        }
        if (*sc_rep) {
            return cmd_report(ctx, boundaries_csv, out_svg, title);
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
