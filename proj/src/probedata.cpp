#include "charprobe/probedata.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>

#include "charprobe/error.hpp"

namespace charprobe {

const char* matching_mode_name(MatchingMode mode) {
    return mode == MatchingMode::kMatched ? "matched" : "unmatched";
}

bool token_contains(std::string_view token, char alpha) {
    for (unsigned char c : strip_marker(token))
        if (std::tolower(c) == static_cast<unsigned char>(alpha)) return true;
    return false;
}

std::vector<int32_t> filter_vocab(const Vocabulary& vocab) {
    std::vector<int32_t> ids;
    for (size_t i = 0; i < vocab.size(); ++i) {
        std::string_view body = strip_marker(vocab.token_of(static_cast<int32_t>(i)));
        if (body.empty()) continue;
        bool ok = true;
        for (unsigned char c : body)
            if (!std::isalpha(c)) { ok = false; break; }
        if (ok) ids.push_back(static_cast<int32_t>(i));
    }
    return ids;
}

ProbeDataset build_dataset(const Vocabulary& vocab, const std::vector<int32_t>& filtered_ids,
                           char alpha, MatchingMode mode, RandomStream stream) {
    std::vector<int32_t> positives, negatives;
    for (int32_t id : filtered_ids) {
        if (token_contains(vocab.token_of(id), alpha))
            positives.push_back(id);
        else
            negatives.push_back(id);
    }
    if (positives.empty())
        throw DataError(std::string("no tokens contain '") + alpha + "'");
    if (negatives.empty())
        throw DataError(std::string("no negative tokens available for '") + alpha + "'");

    ProbeDataset dataset;
    dataset.target_char = alpha;
    dataset.mode = mode;

    auto push = [&](int32_t id, bool label) {
        dataset.examples.push_back(ProbeExample{vocab.token_of(id), id, label});
    };

    if (mode == MatchingMode::kMatched) {
        std::map<size_t, std::vector<int32_t>> pos_by_len, neg_by_len;
        for (int32_t id : positives) pos_by_len[token_alpha_length(vocab.token_of(id))].push_back(id);
        for (int32_t id : negatives) neg_by_len[token_alpha_length(vocab.token_of(id))].push_back(id);
        for (auto& [len, pool] : pos_by_len) {
            auto neg_it = neg_by_len.find(len);
            if (neg_it == neg_by_len.end()) continue; // no negatives of this length
            stream.shuffle(pool);
            stream.shuffle(neg_it->second);
            size_t n = std::min(pool.size(), neg_it->second.size());
            for (size_t i = 0; i < n; ++i) {
                push(pool[i], true);
                push(neg_it->second[i], false);
            }
        }
        if (dataset.examples.empty())
            throw DataError(std::string("no length-matched pairs available for '") +
                            alpha + "'");
    } else {
        stream.shuffle(positives);
        stream.shuffle(negatives);
        size_t n = std::min(positives.size(), negatives.size());
        for (size_t i = 0; i < n; ++i) {
            push(positives[i], true);
            push(negatives[i], false);
        }
    }
    return dataset;
}

const char* length_bucket_name(size_t bucket) {
    static const char* names[5] = {"<=3", "4", "5", "6", ">=7"};
    return names[bucket];
}

std::array<ProbeDataset, 5> length_buckets(const ProbeDataset& dataset) {
    std::array<ProbeDataset, 5> buckets;
    for (auto& b : buckets) {
        b.target_char = dataset.target_char;
        b.mode = dataset.mode;
    }
    for (const auto& ex : dataset.examples) {
        size_t len = token_alpha_length(ex.token);
        size_t idx = len <= 3 ? 0 : len >= 7 ? 4 : len - 3;
        buckets[idx].examples.push_back(ex);
    }
    return buckets;
}

std::map<SixGroupKey, std::vector<ProbeExample>> six_group_partition(
    const std::vector<ProbeExample>& positives, char alpha) {
    std::map<SixGroupKey, std::vector<ProbeExample>> groups;
    for (const auto& ex : positives) {
        std::string_view body = strip_marker(ex.token);
        if (body.size() > 3)
            throw DataError("token longer than 3 letters in six-group partition: " +
                            ex.token);
        int index = 0;
        for (size_t i = 0; i < body.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(body[i])) ==
                static_cast<unsigned char>(alpha)) {
                index = static_cast<int>(i) + 1; // first occurrence wins
                break;
            }
        }
        if (index == 0)
            throw DataError("positive example lacks the target letter: " + ex.token);
        groups[{has_marker(ex.token), index}].push_back(ex);
    }
    return groups;
}

std::string six_group_label(const SixGroupKey& key) {
    static const char* positions[3] = {"1st", "2nd", "3rd"};
    return std::string(key.first ? "marker" : "plain") + "_" +
           positions[key.second - 1];
}

double FoldSpec::balance_ratio() const {
    uint64_t lo = UINT64_MAX, hi = 0;
    for (uint64_t s : fold_sizes) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (lo == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(hi) / static_cast<double>(lo);
}

FoldSpec context_group_folds(const ProbeDataset& dataset, char alpha, ContextSide side,
                             int k, RandomStream stream) {
    if (k < 2) throw DataError("fold count must be at least 2");

    auto context_of = [&](const ProbeExample& ex) -> std::string {
        std::string_view body = strip_marker(ex.token);
        size_t pos = body.size();
        for (size_t i = 0; i < body.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(body[i])) ==
                static_cast<unsigned char>(alpha)) {
                pos = i;
                break;
            }
        }
        if (pos == body.size())
            throw DataError("positive example lacks the target letter: " + ex.token);
        if (side == ContextSide::kPreceding)
            return pos == 0 ? "word-start" : std::string(1, body[pos - 1]);
        return pos + 1 == body.size() ? "word-end" : std::string(1, body[pos + 1]);
    };

    std::map<std::string, uint64_t> group_counts;
    for (const auto& ex : dataset.examples)
        if (ex.label) group_counts[context_of(ex)]++;
    if (group_counts.size() < static_cast<size_t>(k))
        throw DataError("only " + std::to_string(group_counts.size()) +
                        " context groups available for " + std::to_string(k) + " folds");

    // largest groups first onto the currently smallest fold
    std::vector<std::pair<std::string, uint64_t>> ordered(group_counts.begin(),
                                                          group_counts.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    FoldSpec spec;
    spec.k = k;
    spec.side = side;
    spec.fold_sizes.assign(static_cast<size_t>(k), 0);
    for (const auto& [group, count] : ordered) {
        size_t smallest = 0;
        for (size_t f = 1; f < spec.fold_sizes.size(); ++f)
            if (spec.fold_sizes[f] < spec.fold_sizes[smallest]) smallest = f;
        spec.group_to_fold[group] = static_cast<int>(smallest);
        spec.fold_sizes[smallest] += count;
    }

    spec.fold_of.reserve(dataset.examples.size());
    for (const auto& ex : dataset.examples) {
        int fold;
        if (ex.label) {
            fold = spec.group_to_fold.at(context_of(ex));
        } else {
            fold = static_cast<int>(stream.next_below(static_cast<uint64_t>(k)));
            spec.fold_sizes[static_cast<size_t>(fold)] += 1;
        }
        spec.fold_of.push_back(fold);
    }
    return spec;
}

void write_dataset(const ProbeDataset& dataset, const std::string& path,
                   const std::string& seed_desc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open dataset file for writing: " + path);
    out << "# char=" << dataset.target_char << " mode=" << matching_mode_name(dataset.mode)
        << " seed=" << seed_desc << "\n";
    for (const auto& ex : dataset.examples)
        out << ex.token << '\t' << ex.token_id << '\t' << (ex.label ? 1 : 0) << '\n';
    if (!out) throw DataError("I/O failure writing dataset file: " + path);
}

ProbeDataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file: " + path);
    ProbeDataset dataset;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            size_t cp = line.find("char=");
            if (cp != std::string::npos && cp + 5 < line.size())
                dataset.target_char = line[cp + 5];
            dataset.mode = line.find("mode=unmatched") != std::string::npos
                               ? MatchingMode::kUnmatched
                               : MatchingMode::kMatched;
            continue;
        }
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw DataError("malformed dataset line " + std::to_string(lineno) + " in " +
                            path);
        ProbeExample ex;
        ex.token = line.substr(0, t1);
        ex.token_id = static_cast<int32_t>(std::stol(line.substr(t1 + 1, t2 - t1 - 1)));
        ex.label = line.substr(t2 + 1) == "1";
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

} // namespace charprobe
