#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "charprobe/error.hpp"
#include "charprobe/tokenizer.hpp"

namespace charprobe {

namespace {

struct WordEntry {
    std::vector<std::string> symbols;
    uint64_t count = 0;
};

struct PairStats {
    // key = "left right"; tokens never contain spaces, so the split is unique
    std::unordered_map<std::string, int64_t> counts;
    std::unordered_map<std::string, std::unordered_set<size_t>> words_with;

    void bump(const std::string& left, const std::string& right, int64_t delta,
              size_t word_index) {
        std::string key = left + ' ' + right;
        counts[key] += delta;
        if (delta > 0) words_with[key].insert(word_index);
    }
};

std::pair<std::string, std::string> split_key(const std::string& key) {
    size_t space = key.find(' ');
    return {key.substr(0, space), key.substr(space + 1)};
}

} // namespace

Tokenizer train_bpe(const Corpus& corpus, size_t vocab_size) {
    std::unordered_map<std::string, uint64_t> word_counts;
    for (const auto& doc : corpus.documents)
        for (auto& word : pretokenize(doc)) word_counts[word]++;
    if (word_counts.empty()) throw DataError("cannot train a tokenizer on an empty corpus");

    std::vector<WordEntry> words;
    words.reserve(word_counts.size());
    {
        std::vector<std::pair<std::string, uint64_t>> ordered(word_counts.begin(),
                                                              word_counts.end());
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [word, count] : ordered) {
            WordEntry entry;
            entry.count = count;
            if (has_marker(word)) {
                entry.symbols.emplace_back(kSpaceMarker);
                word = word.substr(kSpaceMarker.size());
            }
            size_t i = 0;
            while (i < word.size()) {
                unsigned char lead = static_cast<unsigned char>(word[i]);
                size_t len = lead < 0x80 ? 1 : (lead & 0xE0) == 0xC0 ? 2 : (lead & 0xF0) == 0xE0 ? 3 : 4;
                if (i + len > word.size()) len = 1;
                entry.symbols.push_back(word.substr(i, len));
                i += len;
            }
            words.push_back(std::move(entry));
        }
    }

    std::unordered_set<std::string> base_set;
    for (const auto& entry : words)
        for (const auto& sym : entry.symbols) base_set.insert(sym);
    std::vector<std::string> base(base_set.begin(), base_set.end());
    std::sort(base.begin(), base.end());

    if (vocab_size < base.size())
        throw DataError("vocab_size " + std::to_string(vocab_size) +
                        " is smaller than the base alphabet (" +
                        std::to_string(base.size()) + " symbols)");

    PairStats stats;
    for (size_t w = 0; w < words.size(); ++w) {
        const auto& entry = words[w];
        for (size_t i = 0; i + 1 < entry.symbols.size(); ++i)
            stats.bump(entry.symbols[i], entry.symbols[i + 1],
                       static_cast<int64_t>(entry.count), w);
    }

    Tokenizer tok;
    for (const auto& sym : base) {
        tok.vocab.add(sym);
        tok.merges.add_base_symbol(sym);
    }

    while (tok.vocab.size() < vocab_size) {
        // most frequent pair; ties broken lexicographically by (left, right)
        int64_t best_count = 0;
        std::string best_left, best_right;
        for (const auto& [key, count] : stats.counts) {
            if (count <= 0) continue;
            auto [left, right] = split_key(key);
            if (count > best_count ||
                (count == best_count &&
                 (left < best_left || (left == best_left && right < best_right)))) {
                best_count = count;
                best_left = std::move(left);
                best_right = std::move(right);
            }
        }
        if (best_count <= 0)
            throw DataError("pair statistics exhausted at vocabulary size " +
                            std::to_string(tok.vocab.size()) + " before reaching " +
                            std::to_string(vocab_size));

        tok.merges.add_rule(best_left, best_right, MergeStage::kNone);
        std::string merged = best_left + best_right;
        if (!tok.vocab.id_of(merged)) tok.vocab.add(merged);

        std::string best_key = best_left + ' ' + best_right;
        auto affected_it = stats.words_with.find(best_key);
        if (affected_it == stats.words_with.end()) continue;
        std::vector<size_t> affected(affected_it->second.begin(), affected_it->second.end());
        std::sort(affected.begin(), affected.end());

        for (size_t w : affected) {
            auto& entry = words[w];
            auto& syms = entry.symbols;
            int64_t count = static_cast<int64_t>(entry.count);
            for (size_t i = 0; i + 1 < syms.size();) {
                if (syms[i] != best_left || syms[i + 1] != best_right) {
                    ++i;
                    continue;
                }
                if (i > 0) {
                    stats.bump(syms[i - 1], syms[i], -count, w);
                    stats.bump(syms[i - 1], merged, count, w);
                }
                if (i + 2 < syms.size()) {
                    stats.bump(syms[i + 1], syms[i + 2], -count, w);
                    stats.bump(merged, syms[i + 2], count, w);
                }
                stats.bump(syms[i], syms[i + 1], -count, w);
                syms[i] = merged;
                syms.erase(syms.begin() + static_cast<ptrdiff_t>(i) + 1);
            }
        }
    }

    return tok;
}

} // namespace charprobe
