#include "charprobe/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "charprobe/error.hpp"

namespace charprobe {

bool has_marker(std::string_view token) {
    return token.size() >= 2 && token.substr(0, 2) == kSpaceMarker;
}

std::string_view strip_marker(std::string_view token) {
    return has_marker(token) ? token.substr(2) : token;
}

size_t token_alpha_length(std::string_view token) {
    std::string_view body = strip_marker(token);
    size_t n = 0;
    for (unsigned char c : body)
        if (std::isalpha(c)) ++n;
    return n;
}

const char* merge_stage_name(MergeStage stage) {
    switch (stage) {
        case MergeStage::kMarker1: return "marker+1";
        case MergeStage::kChar2: return "2char";
        case MergeStage::kMarker2: return "marker+2";
        case MergeStage::kChar3: return "3char";
        case MergeStage::kMarker3: return "marker+3";
        case MergeStage::kNone: return "none";
    }
    return "none";
}

namespace {

std::string pair_key(std::string_view left, std::string_view right) {
    std::string key;
    key.reserve(left.size() + right.size() + 1);
    key.append(left);
    key.push_back(' ');
    key.append(right);
    return key;
}

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

size_t codepoint_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    return 4;
}

// Splits a pretokenized unit into merge symbols: the marker (if leading)
// plus one symbol per codepoint.
std::vector<std::string> split_symbols(std::string_view word) {
    std::vector<std::string> symbols;
    size_t i = 0;
    if (has_marker(word)) {
        symbols.emplace_back(kSpaceMarker);
        i = kSpaceMarker.size();
    }
    while (i < word.size()) {
        size_t len = codepoint_len(static_cast<unsigned char>(word[i]));
        if (i + len > word.size()) len = 1;
        symbols.emplace_back(word.substr(i, len));
        i += len;
    }
    return symbols;
}

} // namespace

void MergeTable::add_rule(std::string left, std::string right, MergeStage stage) {
    std::string key = pair_key(left, right);
    if (rank_by_pair_.count(key))
        throw DataError("duplicate merge rule: " + key);
    uint32_t rank = static_cast<uint32_t>(rules_.size());
    rank_by_pair_.emplace(std::move(key), rank);
    rules_.push_back(MergeRule{std::move(left), std::move(right), rank, stage});
}

void MergeTable::add_base_symbol(std::string symbol) {
    base_symbols_.insert(std::move(symbol));
}

std::optional<uint32_t> MergeTable::rank_of(std::string_view left, std::string_view right) const {
    auto it = rank_by_pair_.find(pair_key(left, right));
    if (it == rank_by_pair_.end()) return std::nullopt;
    return it->second;
}

int64_t MergeTable::strength(std::string_view left, std::string_view right) const {
    auto rank = rank_of(left, right);
    if (!rank) return kNoRuleStrength;
    return static_cast<int64_t>(rules_.size()) - static_cast<int64_t>(*rank);
}

bool MergeTable::covers_symbol(std::string_view symbol) const {
    return base_symbols_.count(std::string(symbol)) > 0;
}

int32_t Vocabulary::add(std::string token) {
    size_t interior = token.find(kSpaceMarker, 1);
    if (interior != std::string::npos)
        throw DataError("whitespace marker not token-initial in: " + token);
    if (token_to_id_.count(token))
        throw DataError("duplicate vocabulary token: " + token);
    int32_t id = static_cast<int32_t>(id_to_token_.size());
    token_to_id_.emplace(token, id);
    id_to_token_.push_back(std::move(token));
    return id;
}

std::optional<int32_t> Vocabulary::id_of(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::token_of(int32_t id) const {
    if (id < 0 || static_cast<size_t>(id) >= id_to_token_.size())
        throw DataError("token id out of range: " + std::to_string(id));
    return id_to_token_[static_cast<size_t>(id)];
}

uint64_t Vocabulary::content_hash() const {
    uint64_t h = 0xCBF29CE484222325ull;
    auto feed = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ull;
        }
    };
    for (const auto& token : id_to_token_) {
        feed(token);
        feed("\n");
    }
    return h;
}

size_t TokenizedCorpus::token_count() const {
    size_t n = 0;
    for (const auto& doc : documents) n += doc.size();
    return n;
}

std::vector<std::string> pretokenize(std::string_view text) {
    std::vector<std::string> words;
    size_t i = 0;
    bool preceded_by_space = false;
    while (i < text.size()) {
        if (is_space_byte(text[i])) {
            preceded_by_space = true;
            ++i;
            continue;
        }
        size_t start = i;
        while (i < text.size() && !is_space_byte(text[i])) ++i;
        std::string word;
        if (preceded_by_space) word = kSpaceMarker;
        word.append(text.substr(start, i - start));
        words.push_back(std::move(word));
        preceded_by_space = false;
    }
    return words;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& token : tokens) {
        if (has_marker(token)) {
            out.push_back(' ');
            out.append(strip_marker(token));
        } else {
            out.append(token);
        }
    }
    return out;
}

std::vector<std::string> apply_merges(std::string_view word, const MergeTable& table) {
    std::vector<std::string> symbols = split_symbols(word);
    for (const auto& s : symbols)
        if (!table.covers_symbol(s))
            throw DataError("symbol not coverable by the merge table's base alphabet: '" + s + "'");

    while (symbols.size() > 1) {
        uint32_t best_rank = UINT32_MAX;
        size_t best_pos = 0;
        for (size_t i = 0; i + 1 < symbols.size(); ++i) {
            auto rank = table.rank_of(symbols[i], symbols[i + 1]);
            if (rank && *rank < best_rank) {
                best_rank = *rank;
                best_pos = i;
            }
        }
        if (best_rank == UINT32_MAX) break;
        symbols[best_pos] += symbols[best_pos + 1];
        symbols.erase(symbols.begin() + static_cast<ptrdiff_t>(best_pos) + 1);
    }
    return symbols;
}

int64_t merge_strength(const MergeTable& table, std::string_view left, std::string_view right) {
    return table.strength(left, right);
}

std::vector<std::string> tokenize_tcs(std::string_view word) {
    bool marker = has_marker(word);
    std::string_view body = strip_marker(word);

    std::vector<std::string_view> chars;
    size_t i = 0;
    while (i < body.size()) {
        size_t len = codepoint_len(static_cast<unsigned char>(body[i]));
        if (i + len > body.size()) len = 1;
        chars.push_back(body.substr(i, len));
        i += len;
    }

    std::vector<std::string> out;
    if (chars.empty()) {
        if (marker || !word.empty()) out.emplace_back(word);
        return out;
    }
    if (chars.size() <= 2) {
        out.emplace_back(word);
        return out;
    }
    size_t pos = 0;
    bool first = true;
    while (pos < chars.size()) {
        size_t take = std::min<size_t>(3, chars.size() - pos);
        std::string chunk;
        if (first && marker) chunk = kSpaceMarker;
        for (size_t c = 0; c < take; ++c) chunk.append(chars[pos + c]);
        out.push_back(std::move(chunk));
        pos += take;
        first = false;
    }
    return out;
}

std::vector<std::string> tokenize_word(std::string_view text) {
    return pretokenize(text);
}

std::vector<std::string> tokenize_document(std::string_view text, TokenizerKind kind,
                                           const MergeTable* table) {
    std::vector<std::string> out;
    for (const auto& word : pretokenize(text)) {
        switch (kind) {
            case TokenizerKind::kWord:
                out.push_back(word);
                break;
            case TokenizerKind::kTcs: {
                auto chunks = tokenize_tcs(word);
                out.insert(out.end(), chunks.begin(), chunks.end());
                break;
            }
            case TokenizerKind::kBpe:
            case TokenizerKind::kControlled: {
                if (!table)
                    throw DataError("merge table required for this tokenizer");
                auto pieces = apply_merges(word, *table);
                out.insert(out.end(), pieces.begin(), pieces.end());
                break;
            }
        }
    }
    return out;
}

Vocabulary build_word_vocab(const Corpus& corpus, size_t max_size) {
    std::unordered_map<std::string, uint64_t> counts;
    for (const auto& doc : corpus.documents)
        for (auto& word : pretokenize(doc)) counts[word]++;

    std::vector<std::pair<std::string, uint64_t>> types(counts.begin(), counts.end());
    if (max_size > 0 && types.size() > max_size) {
        std::sort(types.begin(), types.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        types.resize(max_size);
    }
    std::sort(types.begin(), types.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    Vocabulary vocab;
    for (auto& [token, count] : types) vocab.add(token);
    return vocab;
}

Vocabulary collect_token_vocab(const Corpus& corpus, TokenizerKind kind,
                               const MergeTable* table) {
    std::unordered_set<std::string> seen;
    for (const auto& doc : corpus.documents)
        for (auto& token : tokenize_document(doc, kind, table)) seen.insert(std::move(token));

    std::vector<std::string> tokens(seen.begin(), seen.end());
    std::sort(tokens.begin(), tokens.end());
    Vocabulary vocab;
    for (auto& token : tokens) vocab.add(std::move(token));
    return vocab;
}

TokenizedCorpus encode_corpus(const Corpus& corpus, TokenizerKind kind,
                              const Vocabulary& vocab, const MergeTable* table,
                              OovPolicy oov) {
    TokenizedCorpus out;
    out.documents.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        std::vector<int32_t> ids;
        for (auto& token : tokenize_document(doc, kind, table)) {
            auto id = vocab.id_of(token);
            if (!id) {
                if (oov == OovPolicy::kError)
                    throw DataError("token not in vocabulary: " + token);
                continue;
            }
            ids.push_back(*id);
        }
        out.documents.push_back(std::move(ids));
    }
    return out;
}

void write_merges(const MergeTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open merges file for writing: " + path);
    if (table.stage_major) out << "#stage-major v1\n";
    for (const auto& rule : table.rules()) out << rule.left << ' ' << rule.right << '\n';
    if (!out) throw DataError("I/O failure writing merges file: " + path);
}

namespace {

MergeStage classify_rule(std::string_view left, std::string_view right) {
    auto letters = [](std::string_view s) {
        for (unsigned char c : s)
            if (!std::isalpha(c)) return false;
        return !s.empty();
    };
    bool lm = has_marker(left);
    std::string_view lb = strip_marker(left);
    if (lm && lb.empty() && letters(right) && right.size() == 1) return MergeStage::kMarker1;
    if (!lm && letters(left) && left.size() == 1 && letters(right) && right.size() == 1)
        return MergeStage::kChar2;
    if (lm && letters(lb) && lb.size() == 1 && letters(right) && right.size() == 1)
        return MergeStage::kMarker2;
    if (!lm && letters(left) && left.size() == 2 && letters(right) && right.size() == 1)
        return MergeStage::kChar3;
    if (lm && letters(lb) && lb.size() == 1 && letters(right) && right.size() == 2)
        return MergeStage::kMarker3;
    return MergeStage::kNone;
}

} // namespace

MergeTable read_merges(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open merges file: " + path);
    MergeTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && line == "#stage-major v1") {
            table.stage_major = true;
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        size_t space = line.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 == line.size())
            throw DataError("malformed merges line: '" + line + "' in " + path);
        std::string left = line.substr(0, space);
        std::string right = line.substr(space + 1);
        MergeStage stage = table.stage_major ? classify_rule(left, right) : MergeStage::kNone;
        // base alphabet: every single-codepoint unit mentioned by any rule
        for (const std::string& side : {left, right})
            for (auto& sym : split_symbols(side)) table.add_base_symbol(std::move(sym));
        table.add_rule(std::move(left), std::move(right), stage);
    }
    return table;
}

void write_vocab(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open vocab file for writing: " + path);
    for (const auto& token : vocab.tokens()) out << token << '\n';
    if (!out) throw DataError("I/O failure writing vocab file: " + path);
}

Vocabulary read_vocab(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open vocab file: " + path);
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) vocab.add(line);
    return vocab;
}

void write_tokenized(const TokenizedCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open tokens file for writing: " + path);
    for (const auto& doc : corpus.documents) {
        for (size_t i = 0; i < doc.size(); ++i) {
            if (i) out << ' ';
            out << doc[i];
        }
        out << '\n';
    }
    if (!out) throw DataError("I/O failure writing tokens file: " + path);
}

TokenizedCorpus read_tokenized(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open tokens file: " + path);
    TokenizedCorpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<int32_t> ids;
        size_t i = 0;
        while (i < line.size()) {
            if (line[i] == ' ') {
                ++i;
                continue;
            }
            size_t j = i;
            int64_t value = 0;
            while (j < line.size() && line[j] != ' ') {
                char c = line[j];
                if (c < '0' || c > '9')
                    throw DataError("malformed token id in " + path + ": '" + line + "'");
                value = value * 10 + (c - '0');
                ++j;
            }
            ids.push_back(static_cast<int32_t>(value));
            i = j;
        }
        corpus.documents.push_back(std::move(ids));
    }
    return corpus;
}

} // namespace charprobe
