#include <functional>
#include <string>
#include <vector>

#include "charprobe/error.hpp"
#include "charprobe/tokenizer.hpp"

namespace charprobe {

namespace {

// Rules per stage, in lexicographic order before shuffling.
std::vector<std::pair<std::string, std::string>> stage_pairs(MergeStage stage,
                                                             int alphabet_size) {
    std::string marker(kSpaceMarker);
    std::vector<std::pair<std::string, std::string>> pairs;
    auto letter = [](int i) { return static_cast<char>('a' + i); };
    const int n = alphabet_size;
    switch (stage) {
        case MergeStage::kMarker1:
            for (int x = 0; x < n; ++x)
                pairs.emplace_back(marker, std::string(1, letter(x)));
            break;
        case MergeStage::kChar2:
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    pairs.emplace_back(std::string(1, letter(x)), std::string(1, letter(y)));
            break;
        case MergeStage::kMarker2:
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    pairs.emplace_back(marker + letter(x), std::string(1, letter(y)));
            break;
        case MergeStage::kChar3:
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        pairs.emplace_back(std::string{letter(x), letter(y)},
                                           std::string(1, letter(z)));
            break;
        case MergeStage::kMarker3:
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    for (int z = 0; z < n; ++z)
                        pairs.emplace_back(marker + letter(x),
                                           std::string{letter(y), letter(z)});
            break;
        case MergeStage::kNone:
            break;
    }
    return pairs;
}

constexpr MergeStage kStageOrder[] = {MergeStage::kMarker1, MergeStage::kChar2,
                                      MergeStage::kMarker2, MergeStage::kChar3,
                                      MergeStage::kMarker3};

Tokenizer build_controlled(int alphabet_size,
                           const std::function<RandomStream(size_t)>& stage_stream) {
    if (alphabet_size < 2 || alphabet_size > 26)
        throw DataError("controlled tokenizer alphabet size must be in [2, 26], got " +
                        std::to_string(alphabet_size));

    Tokenizer tok;
    tok.merges.stage_major = true;
    tok.merges.add_base_symbol(std::string(kSpaceMarker));
    for (int x = 0; x < alphabet_size; ++x) {
        std::string letter(1, static_cast<char>('a' + x));
        tok.merges.add_base_symbol(letter);
        tok.vocab.add(letter); // single letters get the lowest ids
    }

    // Stage-major ranks; within a stage the order is a seeded shuffle.
    // Token id = letter count + global rank, so later table position means
    // larger id.
    for (size_t s = 0; s < 5; ++s) {
        auto pairs = stage_pairs(kStageOrder[s], alphabet_size);
        RandomStream stream = stage_stream(s);
        stream.shuffle(pairs);
        for (auto& [left, right] : pairs) {
            tok.vocab.add(left + right);
            tok.merges.add_rule(std::move(left), std::move(right), kStageOrder[s]);
        }
    }
    return tok;
}

} // namespace

Tokenizer build_controlled_tokenizer(const SeedSpec& seed, int alphabet_size) {
    return build_controlled(alphabet_size,
                            [&](size_t s) { return derive_stream(seed, s); });
}

Tokenizer build_controlled_tokenizer(RandomStream& stream, int alphabet_size) {
    return build_controlled(alphabet_size,
                            [&](size_t s) { return stream.fork(s); });
}

} // namespace charprobe
