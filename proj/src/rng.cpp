#include "charprobe/rng.hpp"

#include <fstream>

#include "charprobe/error.hpp"

namespace charprobe {

namespace {
constexpr uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;
constexpr uint64_t kForkSalt = 0xD6E8FEB86659FD93ull;
} // namespace

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for hashing: " + path);
    uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ull;
        }
    }
    return h;
}

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint64_t RandomStream::next_u64() {
    state_ += kSplitMixGamma;
    return mix64(state_);
}

double RandomStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RandomStream::next_below(uint64_t bound) {
    // Accept draws at or above 2^64 mod bound; the remainder is then uniform.
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

char RandomStream::next_lowercase() {
    return static_cast<char>('a' + next_below(26));
}

char RandomStream::next_uppercase() {
    return static_cast<char>('A' + next_below(26));
}

RandomStream RandomStream::fork(uint64_t lane) const {
    return RandomStream(mix64(state_ ^ mix64(lane + kForkSalt)));
}

RandomStream derive_stream(const SeedSpec& seed, uint64_t index) {
    uint64_t key = mix64(seed.global_seed);
    key = mix64(key ^ fnv1a64(seed.stream_label));
    key = mix64(key ^ (index + kSplitMixGamma));
    return RandomStream(key);
}

} // namespace charprobe
