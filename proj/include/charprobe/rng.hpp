#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace charprobe {

// 64-bit FNV-1a, used for stream-label keying and file checksums.
uint64_t fnv1a64(std::string_view data);
uint64_t fnv1a64_file(const std::string& path);

// SplitMix64 finalizer. Bijective on uint64_t.
uint64_t mix64(uint64_t z);

// Names one family of random streams. Identical (global_seed, stream_label,
// index) triples always produce identical streams, on every platform.
struct SeedSpec {
    uint64_t global_seed = 0;
    std::string stream_label;
};

// Counter-based generator pinned project-wide: SplitMix64 over a derived
// 64-bit stream key. The key fully determines the stream; draws advance an
// internal counter by the SplitMix64 increment.
class RandomStream {
public:
    explicit RandomStream(uint64_t key) : state_(key) {}

    uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_double();

    // Uniform in [0, bound), unbiased via rejection. bound must be > 0.
    uint64_t next_below(uint64_t bound);

    char next_lowercase();
    char next_uppercase();

    // Independent substream; forking does not disturb this stream's counter.
    RandomStream fork(uint64_t lane) const;

    // Fisher-Yates using next_below.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    uint64_t state_;
};

RandomStream derive_stream(const SeedSpec& seed, uint64_t index);

} // namespace charprobe
