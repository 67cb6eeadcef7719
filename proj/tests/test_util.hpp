#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "charprobe/tokenizer.hpp"

namespace testutil {

// chi-square statistic against a uniform expectation
inline double chi_square_uniform(const std::vector<uint64_t>& observed, uint64_t total) {
    double expected = static_cast<double>(total) / static_cast<double>(observed.size());
    double stat = 0;
    for (uint64_t o : observed) {
        double d = static_cast<double>(o) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// half-width of the normal-approximation binomial band around 0.5
inline double binomial_band(double z, uint64_t n) {
    return z * std::sqrt(0.25 / static_cast<double>(n));
}

inline constexpr double kZ99 = 2.5758293035489004; // two-sided 99%

// merge table over explicit rules plus base coverage for every single
// codepoint appearing in them
inline charprobe::MergeTable make_table(
    const std::vector<std::pair<std::string, std::string>>& rules) {
    charprobe::MergeTable table;
    table.stage_major = true;
    for (const auto& [left, right] : rules) {
        for (const std::string& side : {left, right}) {
            std::string_view rest = side;
            if (charprobe::has_marker(rest)) {
                table.add_base_symbol(std::string(charprobe::kSpaceMarker));
                rest = charprobe::strip_marker(rest);
            }
            for (char c : rest) table.add_base_symbol(std::string(1, c));
        }
        table.add_rule(left, right);
    }
    return table;
}

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("charprobe_test_" + std::to_string(counter()++) + "_" +
                 std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string dir() const { return path_.string(); }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

} // namespace testutil
