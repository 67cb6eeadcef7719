#include "charprobe/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "charprobe/error.hpp"

namespace charprobe {

BoundaryPairTable boundary_pair_stats(const TokenizedCorpus& corpus,
                                      const Vocabulary& vocab,
                                      bool within_word_only) {
    // per-id boundary characters, computed once
    const size_t n = vocab.size();
    std::vector<unsigned char> last_char(n), first_char(n);
    std::vector<uint8_t> marker(n);
    for (size_t id = 0; id < n; ++id) {
        const std::string& token = vocab.token_of(static_cast<int32_t>(id));
        marker[id] = has_marker(token) ? 1 : 0;
        std::string_view body = strip_marker(token);
        if (body.empty()) {
            last_char[id] = first_char[id] = 0;
            continue;
        }
        first_char[id] = static_cast<unsigned char>(body.front());
        last_char[id] = static_cast<unsigned char>(body.back());
    }

    BoundaryPairTable table;
    table.within_word_only = within_word_only;
    for (const auto& doc : corpus.documents) {
        for (size_t i = 0; i + 1 < doc.size(); ++i) {
            size_t cur = static_cast<size_t>(doc[i]);
            size_t nxt = static_cast<size_t>(doc[i + 1]);
            if (within_word_only && marker[nxt]) continue;
            if (last_char[cur] == 0 || first_char[nxt] == 0) continue;
            table.counts[static_cast<size_t>(last_char[cur]) * 256 + first_char[nxt]]++;
            table.total++;
        }
    }
    return table;
}

namespace {

// average ranks, ties shared
std::vector<double> rank_values(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y,
               bool* degenerate) {
    const size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    if (degenerate) *degenerate = false;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("spearman input length mismatch");
    SpearmanResult result;
    result.n = x.size();
    if (x.size() < 3) throw DataError("spearman needs at least 3 observations");
    auto rx = rank_values(x);
    auto ry = rank_values(y);
    result.rho = pearson(rx, ry, &result.degenerate);
    return result;
}

double spearman_permutation_pvalue(const std::vector<double>& x,
                                   const std::vector<double>& y, size_t permutations,
                                   RandomStream stream) {
    if (permutations == 0) throw DataError("permutation count must be positive");
    auto rx = rank_values(x);
    auto ry = rank_values(y);
    bool degenerate = false;
    double observed = pearson(rx, ry, &degenerate);
    if (degenerate) return 1.0;
    size_t at_least = 0;
    std::vector<double> perm = ry;
    for (size_t p = 0; p < permutations; ++p) {
        stream.shuffle(perm);
        if (pearson(rx, perm, nullptr) >= observed) ++at_least;
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
}

BoundaryCorrelation correlate_strength_frequency(const BoundaryPairTable& table,
                                                 const MergeTable& merges) {
    BoundaryCorrelation out;
    const uint32_t sentinel = static_cast<uint32_t>(merges.rule_count());

    // one row per single-letter merge rule, plus counted pairs lacking a rule
    std::vector<std::vector<bool>> covered(256, std::vector<bool>(256, false));
    for (const auto& rule : merges.rules()) {
        if (rule.left.size() != 1 || rule.right.size() != 1) continue;
        unsigned char l = static_cast<unsigned char>(rule.left[0]);
        unsigned char r = static_cast<unsigned char>(rule.right[0]);
        if (!std::isalpha(l) || !std::isalpha(r)) continue;
        out.rows.push_back({static_cast<char>(l), static_cast<char>(r), rule.rank,
                            table.count(l, r)});
        covered[l][r] = true;
    }
    for (size_t l = 0; l < 256; ++l) {
        for (size_t r = 0; r < 256; ++r) {
            uint64_t c = table.counts[l * 256 + r];
            if (c == 0 || covered[l][r]) continue;
            out.rows.push_back({static_cast<char>(l), static_cast<char>(r), sentinel, c});
        }
    }
    if (out.rows.size() < 3)
        throw DataError("fewer than 3 distinct boundary pairs");

    std::sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) {
        if (a.rank_position != b.rank_position) return a.rank_position < b.rank_position;
        if (a.left != b.left) return a.left < b.left;
        return a.right < b.right;
    });

    std::vector<double> positions, frequencies;
    positions.reserve(out.rows.size());
    frequencies.reserve(out.rows.size());
    for (const auto& row : out.rows) {
        positions.push_back(static_cast<double>(row.rank_position));
        frequencies.push_back(static_cast<double>(row.frequency));
    }
    out.correlation = spearman(positions, frequencies);
    return out;
}

void write_boundary_csv(const BoundaryCorrelation& correlation, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open boundary csv for writing: " + path);
    out << "left_char,right_char,merge_rank,frequency\n";
    for (const auto& row : correlation.rows)
        out << row.left << ',' << row.right << ',' << row.rank_position << ','
            << row.frequency << '\n';
    if (!out) throw DataError("I/O failure writing boundary csv: " + path);
}

void write_scatter_svg(const BoundaryCorrelation& correlation, const std::string& path,
                       const std::string& title) {
    const double width = 760, height = 520;
    const double ml = 70, mr = 20, mt = 44, mb = 52;
    uint64_t max_freq = 1;
    uint32_t max_rank = 1;
    for (const auto& row : correlation.rows) {
        max_freq = std::max(max_freq, row.frequency);
        max_rank = std::max(max_rank, row.rank_position);
    }
    auto sx = [&](double rank) {
        return ml + rank / static_cast<double>(max_rank) * (width - ml - mr);
    };
    auto sy = [&](double freq) {
        return height - mb - freq / static_cast<double>(max_freq) * (height - mt - mb);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open svg for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << "merge rank position (later = weaker)</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << (mt + height - mb) / 2 << ")\">"
        << "boundary pair frequency</text>\n";
    for (const auto& row : correlation.rows)
        out << "<circle cx=\"" << sx(row.rank_position) << "\" cy=\"" << sy(
                   static_cast<double>(row.frequency))
            << "\" r=\"2.2\" fill=\"steelblue\" fill-opacity=\"0.55\"/>\n";
    out << "</svg>\n";
    if (!out) throw DataError("I/O failure writing svg: " + path);
}

const char* condition_pattern_name(ConditionPattern pattern) {
    switch (pattern) {
        case ConditionPattern::kMarker23: return "marker_2_3";
        case ConditionPattern::kMarker2X3: return "marker_2_x3";
        case ConditionPattern::kPlain32: return "plain_3_2";
        case ConditionPattern::kMarker32: return "marker_3_2";
    }
    return "unknown";
}

ConditionOutcome check_condition(const ConditionCase& c, const MergeTable& merges) {
    auto s = [&](char a, char b) {
        return merges.strength(std::string(1, a), std::string(1, b));
    };
    for (char ch : {c.alpha, c.beta, c.gamma, c.delta, c.x, c.y})
        if (ch != 0 && !merges.covers_symbol(std::string(1, ch)))
            throw DataError(std::string("letter '") + ch +
                            "' not covered by the merge table");

    // Comparisons between two merge positions: the pair to the left wins a
    // tie, because identical rules fire leftmost-first. Two positions tie
    // exactly when letter coincidences make them the same rule; for distinct
    // rules these conditions reduce to strict strength inequalities.
    std::string marker(kSpaceMarker);
    std::string word;
    std::vector<std::string> target;
    bool condition = false;
    switch (c.pattern) {
        case ConditionPattern::kMarker23:
            // after the marker merge: [.a, b, X, Y, g]; (X,Y) must beat
            // (b,X) on its left strictly and (Y,g) on its right up to ties
            word = marker + c.alpha + c.beta + c.x + c.y + c.gamma;
            target = {marker + c.alpha + c.beta, std::string{c.x, c.y, c.gamma}};
            condition = s(c.beta, c.x) < s(c.x, c.y) && s(c.x, c.y) >= s(c.y, c.gamma);
            break;
        case ConditionPattern::kMarker2X3:
            word = marker + c.alpha + c.beta + c.x + c.gamma + c.delta;
            target = {marker + c.alpha + c.beta, std::string{c.x, c.gamma, c.delta}};
            condition = s(c.beta, c.x) < s(c.x, c.gamma) &&
                        s(c.x, c.gamma) >= s(c.gamma, c.delta);
            break;
        case ConditionPattern::kPlain32:
            word = std::string{c.alpha, c.beta, c.x, c.gamma, c.delta};
            target = {std::string{c.alpha, c.beta, c.x}, std::string{c.gamma, c.delta}};
            condition = s(c.alpha, c.beta) >= s(c.beta, c.x) &&
                        s(c.x, c.gamma) < s(c.gamma, c.delta);
            break;
        case ConditionPattern::kMarker32:
            // (X,g) must lose to (b,X) up to ties or to (g,d) strictly,
            // otherwise it fires and consumes X
            word = marker + c.alpha + c.beta + c.x + c.gamma + c.delta;
            target = {marker + c.alpha + c.beta + c.x, std::string{c.gamma, c.delta}};
            condition = s(c.beta, c.x) >= s(c.x, c.gamma) ||
                        s(c.x, c.gamma) < s(c.gamma, c.delta);
            break;
    }

    ConditionOutcome outcome;
    outcome.segmentation = apply_merges(word, merges);
    outcome.target_matched = outcome.segmentation == target;
    outcome.condition_holds = condition;
    outcome.implication_ok = !outcome.target_matched || condition;
    return outcome;
}

uint64_t ConditionReport::total_violations() const {
    uint64_t v = 0;
    for (const auto& p : patterns) v += p.violations;
    return v;
}

ConditionReport enumerate_conditions(int alphabet_size, uint64_t trials,
                                     RandomStream stream) {
    if (alphabet_size < 3 || alphabet_size > 8)
        throw DataError("condition enumeration expects alphabet size in [3, 8]");

    ConditionReport report;
    constexpr ConditionPattern kPatterns[4] = {
        ConditionPattern::kMarker23, ConditionPattern::kMarker2X3,
        ConditionPattern::kPlain32, ConditionPattern::kMarker32};

    for (uint64_t t = 0; t < trials; ++t) {
        RandomStream trial = stream.fork(t);
        RandomStream table_stream = trial.fork(0);
        Tokenizer tok = build_controlled_tokenizer(table_stream, alphabet_size);
        RandomStream binding_stream = trial.fork(1);
        auto letter = [&] {
            return static_cast<char>(
                'a' + binding_stream.next_below(static_cast<uint64_t>(alphabet_size)));
        };
        ConditionCase c{ConditionPattern::kMarker23, letter(), letter(),
                        letter(), letter(), letter(), letter()};
        for (size_t p = 0; p < 4; ++p) {
            c.pattern = kPatterns[p];
            ConditionOutcome outcome = check_condition(c, tok.merges);
            auto& stats = report.patterns[p];
            stats.trials++;
            if (outcome.target_matched) stats.target_hits++;
            if (!outcome.implication_ok) stats.violations++;
        }
    }
    return report;
}

void write_condition_csv(const ConditionReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open condition csv for writing: " + path);
    out << "pattern,trials,violations\n";
    constexpr ConditionPattern kPatterns[4] = {
        ConditionPattern::kMarker23, ConditionPattern::kMarker2X3,
        ConditionPattern::kPlain32, ConditionPattern::kMarker32};
    for (size_t p = 0; p < 4; ++p)
        out << condition_pattern_name(kPatterns[p]) << ',' << report.patterns[p].trials
            << ',' << report.patterns[p].violations << '\n';
    if (!out) throw DataError("I/O failure writing condition csv: " + path);
}

} // namespace charprobe
