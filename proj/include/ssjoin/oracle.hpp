#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssjoin/collection.hpp"
#include "ssjoin/similarity.hpp"

namespace ssjoin {

/// Reference result: all qualifying pairs in sorted-collection indices,
/// r > s, with their exact-comparison-backed scores. Produced without any
/// filter so it stays independent of the code under test.
struct OraclePair {
    SetIndex r;
    SetIndex s;
    std::uint64_t overlap;
    double score;
};

struct OracleResult {
    std::vector<OraclePair> pairs;
    std::uint64_t count() const { return pairs.size(); }
};

inline constexpr std::size_t kOracleSetLimit = 5000;

/// Quadratic scan with full merge-intersections and exact threshold
/// comparisons. Guarded: refuses collections too large for a desk-scale
/// quadratic pass.
inline OracleResult brute_force_join(const Collection& collection,
                                     const SimilarityPredicate& pred) {
    if (collection.size() > kOracleSetLimit)
        throw std::invalid_argument("oracle guard: collection has " +
                                    std::to_string(collection.size()) +
                                    " sets, limit is " + std::to_string(kOracleSetLimit));
    OracleResult result;
    const auto n = static_cast<SetIndex>(collection.size());
    for (SetIndex i = 1; i < n; ++i) {
        auto r = collection.set_view(i);
        for (SetIndex j = 0; j < i; ++j) {
            auto s = collection.set_view(j);
            std::uint64_t overlap = 0;
            std::size_t a = 0, b = 0;
            while (a < r.size() && b < s.size()) {
                if (r[a] == s[b]) {
                    ++overlap;
                    ++a;
                    ++b;
                } else if (r[a] < s[b]) {
                    ++a;
                } else {
                    ++b;
                }
            }
            if (meets_threshold(pred, overlap, r.size(), s.size()))
                result.pairs.push_back(
                    {i, j, overlap, similarity_score(pred, overlap, r.size(), s.size())});
        }
    }
    return result;
}

/// Synthetic workload knobs: desk-scale stand-ins for the real corpora
/// (uniform, Zipf-skewed, and duplicate-heavy click-stream-like data).
struct SynthConfig {
    std::size_t sets = 100;
    std::uint32_t min_size = 1;
    std::uint32_t max_size = 50;
    bool zipf_sizes = false;
    double size_skew = 1.0;
    std::uint32_t universe = 1000;
    bool zipf_tokens = false;
    double token_skew = 1.0;
    double duplicate_fraction = 0.0; // chance a set is copied from an earlier one
};

inline std::vector<RawRecord> synth_collection(std::uint64_t seed, const SynthConfig& cfg) {
    std::mt19937_64 rng(seed);
    auto zipf_weights = [](std::uint32_t n, double skew) {
        std::vector<double> w(n);
        for (std::uint32_t k = 0; k < n; ++k) w[k] = 1.0 / std::pow(k + 1.0, skew);
        return w;
    };

    std::discrete_distribution<std::uint32_t> size_dist;
    if (cfg.zipf_sizes) {
        auto w = zipf_weights(cfg.max_size - cfg.min_size + 1, cfg.size_skew);
        size_dist = std::discrete_distribution<std::uint32_t>(w.begin(), w.end());
    }
    std::uniform_int_distribution<std::uint32_t> uniform_size(cfg.min_size, cfg.max_size);

    std::discrete_distribution<std::uint32_t> token_zipf;
    if (cfg.zipf_tokens) {
        auto w = zipf_weights(cfg.universe, cfg.token_skew);
        token_zipf = std::discrete_distribution<std::uint32_t>(w.begin(), w.end());
    }
    std::uniform_int_distribution<std::uint32_t> uniform_token(0, cfg.universe - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<RawRecord> records;
    records.reserve(cfg.sets);
    for (std::size_t i = 0; i < cfg.sets; ++i) {
        if (!records.empty() && coin(rng) < cfg.duplicate_fraction) {
            std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
            records.push_back(records[pick(rng)]);
            continue;
        }
        std::uint32_t size =
            cfg.zipf_sizes ? cfg.min_size + size_dist(rng) : uniform_size(rng);
        RawRecord rec;
        rec.tokens.reserve(size);
        for (std::uint32_t t = 0; t < size; ++t) {
            std::uint32_t tok = cfg.zipf_tokens ? token_zipf(rng) : uniform_token(rng);
            rec.tokens.push_back("t" + std::to_string(tok));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace ssjoin
