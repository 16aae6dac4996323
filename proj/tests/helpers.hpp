#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "ssjoin/collection.hpp"
#include "ssjoin/oracle.hpp"
#include "ssjoin/pipeline.hpp"

namespace ssjoin::testing {

/// Build a collection verbatim from already-sorted coded sets, without
/// the preprocessing reorder. original_id = position.
inline Collection from_sets(const std::vector<std::vector<TokenCode>>& sets) {
    Collection c;
    for (std::uint32_t i = 0; i < sets.size(); ++i) {
        c.tokens.insert(c.tokens.end(), sets[i].begin(), sets[i].end());
        c.offsets.push_back(static_cast<std::uint32_t>(c.tokens.size()));
        c.original_id.push_back(i);
    }
    return c;
}

inline Collection random_collection(std::uint64_t seed, const SynthConfig& cfg) {
    auto records = synth_collection(seed, cfg);
    auto dict = Dictionary::build(records);
    return preprocess(records, dict);
}

inline SimilarityPredicate jaccard(std::uint64_t num, std::uint64_t den) {
    SimilarityPredicate pred;
    pred.function = SimilarityFunction::Jaccard;
    pred.threshold = {num, den};
    pred.threshold.reduce();
    return pred;
}

/// Oracle pairs mapped to normalized original-id pairs, sorted — the
/// common comparison currency against JoinReport::pairs.
inline std::vector<ResultPair> oracle_pairs(const Collection& collection,
                                            const OracleResult& oracle) {
    std::vector<ResultPair> out;
    for (const auto& p : oracle.pairs) {
        auto a = collection.original_id[p.r];
        auto b = collection.original_id[p.s];
        out.emplace_back(std::max(a, b), std::min(a, b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<ResultPair> sorted(std::vector<ResultPair> pairs) {
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

} // namespace ssjoin::testing
