#pragma once

#include <algorithm>
#include <cstdint>

#include "ssjoin/similarity.hpp"

namespace ssjoin {

struct PrefixLengths {
    std::uint32_t probe = 1; // prefix examined when probing the index
    std::uint32_t index = 1; // prefix whose tokens get indexed
};

/// Completeness-preserving prefix lengths for a size-ascending
/// incremental self-join, where every indexed set is no larger than the
/// probe. The required overlap eqo(r, s) is minimized over indexed
/// partners at s = r and over probed partners at s = minsize(r), so the
/// probe prefix is the longer, minimum-size-based one and the indexed
/// prefix the shorter, self-pair-based one.
inline PrefixLengths prefix_lengths(const SimilarityPredicate& pred, std::uint32_t size) {
    auto clamp = [size](std::uint64_t len) -> std::uint32_t {
        if (len < 1) return 1;
        return static_cast<std::uint32_t>(std::min<std::uint64_t>(len, size));
    };
    PrefixLengths p;
    std::uint64_t minsize = size_bounds(pred, size).min;
    p.probe = clamp(minsize >= size ? 1 : size - minsize + 1);
    std::uint64_t self_overlap = equivalent_overlap(pred, size, size);
    p.index = clamp(self_overlap >= size ? 1 : size - self_overlap + 1);
    return p;
}

inline bool length_filter(const SimilarityPredicate& pred, std::uint32_t size_r,
                          std::uint32_t size_s) {
    return size_bounds(pred, size_r).contains(size_s);
}

struct MatchPosition {
    std::uint32_t pos_r = 0;
    std::uint32_t pos_s = 0;
};

/// Keep iff the overlap accumulated so far plus the shorter remaining
/// suffix can still reach the required overlap. Tokens strictly after the
/// match position count; the matched token is already in current_overlap.
inline bool positional_filter(const SimilarityPredicate& pred, std::uint32_t size_r,
                              std::uint32_t size_s, MatchPosition match,
                              std::uint32_t current_overlap) {
    std::uint64_t required = equivalent_overlap(pred, size_r, size_s);
    std::uint64_t rest = std::min<std::uint64_t>(size_r - match.pos_r - 1,
                                                 size_s - match.pos_s - 1);
    return current_overlap + rest >= required;
}

} // namespace ssjoin
