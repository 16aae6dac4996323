#pragma once

#include <atomic>
#include <cassert>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "ssjoin/chunk.hpp"
#include "ssjoin/collection.hpp"
#include "ssjoin/similarity.hpp"
#include "ssjoin/worker_pool.hpp"

namespace ssjoin {

enum class StrategyKind { A, B, C, Auto };

/// Work-assignment strategy plus the worker-group size B (power of two).
struct Strategy {
    StrategyKind kind = StrategyKind::Auto;
    std::uint32_t group_size = 32;

    void validate() const {
        if (group_size < 1 || (group_size & (group_size - 1)) != 0)
            throw std::invalid_argument("group size must be a power of two");
    }
};

enum class OutputMode { Count, Pairs };

/// Either per-candidate boolean flags (slot order = C order) or an
/// aggregate count. In pairs mode both are filled; in count mode flags
/// are never materialized.
struct VerificationOutput {
    std::vector<std::uint8_t> flags;
    std::uint64_t count = 0;
};

struct VerifyResult {
    std::uint64_t overlap = 0;
    bool met = false;
    std::uint32_t comparisons = 0; // element comparisons performed
};

/// Sequential merge loop with two-sided early termination: stop once the
/// required overlap is reached, or once the shorter remaining suffix can
/// no longer close the gap. The reported overlap is exact whenever met.
inline VerifyResult verify_pair_count(std::span<const TokenCode> r,
                                      std::span<const TokenCode> s,
                                      std::uint64_t required) {
    VerifyResult res;
    std::size_t i = 0, j = 0;
    const std::size_t m = r.size(), n = s.size();
    while (i < m && j < n) {
        if (res.overlap >= required) break;
        if (res.overlap + std::min(m - i, n - j) < required) break;
        ++res.comparisons;
        if (r[i] == s[j]) {
            ++res.overlap;
            ++i;
            ++j;
        } else if (r[i] < s[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    res.met = res.overlap >= required;
    return res;
}

/// One worker's segment of the merge path: starting coordinates into
/// (r, s) and the number of path hops it may take.
struct PathPartition {
    std::uint32_t start_r = 0;
    std::uint32_t start_s = 0;
    std::uint32_t hops = 0;
};

namespace detail {

// Merge-path split at diagonal d: the unique (i, j), i + j = d, consistent
// with the merge order that consumes r[i] before s[j] iff r[i] <= s[j].
inline std::uint32_t merge_path_split(std::span<const TokenCode> r,
                                      std::span<const TokenCode> s, std::size_t d) {
    const std::size_t m = r.size(), n = s.size();
    std::size_t lo = d > n ? d - n : 0;
    std::size_t hi = d < m ? d : m;
    while (lo < hi) {
        std::size_t i = lo + (hi - lo) / 2;
        std::size_t j = d - i;
        if (i < m && j > 0 && r[i] <= s[j - 1]) {
            lo = i + 1; // r[i] should already be consumed
        } else if (i > 0 && j < n && r[i - 1] > s[j]) {
            hi = i - 1; // s[j] should already be consumed
        } else {
            lo = hi = i;
        }
    }
    return static_cast<std::uint32_t>(lo);
}

} // namespace detail

/// Cut the merge path of two sorted sets into B segments by placing cross
/// diagonals ceil((|r|+|s|)/B) hops apart and binary-searching each
/// diagonal's crossing point. Segments are disjoint and cover the path.
inline std::vector<PathPartition> intersect_path_partitions(std::span<const TokenCode> r,
                                                            std::span<const TokenCode> s,
                                                            std::uint32_t workers) {
    assert(workers >= 1);
    const std::size_t total = r.size() + s.size();
    const std::size_t spacing = workers ? (total + workers - 1) / workers : total;
    std::vector<PathPartition> parts;
    parts.reserve(workers);
    for (std::uint32_t k = 0; k < workers; ++k) {
        std::size_t d = static_cast<std::size_t>(k) * spacing;
        if (d >= total) {
            parts.push_back({static_cast<std::uint32_t>(r.size()),
                             static_cast<std::uint32_t>(s.size()), 0});
            continue;
        }
        std::uint32_t i = detail::merge_path_split(r, s, d);
        std::size_t hops = std::min(spacing, total - d);
        parts.push_back({i, static_cast<std::uint32_t>(d - i),
                         static_cast<std::uint32_t>(hops)});
    }
    return parts;
}

/// Partition split for a single worker, avoiding materializing all B
/// descriptors when each logical worker computes only its own.
inline PathPartition intersect_path_partition(std::span<const TokenCode> r,
                                              std::span<const TokenCode> s,
                                              std::uint32_t workers, std::uint32_t k) {
    const std::size_t total = r.size() + s.size();
    const std::size_t spacing = (total + workers - 1) / workers;
    std::size_t d = static_cast<std::size_t>(k) * spacing;
    if (total == 0 || d >= total)
        return {static_cast<std::uint32_t>(r.size()), static_cast<std::uint32_t>(s.size()), 0};
    std::uint32_t i = detail::merge_path_split(r, s, d);
    return {i, static_cast<std::uint32_t>(d - i),
            static_cast<std::uint32_t>(std::min(spacing, total - d))};
}

/// Walk one merge-path segment, counting only the equal-element diagonal
/// moves. A common value is counted at the hop that consumes its r-side
/// element, so it lands in exactly one partition.
inline std::uint64_t partition_count(std::span<const TokenCode> r,
                                     std::span<const TokenCode> s,
                                     const PathPartition& part) {
    const std::size_t m = r.size(), n = s.size();
    std::size_t i = part.start_r, j = part.start_s;
    std::uint64_t count = 0;
    for (std::uint32_t h = 0; h < part.hops && (i < m || j < n); ++h) {
        if (j >= n || (i < m && r[i] <= s[j])) {
            if (j < n && r[i] == s[j]) ++count;
            ++i;
        } else {
            ++j;
        }
    }
    return count;
}

/// Exact associative sum; a reduction tree of any shape gives the same
/// result, which the pairwise halving here exercises.
inline std::uint64_t reduce_counts(std::span<const std::uint64_t> counts) {
    std::vector<std::uint64_t> level(counts.begin(), counts.end());
    while (level.size() > 1) {
        std::size_t half = (level.size() + 1) / 2;
        for (std::size_t i = 0; i < level.size() / 2; ++i)
            level[i] = level[2 * i] + level[2 * i + 1];
        if (level.size() % 2) level[half - 1] = level.back();
        level.resize(half);
    }
    return level.empty() ? 0 : level[0];
}

/// Run-wide instrumentation, shared across worker threads.
struct VerifyStats {
    std::atomic<std::uint64_t> pairs_verified{0};
    std::atomic<std::uint64_t> early_exit_prunes{0};          // met=false with fewer comparisons than |r|+|s|
    std::atomic<std::uint64_t> comparison_budget_violations{0}; // comparisons > |r|+|s| (must stay 0)

    void record(const VerifyResult& res, std::size_t size_r, std::size_t size_s) {
        pairs_verified.fetch_add(1, std::memory_order_relaxed);
        if (res.comparisons > size_r + size_s)
            comparison_budget_violations.fetch_add(1, std::memory_order_relaxed);
        if (!res.met && res.comparisons < size_r + size_s)
            early_exit_prunes.fetch_add(1, std::memory_order_relaxed);
    }
};

namespace detail {

struct ChunkContext {
    const CandidateChunk& chunk;
    const Collection& collection;
    const SimilarityPredicate& pred;
    std::vector<DecodedSlice> slices;
    std::vector<std::uint8_t>* flags; // null in count mode
    VerifyStats* stats;

    void set_flag(std::size_t slot, bool value) const {
        if (flags) (*flags)[slot] = value ? 1 : 0;
    }
};

// One worker verifies a sub-range of the slice's candidates sequentially.
inline std::uint64_t verify_slice_range(const ChunkContext& ctx, const DecodedSlice& slice,
                                        std::size_t first, std::size_t stride) {
    auto probe = ctx.collection.set_view(slice.probe);
    std::uint64_t count = 0;
    for (std::size_t c = first; c < slice.candidates.size(); c += stride) {
        SetIndex cand = slice.candidates[c];
        auto other = ctx.collection.set_view(cand);
        std::uint64_t required =
            equivalent_overlap(ctx.pred, probe.size(), other.size());
        VerifyResult res = verify_pair_count(probe, other, required);
        if (ctx.stats) ctx.stats->record(res, probe.size(), other.size());
        ctx.set_flag(slice.begin + c, res.met);
        if (res.met) ++count;
    }
    return count;
}

} // namespace detail

/// Verification engine: applies one of the three work-assignment
/// strategies to a sealed chunk on the given worker pool.
///
///   A: work unit = one probe slice, verified start to finish by one worker.
///   B: the slice's candidates are divided among the B workers of a group;
///      per-worker counts are reduced group-locally, then globally.
///   C: the group's B workers jointly intersect each candidate pair via
///      intersect-path partitions (full intersection, no early exit); a
///      single designated worker records the pair's flag.
class VerificationEngine {
public:
    VerificationEngine(const Collection& collection, SimilarityPredicate pred,
                       OutputMode mode, Strategy strategy)
        : collection_(collection), pred_(pred), mode_(mode), strategy_(resolve(strategy)) {}

    /// Auto resolves to B for small average set sizes and to C with an
    /// enlarged group otherwise.
    Strategy resolve(Strategy s) const {
        if (s.kind != StrategyKind::Auto) return s;
        if (collection_.average_set_size() <= 10) return {StrategyKind::B, s.group_size};
        return {StrategyKind::C, std::max<std::uint32_t>(s.group_size, 128)};
    }

    Strategy strategy() const { return strategy_; }

    VerificationOutput verify_chunk(const CandidateChunk& chunk, WorkerPool& pool,
                                    VerifyStats* stats = nullptr) const {
        VerificationOutput out;
        if (mode_ == OutputMode::Pairs) {
            out.flags.assign(chunk.candidate_count(), 0);
            // 4-byte candidate indices, 1-byte flags: ||O|| = ||C|| / 4.
            assert(out.flags.size() * sizeof(std::uint8_t) ==
                   chunk.C.size() * sizeof(SetIndex) / 4);
        }
        detail::ChunkContext ctx{chunk, collection_, pred_, decode(chunk),
                                 mode_ == OutputMode::Pairs ? &out.flags : nullptr, stats};
        switch (strategy_.kind) {
            case StrategyKind::A: out.count = run_a(ctx, pool); break;
            case StrategyKind::B: out.count = run_b(ctx, pool); break;
            case StrategyKind::C: out.count = run_c(ctx, pool); break;
            case StrategyKind::Auto: break; // resolved in the constructor
        }
        return out;
    }

private:
    std::uint64_t run_a(const detail::ChunkContext& ctx, WorkerPool& pool) const {
        std::vector<std::uint64_t> counts(ctx.slices.size(), 0);
        pool.parallel_for(ctx.slices.size(), [&](std::size_t u) {
            counts[u] = detail::verify_slice_range(ctx, ctx.slices[u], 0, 1);
        });
        return reduce_counts(counts);
    }

    std::uint64_t run_b(const detail::ChunkContext& ctx, WorkerPool& pool) const {
        const std::uint32_t group = strategy_.group_size;
        std::vector<std::uint64_t> worker_counts(ctx.slices.size() * group, 0);
        pool.parallel_for(worker_counts.size(), [&](std::size_t item) {
            std::size_t u = item / group;
            std::size_t k = item % group;
            worker_counts[item] =
                detail::verify_slice_range(ctx, ctx.slices[u], k, group);
        });
        // Group-local reduction first, then the global one.
        std::vector<std::uint64_t> group_counts(ctx.slices.size(), 0);
        for (std::size_t u = 0; u < ctx.slices.size(); ++u)
            group_counts[u] = reduce_counts(
                std::span(worker_counts.data() + u * group, group));
        return reduce_counts(group_counts);
    }

    std::uint64_t run_c(const detail::ChunkContext& ctx, WorkerPool& pool) const {
        const std::uint32_t group = strategy_.group_size;
        const std::size_t n_cands = ctx.chunk.candidate_count();
        auto overlaps = std::make_unique<std::atomic<std::uint64_t>[]>(n_cands);
        for (std::size_t i = 0; i < n_cands; ++i)
            overlaps[i].store(0, std::memory_order_relaxed);

        // Phase 1: every logical worker walks its own path partition of
        // every candidate pair of its slice. No early exit; the full
        // intersection is accumulated per candidate.
        pool.parallel_for(ctx.slices.size() * group, [&](std::size_t item) {
            std::size_t u = item / group;
            std::uint32_t k = static_cast<std::uint32_t>(item % group);
            const DecodedSlice& slice = ctx.slices[u];
            auto probe = ctx.collection.set_view(slice.probe);
            for (std::size_t c = 0; c < slice.candidates.size(); ++c) {
                auto other = ctx.collection.set_view(slice.candidates[c]);
                PathPartition part = intersect_path_partition(probe, other, group, k);
                std::uint64_t cnt = partition_count(probe, other, part);
                if (cnt)
                    overlaps[slice.begin + c].fetch_add(cnt, std::memory_order_relaxed);
            }
        });

        // Phase 2: one designated worker per group compares the summed
        // intersections to the required overlap and records the results.
        std::vector<std::uint64_t> counts(ctx.slices.size(), 0);
        pool.parallel_for(ctx.slices.size(), [&](std::size_t u) {
            const DecodedSlice& slice = ctx.slices[u];
            auto size_r = ctx.collection.set_size(slice.probe);
            std::uint64_t local = 0;
            for (std::size_t c = 0; c < slice.candidates.size(); ++c) {
                auto size_s = ctx.collection.set_size(slice.candidates[c]);
                std::uint64_t required = equivalent_overlap(ctx.pred, size_r, size_s);
                bool met = overlaps[slice.begin + c].load(std::memory_order_relaxed) >=
                           required;
                ctx.set_flag(slice.begin + c, met);
                if (met) ++local;
            }
            counts[u] = local;
        });
        return reduce_counts(counts);
    }

    const Collection& collection_;
    SimilarityPredicate pred_;
    OutputMode mode_;
    Strategy strategy_;
};

} // namespace ssjoin
