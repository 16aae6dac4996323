#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ssjoin/collection.hpp"
#include "ssjoin/filters.hpp"
#include "ssjoin/inverted_index.hpp"
#include "ssjoin/similarity.hpp"

namespace ssjoin {

/// Candidates of one probe set, deduplicated and filtered. Self-join
/// discipline: every candidate index is strictly smaller than the probe.
struct CandidateBatch {
    SetIndex probe = 0;
    std::vector<SetIndex> candidates;
};

namespace detail {

inline std::size_t token_universe(const Collection& c) {
    if (c.tokens.empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(c.tokens.begin(), c.tokens.end())) + 1;
}

// Epoch-stamped per-set marks: O(1) dedup across probes without clearing.
struct EpochMarks {
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;

    explicit EpochMarks(std::size_t n) : stamp(n, 0) {}
    void next() { ++epoch; }
    bool mark(std::size_t i) {
        if (stamp[i] == epoch) return false;
        stamp[i] = epoch;
        return true;
    }
};

} // namespace detail

/// AllPairs: incremental index nested loop with prefix and length filters.
/// Indexed sets are never larger than the probe, so only the lower size
/// bound needs checking during lookup.
template <typename Sink>
void allpairs_generate(const Collection& collection, const SimilarityPredicate& pred,
                       Sink&& sink) {
    const std::size_t n = collection.size();
    InvertedIndex index(detail::token_universe(collection));
    detail::EpochMarks seen(n);
    CandidateBatch batch;
    for (SetIndex i = 0; i < n; ++i) {
        auto r = collection.set_view(i);
        auto size_r = static_cast<std::uint32_t>(r.size());
        auto lens = prefix_lengths(pred, size_r);
        auto minsize = size_bounds(pred, size_r).min;
        seen.next();
        batch.probe = i;
        batch.candidates.clear();
        for (std::uint32_t p = 0; p < lens.probe; ++p) {
            for (const Posting& post : index.postings(r[p])) {
                if (collection.set_size(post.set) < minsize) continue;
                if (seen.mark(post.set)) batch.candidates.push_back(post.set);
            }
        }
        if (!batch.candidates.empty()) sink(batch);
        for (std::uint32_t p = 0; p < lens.index; ++p) index.add(r[p], i, p);
    }
}

/// PPJoin: AllPairs plus the positional filter, applied once per
/// pre-candidate at its first index match.
template <typename Sink>
void ppjoin_generate(const Collection& collection, const SimilarityPredicate& pred,
                     Sink&& sink) {
    const std::size_t n = collection.size();
    InvertedIndex index(detail::token_universe(collection));
    detail::EpochMarks seen(n);
    CandidateBatch batch;
    for (SetIndex i = 0; i < n; ++i) {
        auto r = collection.set_view(i);
        auto size_r = static_cast<std::uint32_t>(r.size());
        auto lens = prefix_lengths(pred, size_r);
        auto minsize = size_bounds(pred, size_r).min;
        seen.next();
        batch.probe = i;
        batch.candidates.clear();
        for (std::uint32_t p = 0; p < lens.probe; ++p) {
            for (const Posting& post : index.postings(r[p])) {
                auto size_s = collection.set_size(post.set);
                if (size_s < minsize) continue;
                if (!seen.mark(post.set)) continue;
                if (positional_filter(pred, size_r, size_s, {p, post.position}, 1))
                    batch.candidates.push_back(post.set);
            }
        }
        if (!batch.candidates.empty()) sink(batch);
        for (std::uint32_t p = 0; p < lens.index; ++p) index.add(r[p], i, p);
    }
}

/// GroupJoin: sets sharing (size, probe prefix) form a group handled as a
/// single set during filtering. Inter-group candidates go to the sink for
/// parallel verification (phase 1); intra-group pairs surface during group
/// expanding and are verified synchronously through host_verifier.
///
/// Grouping relies on the collection order: equal-size sets are sorted
/// lexicographically, so identical prefixes occupy contiguous ranges.
template <typename Sink, typename HostVerifier>
void groupjoin_generate(const Collection& collection, const SimilarityPredicate& pred,
                        Sink&& sink, HostVerifier&& host_verifier) {
    const std::size_t n = collection.size();
    struct Group {
        SetIndex first; // representative; members are [first, first + count)
        std::uint32_t count;
    };
    std::vector<Group> groups;
    {
        std::uint32_t prev_size = 0;
        std::uint32_t prev_prefix_len = 0;
        for (SetIndex i = 0; i < n; ++i) {
            auto set = collection.set_view(i);
            auto size = static_cast<std::uint32_t>(set.size());
            auto probe_len = prefix_lengths(pred, size).probe;
            bool same = false;
            if (!groups.empty() && size == prev_size && probe_len == prev_prefix_len) {
                auto rep = collection.set_view(groups.back().first);
                same = std::equal(set.begin(), set.begin() + probe_len, rep.begin());
            }
            if (same) {
                ++groups.back().count;
            } else {
                groups.push_back({i, 1});
                prev_size = size;
                prev_prefix_len = probe_len;
            }
        }
    }

    InvertedIndex index(detail::token_universe(collection));
    detail::EpochMarks seen(groups.size());
    CandidateBatch batch;
    for (std::uint32_t g = 0; g < groups.size(); ++g) {
        auto rep = collection.set_view(groups[g].first);
        auto size_r = static_cast<std::uint32_t>(rep.size());
        auto lens = prefix_lengths(pred, size_r);
        auto minsize = size_bounds(pred, size_r).min;
        seen.next();
        std::vector<std::uint32_t> matched;
        for (std::uint32_t p = 0; p < lens.probe; ++p) {
            for (const Posting& post : index.postings(rep[p])) {
                std::uint32_t h = post.set; // group id in this index
                auto size_s = collection.set_size(groups[h].first);
                if (size_s < minsize) continue;
                if (!seen.mark(h)) continue;
                if (positional_filter(pred, size_r, size_s, {p, post.position}, 1))
                    matched.push_back(h);
            }
        }
        if (!matched.empty()) {
            // Phase 1: expand the group pair to member pairs; every member
            // of a matched group precedes every member of g.
            for (std::uint32_t m = 0; m < groups[g].count; ++m) {
                batch.probe = groups[g].first + m;
                batch.candidates.clear();
                for (std::uint32_t h : matched) {
                    for (std::uint32_t k = 0; k < groups[h].count; ++k)
                        batch.candidates.push_back(groups[h].first + k);
                }
                sink(batch);
            }
        }
        // Phase 2: group expanding. Intra-group pairs share size and
        // prefix, so no filter can reject them; verify on the host side.
        for (std::uint32_t a = 1; a < groups[g].count; ++a)
            for (std::uint32_t b = 0; b < a; ++b)
                host_verifier(groups[g].first + a, groups[g].first + b);

        for (std::uint32_t p = 0; p < lens.index; ++p) index.add(rep[p], g, p);
    }
}

} // namespace ssjoin
