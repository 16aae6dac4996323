#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ssjoin/collection.hpp"

namespace ssjoin {

inline constexpr std::uint64_t kUnboundedBudget = std::numeric_limits<std::uint64_t>::max();

/// Serialized candidates of many probe sets in two flat arrays. C holds
/// candidate set indices; C_O holds, at even positions, a probe set index
/// and, at odd positions, the cumulative end offset of that probe's slice
/// in C. A probe may appear in several chunks when its batch had to be
/// split at the budget boundary.
struct CandidateChunk {
    std::vector<SetIndex> C;
    std::vector<std::uint32_t> C_O;

    std::size_t candidate_count() const { return C.size(); }
    std::uint64_t byte_size() const {
        return sizeof(SetIndex) * C.size() + sizeof(std::uint32_t) * C_O.size();
    }
};

struct DecodedSlice {
    SetIndex probe;
    std::size_t begin; // slice [begin, begin + candidates.size()) in C
    std::span<const SetIndex> candidates;
};

inline std::vector<DecodedSlice> decode(const CandidateChunk& chunk) {
    std::vector<DecodedSlice> slices;
    slices.reserve(chunk.C_O.size() / 2);
    std::size_t prev = 0;
    for (std::size_t e = 0; e + 1 < chunk.C_O.size(); e += 2) {
        SetIndex probe = chunk.C_O[e];
        std::size_t end = chunk.C_O[e + 1];
        slices.push_back({probe, prev,
                          std::span<const SetIndex>(chunk.C.data() + prev, end - prev)});
        prev = end;
    }
    return slices;
}

/// Accumulates candidate batches into flat arrays until the M_c byte
/// budget is reached. One C_O entry costs 8 bytes, one candidate 4.
class ChunkBuilder {
public:
    static constexpr std::uint64_t kEntryBytes = 2 * sizeof(std::uint32_t);
    static constexpr std::uint64_t kCandidateBytes = sizeof(SetIndex);
    static constexpr std::uint64_t kMinBudget = kEntryBytes + kCandidateBytes;

    explicit ChunkBuilder(std::uint64_t budget = kUnboundedBudget) : budget_(budget) {
        assert(budget_ >= kMinBudget);
    }

    /// Candidates that still fit after opening one more C_O entry, or 0 if
    /// not even the entry header fits.
    std::size_t capacity() const {
        std::uint64_t used = chunk_.byte_size();
        if (used + kEntryBytes > budget_) return 0;
        return static_cast<std::size_t>((budget_ - used - kEntryBytes) / kCandidateBytes);
    }

    bool entry_fits() const { return chunk_.byte_size() + kEntryBytes <= budget_; }

    /// Pre: candidates.size() <= capacity() (and entry_fits() for empties).
    void append(SetIndex probe, std::span<const SetIndex> candidates) {
        chunk_.C.insert(chunk_.C.end(), candidates.begin(), candidates.end());
        chunk_.C_O.push_back(probe);
        chunk_.C_O.push_back(static_cast<std::uint32_t>(chunk_.C.size()));
    }

    bool empty() const { return chunk_.C_O.empty(); }
    std::uint64_t byte_size() const { return chunk_.byte_size(); }
    std::uint64_t budget() const { return budget_; }

    CandidateChunk seal() {
        assert(!empty());
        CandidateChunk sealed = std::move(chunk_);
        chunk_ = {};
        return sealed;
    }

private:
    std::uint64_t budget_;
    CandidateChunk chunk_;
};

} // namespace ssjoin
