#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "ssjoin/chunk.hpp"
#include "ssjoin/collection.hpp"
#include "ssjoin/joiners.hpp"
#include "ssjoin/similarity.hpp"
#include "ssjoin/verify.hpp"
#include "ssjoin/worker_pool.hpp"

namespace ssjoin {

enum class Algorithm { AllPairs, PPJoin, GroupJoin };

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::AllPairs: return "allpairs";
        case Algorithm::PPJoin: return "ppjoin";
        case Algorithm::GroupJoin: return "groupjoin";
    }
    return "?";
}

struct PipelineConfig {
    Algorithm algorithm = Algorithm::PPJoin;
    std::uint64_t chunk_budget = 64ull << 20; // M_c in bytes; kUnboundedBudget = one chunk
    Strategy strategy;
    OutputMode mode = OutputMode::Count;
    unsigned workers = 1;
    // Test hook: called on the dispatcher for every verified chunk.
    std::function<void(const CandidateChunk&, const VerificationOutput&)> chunk_observer;

    void validate() const {
        if (chunk_budget < ChunkBuilder::kMinBudget)
            throw std::invalid_argument("chunk budget below one batch record");
        if (workers < 1) throw std::invalid_argument("workers must be >= 1");
        strategy.validate();
    }
};

struct PhaseTimings {
    double filtering_ms = 0;     // candidate generation minus serialization
    double serialization_ms = 0; // chunk append/seal/hand-off
    double verification_ms = 0;  // engine busy time
    double join_ms = 0;          // run_join wall clock
};

/// Result pair in original input line numbers, normalized first > second.
using ResultPair = std::pair<std::uint32_t, std::uint32_t>;

struct JoinReport {
    std::uint64_t count = 0;
    std::vector<ResultPair> pairs; // mode = pairs only
    PhaseTimings timings;
    std::uint64_t chunk_count = 0;
    std::uint64_t candidate_count = 0;
    std::uint64_t host_verified_pairs = 0; // GroupJoin phase 2
    std::uint64_t max_live_candidate_bytes = 0;
    std::uint64_t pairs_verified = 0;
    std::uint64_t early_exit_prunes = 0;
    std::uint64_t comparison_budget_violations = 0;
    Strategy resolved_strategy;
};

/// Role H2: expand true flags into result pairs carried as original
/// record ids.
inline std::vector<ResultPair> decode_pairs(const CandidateChunk& chunk,
                                            std::span<const std::uint8_t> flags,
                                            std::span<const std::uint32_t> id_map) {
    std::vector<ResultPair> out;
    for (const DecodedSlice& slice : decode(chunk)) {
        std::uint32_t probe_id = id_map[slice.probe];
        for (std::size_t c = 0; c < slice.candidates.size(); ++c) {
            if (!flags[slice.begin + c]) continue;
            std::uint32_t cand_id = id_map[slice.candidates[c]];
            out.emplace_back(std::max(probe_id, cand_id), std::min(probe_id, cand_id));
        }
    }
    return out;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Rendezvous hand-off of a single sealed chunk: ownership moves from the
// producer to the consumer, so at most one sealed chunk is ever live next
// to the producer's open one.
class ChunkHandoff {
public:
    // Blocks until the consumer has taken this chunk, so the producer
    // never starts a new chunk while two sealed ones are in flight. A
    // closed hand-off (consumer aborted) drops the chunk so the producer
    // can finish and surface the consumer's error.
    void put(CandidateChunk&& chunk) {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return !slot_.has_value() || closed_; });
        if (closed_) return;
        slot_ = std::move(chunk);
        cv_.notify_all();
        cv_.wait(lock, [&] { return !slot_.has_value() || closed_; });
    }

    std::optional<CandidateChunk> take() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return slot_.has_value() || closed_; });
        if (!slot_.has_value()) return std::nullopt;
        auto chunk = std::move(*slot_);
        slot_.reset();
        cv_.notify_all();
        return chunk;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        cv_.notify_all();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::optional<CandidateChunk> slot_;
    bool closed_ = false;
};

} // namespace detail

/// Three-role pipelined join. The caller's thread plays role 0 (candidate
/// generation and serialization, plus GroupJoin host-side verification);
/// a dispatcher thread runs the verification engine per sealed chunk; a
/// post-processing thread turns flags into result pairs. Hand-offs move
/// immutable sealed chunks; nothing is mutated after transfer.
inline JoinReport run_join(const Collection& collection, const SimilarityPredicate& pred,
                           const PipelineConfig& config) {
    config.validate();
    pred.validate();

    JoinReport report;
    VerificationEngine engine(collection, pred, config.mode, config.strategy);
    report.resolved_strategy = engine.strategy();
    WorkerPool pool(config.workers);
    VerifyStats stats;

    detail::ChunkHandoff to_dispatcher;
    std::mutex h2_mutex;
    std::condition_variable h2_cv;
    std::optional<std::pair<CandidateChunk, VerificationOutput>> h2_slot;
    bool h2_closed = false;
    bool h2_busy = false;

    std::vector<ResultPair> engine_pairs;
    std::uint64_t engine_count = 0;
    std::uint64_t verified_chunks = 0, verified_candidates = 0;
    double verification_ms = 0;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    std::uint64_t sealed_live_bytes = 0; // dispatched chunk bytes, producer-observed max below
    std::mutex live_mutex;
    std::uint64_t max_live = 0;
    auto observe_live = [&](std::uint64_t open_bytes) {
        std::lock_guard lock(live_mutex);
        max_live = std::max(max_live, sealed_live_bytes + open_bytes);
    };

    auto capture = [&](std::exception_ptr e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = e;
    };

    // Role H2: post-process flags into pairs, then release the chunk.
    std::thread h2([&] {
        try {
            while (true) {
                std::unique_lock lock(h2_mutex);
                h2_cv.wait(lock, [&] { return h2_slot.has_value() || h2_closed; });
                if (!h2_slot.has_value()) return;
                auto [chunk, output] = std::move(*h2_slot);
                h2_slot.reset();
                lock.unlock();
                auto decoded = decode_pairs(chunk, output.flags, collection.original_id);
                engine_pairs.insert(engine_pairs.end(), decoded.begin(), decoded.end());
                {
                    std::lock_guard live(live_mutex);
                    sealed_live_bytes -= chunk.byte_size();
                }
                lock.lock();
                h2_busy = false;
                h2_cv.notify_all();
            }
        } catch (...) {
            capture(std::current_exception());
        }
    });

    // Role H1: dispatch sealed chunks to the verification engine in
    // sealing order.
    std::thread h1([&] {
        try {
            while (true) {
                if (config.mode == OutputMode::Pairs) {
                    // Depth-2 pipeline: do not accept the next sealed chunk
                    // until H2 has released the previous one, keeping live
                    // candidate bytes within open chunk + dispatched chunk.
                    std::unique_lock lock(h2_mutex);
                    h2_cv.wait(lock, [&] { return !h2_busy; });
                }
                auto chunk = to_dispatcher.take();
                if (!chunk) break;
                auto t0 = detail::Clock::now();
                VerificationOutput output = engine.verify_chunk(*chunk, pool, &stats);
                verification_ms += detail::ms_since(t0);
                ++verified_chunks;
                verified_candidates += chunk->candidate_count();
                if (config.chunk_observer) config.chunk_observer(*chunk, output);
                engine_count += output.count;
                if (config.mode == OutputMode::Pairs) {
                    // The chunk travels with its output to H2.
                    std::unique_lock lock(h2_mutex);
                    h2_busy = true;
                    h2_slot.emplace(std::move(*chunk), std::move(output));
                    h2_cv.notify_all();
                } else {
                    std::lock_guard live(live_mutex);
                    sealed_live_bytes -= chunk->byte_size();
                }
            }
            // Drain H2 before closing it.
            {
                std::unique_lock lock(h2_mutex);
                h2_cv.wait(lock, [&] { return !h2_busy && !h2_slot.has_value(); });
                h2_closed = true;
                h2_cv.notify_all();
            }
        } catch (...) {
            capture(std::current_exception());
            std::lock_guard lock(h2_mutex);
            h2_closed = true;
            h2_cv.notify_all();
        }
    });

    // Role H0: generation + serialization on the calling thread.
    std::vector<ResultPair> host_pairs;
    std::uint64_t host_count = 0;
    ChunkBuilder builder(config.chunk_budget);
    double serialization_ms = 0;

    auto hand_off = [&]() {
        CandidateChunk sealed = builder.seal();
        {
            std::lock_guard lock(live_mutex);
            sealed_live_bytes += sealed.byte_size();
            max_live = std::max(max_live, sealed_live_bytes);
        }
        to_dispatcher.put(std::move(sealed));
    };

    auto sink = [&](const CandidateBatch& batch) {
        auto t0 = detail::Clock::now();
        std::span<const SetIndex> remaining(batch.candidates);
        bool appended = false;
        while (!remaining.empty() || !appended) {
            std::size_t cap = builder.capacity();
            std::size_t take = std::min(cap, remaining.size());
            if ((take == 0 && !remaining.empty()) ||
                (remaining.empty() && !builder.entry_fits())) {
                if (builder.empty())
                    throw std::runtime_error("chunk budget below one batch record");
                hand_off();
                continue;
            }
            builder.append(batch.probe, remaining.first(take));
            remaining = remaining.subspan(take);
            appended = true;
            if (remaining.empty()) break;
        }
        observe_live(builder.byte_size());
        serialization_ms += detail::ms_since(t0);
    };

    auto host_verify = [&](SetIndex probe, SetIndex candidate) {
        auto r = collection.set_view(probe);
        auto s = collection.set_view(candidate);
        std::uint64_t required = equivalent_overlap(pred, r.size(), s.size());
        VerifyResult res = verify_pair_count(r, s, required);
        stats.record(res, r.size(), s.size());
        if (!res.met) return;
        ++host_count;
        if (config.mode == OutputMode::Pairs) {
            std::uint32_t a = collection.original_id[probe];
            std::uint32_t b = collection.original_id[candidate];
            host_pairs.emplace_back(std::max(a, b), std::min(a, b));
        }
    };

    auto join_start = detail::Clock::now();
    double generation_ms = 0;
    try {
        auto gen_start = detail::Clock::now();
        switch (config.algorithm) {
            case Algorithm::AllPairs:
                allpairs_generate(collection, pred, sink);
                break;
            case Algorithm::PPJoin:
                ppjoin_generate(collection, pred, sink);
                break;
            case Algorithm::GroupJoin:
                groupjoin_generate(collection, pred, sink, host_verify);
                break;
        }
        if (!builder.empty()) {
            auto t0 = detail::Clock::now();
            hand_off();
            serialization_ms += detail::ms_since(t0);
        }
        generation_ms = detail::ms_since(gen_start);
    } catch (...) {
        capture(std::current_exception());
    }
    to_dispatcher.close();
    h1.join();
    h2.join();

    if (failure) std::rethrow_exception(failure);

    report.count = engine_count + host_count;
    if (config.mode == OutputMode::Pairs) {
        report.pairs = std::move(engine_pairs);
        report.pairs.insert(report.pairs.end(), host_pairs.begin(), host_pairs.end());
    }
    report.chunk_count = verified_chunks;
    report.candidate_count = verified_candidates;
    report.host_verified_pairs = host_count;
    report.max_live_candidate_bytes = max_live;
    report.pairs_verified = stats.pairs_verified.load();
    report.early_exit_prunes = stats.early_exit_prunes.load();
    report.comparison_budget_violations = stats.comparison_budget_violations.load();
    report.timings.serialization_ms = serialization_ms;
    report.timings.filtering_ms = std::max(0.0, generation_ms - serialization_ms);
    report.timings.verification_ms = verification_ms;
    report.timings.join_ms = detail::ms_since(join_start);
    return report;
}

} // namespace ssjoin
