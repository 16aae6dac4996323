// Acceptance suite: one pass/fail line per criterion, exit code = number
// of failed criteria.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ssjoin/oracle.hpp"
#include "ssjoin/pipeline.hpp"
#include "ssjoin/report.hpp"

using namespace ssjoin;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

unsigned max_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

SimilarityPredicate jaccard(std::uint64_t num, std::uint64_t den) {
    SimilarityPredicate pred;
    pred.function = SimilarityFunction::Jaccard;
    pred.threshold = {num, den};
    pred.threshold.reduce();
    return pred;
}

std::vector<ResultPair> normalized_pairs(const Collection& c, const OracleResult& oracle) {
    std::vector<ResultPair> out;
    out.reserve(oracle.pairs.size());
    for (const auto& p : oracle.pairs) {
        auto a = c.original_id[p.r];
        auto b = c.original_id[p.s];
        out.emplace_back(std::max(a, b), std::min(a, b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Criteria 1, 6 and 7 share one sweep: 100 seeded collections, a 0.05
// threshold grid, all algorithm/strategy/group-size combinations, with
// the chunk observer auditing flag-array sizing and the verify counters
// aggregated across every run.
void run_oracle_sweep(Outcome& c1, Outcome& c6, Outcome& c7) {
    std::uint64_t runs = 0, chunks_audited = 0, layout_errors = 0;
    std::uint64_t prunes = 0, violations = 0, verified = 0;
    std::uint64_t mismatches = 0;
    std::string first_mismatch;

    for (int i = 0; i < 100; ++i) {
        SynthConfig cfg;
        cfg.sets = 100 * (1 + i % 10);
        cfg.min_size = 1;
        cfg.max_size = 50;
        switch (i % 3) {
            case 0:
                cfg.universe = 2000;
                break;
            case 1:
                cfg.universe = 2000;
                cfg.zipf_tokens = true;
                cfg.token_skew = 1.0;
                break;
            case 2:
                cfg.universe = 500;
                cfg.zipf_tokens = true;
                cfg.token_skew = 1.0;
                cfg.duplicate_fraction = 0.4;
                break;
        }
        auto records = synth_collection(1000 + i, cfg);
        auto dict = Dictionary::build(records);
        auto collection = preprocess(records, dict);

        for (std::uint64_t tn = 10; tn <= 19; ++tn) { // 0.50 .. 0.95 step 0.05
            auto pred = jaccard(tn, 20);
            auto truth = normalized_pairs(collection, brute_force_join(collection, pred));
            for (auto alg : {Algorithm::AllPairs, Algorithm::PPJoin, Algorithm::GroupJoin}) {
                for (auto kind : {StrategyKind::A, StrategyKind::B, StrategyKind::C}) {
                    for (std::uint32_t group : {1u, 32u, 128u}) {
                        PipelineConfig config;
                        config.algorithm = alg;
                        config.mode = OutputMode::Pairs;
                        config.strategy = {kind, group};
                        config.chunk_budget = 256 << 10;
                        config.workers = max_workers();
                        config.chunk_observer = [&](const CandidateChunk& chunk,
                                                    const VerificationOutput& out) {
                            ++chunks_audited;
                            if (out.flags.size() * sizeof(std::uint8_t) !=
                                chunk.C.size() * sizeof(SetIndex) / 4)
                                ++layout_errors;
                        };
                        auto report = run_join(collection, pred, config);
                        ++runs;
                        prunes += report.early_exit_prunes;
                        violations += report.comparison_budget_violations;
                        verified += report.pairs_verified;
                        auto got = report.pairs;
                        std::sort(got.begin(), got.end());
                        if (report.count != truth.size() || got != truth) {
                            ++mismatches;
                            if (first_mismatch.empty()) {
                                std::ostringstream msg;
                                msg << "seed=" << 1000 + i << " n=" << cfg.sets
                                    << " t=" << tn << "/20 alg=" << to_string(alg)
                                    << " strategy=" << to_string(kind) << " B=" << group
                                    << " got " << report.count << " expected "
                                    << truth.size();
                                first_mismatch = msg.str();
                            }
                        }
                    }
                }
            }
        }
    }

    {
        std::ostringstream d;
        d << runs << " joins, " << mismatches << " mismatches";
        if (!first_mismatch.empty()) d << " (first: " << first_mismatch << ")";
        c1 = {mismatches == 0, d.str()};
    }
    {
        std::ostringstream d;
        d << chunks_audited << " chunks audited, " << layout_errors
          << " flag-size errors";
        c6 = {chunks_audited > 0 && layout_errors == 0, d.str()};
    }
    {
        std::ostringstream d;
        d << verified << " pairs verified, " << prunes << " early-exit prunes, "
          << violations << " comparison-budget violations";
        c7 = {violations == 0 && prunes >= 1, d.str()};
    }
}

Outcome criterion_formulas() {
    std::uint64_t checks = 0, failures = 0;
    bool worked_value =
        equivalent_overlap(jaccard(4, 5), 10, 10) == 9;
    for (auto f : {SimilarityFunction::Jaccard, SimilarityFunction::Cosine,
                   SimilarityFunction::Dice}) {
        for (std::uint64_t tn = 1; tn <= 20; ++tn) {
            SimilarityPredicate pred;
            pred.function = f;
            pred.threshold = {tn, 20};
            for (std::uint64_t r = 1; r <= 50; ++r) {
                for (std::uint64_t s = 1; s <= 50; ++s) {
                    std::uint64_t required = equivalent_overlap(pred, r, s);
                    for (std::uint64_t o = 0; o <= std::min(r, s); ++o) {
                        ++checks;
                        if (meets_threshold(pred, o, r, s) != (o >= required)) ++failures;
                    }
                }
            }
        }
    }
    std::ostringstream d;
    d << "worked value 0.8/10/10 -> "
      << equivalent_overlap(jaccard(4, 5), 10, 10) << ", " << checks
      << " consistency checks, " << failures << " failures";
    return {worked_value && failures == 0, d.str()};
}

Outcome criterion_intersect_path() {
    std::mt19937_64 rng(7);
    auto random_set = [&](std::size_t size, std::uint32_t universe) {
        std::set<TokenCode> s;
        while (s.size() < size) s.insert(rng() % universe);
        return std::vector<TokenCode>(s.begin(), s.end());
    };
    std::uint64_t pairs = 0, failures = 0;
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t size_r = rng() % 2001;
        std::size_t lo = size_r / 100;
        std::size_t hi = std::min<std::size_t>(2000, size_r ? size_r * 100 : 2000);
        std::size_t size_s = lo + rng() % (hi - lo + 1);
        std::uint32_t universe = 2001 + rng() % 8000;
        auto r = random_set(size_r, universe);
        auto s = random_set(size_s, universe);

        std::uint64_t sequential = 0;
        {
            std::size_t i = 0, j = 0;
            while (i < r.size() && j < s.size()) {
                if (r[i] == s[j]) ++sequential, ++i, ++j;
                else if (r[i] < s[j]) ++i;
                else ++j;
            }
        }

        ++pairs;
        const std::size_t total = r.size() + s.size();
        for (std::uint32_t B : {1u, 2u, 4u, 8u, 32u, 128u}) {
            auto parts = intersect_path_partitions(r, s, B);
            std::size_t spacing = (total + B - 1) / B;
            std::uint64_t sum = 0;
            std::size_t covered = 0;
            bool ok = parts.size() == B;
            for (std::uint32_t k = 0; k < parts.size(); ++k) {
                const auto& p = parts[k];
                ok = ok && p.hops <= spacing;
                ok = ok && p.start_r + p.start_s ==
                               std::min<std::size_t>(std::size_t{k} * spacing, total);
                sum += partition_count(r, s, p);
                covered += p.hops;
            }
            ok = ok && covered == total && sum == sequential;
            if (!ok) ++failures;
        }
    }
    std::ostringstream d;
    d << pairs << " pairs x 6 group sizes, " << failures << " failures";
    return {failures == 0, d.str()};
}

Outcome criterion_invariance() {
    SynthConfig cfg;
    cfg.sets = 5000;
    cfg.min_size = 1;
    cfg.max_size = 50;
    cfg.universe = 400;
    cfg.zipf_tokens = true;
    cfg.duplicate_fraction = 0.2;
    auto records = synth_collection(777, cfg);
    auto dict = Dictionary::build(records);
    auto collection = preprocess(records, dict);
    auto pred = jaccard(1, 2);

    std::vector<std::string> outputs;
    for (std::uint64_t budget : {std::uint64_t{64} << 10, std::uint64_t{1} << 20,
                                 kUnboundedBudget}) {
        for (unsigned workers : {1u, 4u, max_workers()}) {
            PipelineConfig config;
            config.mode = OutputMode::Pairs;
            config.chunk_budget = budget;
            config.workers = workers;
            auto report = run_join(collection, pred, config);
            std::ostringstream bytes;
            bytes << report.count << '\n';
            write_pairs(bytes, report.pairs);
            outputs.push_back(bytes.str());
        }
    }
    bool identical = std::all_of(outputs.begin(), outputs.end(),
                                 [&](const std::string& s) { return s == outputs[0]; });
    std::ostringstream d;
    d << outputs.size() << " runs, output " << outputs[0].size() << " bytes, "
      << (identical ? "all identical" : "DIVERGED");
    return {identical, d.str()};
}

Outcome criterion_overlap() {
    // Part 1: with >= 10 chunks, join wall time must not exceed filtering
    // + serialization plus one final chunk's verification, within 10%.
    SynthConfig cfg;
    cfg.sets = 4000;
    cfg.min_size = 10;
    cfg.max_size = 30;
    cfg.universe = 300;
    auto records = synth_collection(4242, cfg);
    auto dict = Dictionary::build(records);
    auto collection = preprocess(records, dict);
    auto pred = jaccard(1, 2);

    PipelineConfig config;
    config.mode = OutputMode::Count;
    config.chunk_budget = 64 << 10;
    config.strategy = {StrategyKind::B, 32};
    config.workers = max_workers();
    auto report = run_join(collection, pred, config);
    double last_chunk_ms =
        report.chunk_count ? report.timings.verification_ms / report.chunk_count : 0;
    double bound =
        1.1 * (report.timings.filtering_ms + report.timings.serialization_ms +
               last_chunk_ms);
    bool part1 = report.chunk_count >= 10 && report.timings.join_ms <= bound;

    auto verification_ms = [](const Collection& c, const SimilarityPredicate& p,
                              Strategy strategy) {
        PipelineConfig run;
        run.mode = OutputMode::Count;
        run.strategy = strategy;
        run.workers = max_workers();
        double best = -1;
        for (int rep = 0; rep < 3; ++rep) {
            double ms = run_join(c, p, run).timings.verification_ms;
            if (best < 0 || ms < best) best = ms;
        }
        return best;
    };

    // Part 2: qualitative strategy selection. Small sets: B no slower
    // than C. Large sets (avg >= 100 tokens): C at group size 128 no
    // slower than B.
    SynthConfig small;
    small.sets = 2000;
    small.min_size = 1;
    small.max_size = 10;
    small.universe = 60;
    auto small_records = synth_collection(99, small);
    auto small_dict = Dictionary::build(small_records);
    auto small_collection = preprocess(small_records, small_dict);
    double small_b = verification_ms(small_collection, jaccard(1, 2), {StrategyKind::B, 32});
    double small_c = verification_ms(small_collection, jaccard(1, 2), {StrategyKind::C, 32});
    bool part2_small = small_b <= small_c;

    SynthConfig large;
    large.sets = 800;
    large.min_size = 80;
    large.max_size = 120;
    large.universe = 400;
    auto large_records = synth_collection(100, large);
    auto large_dict = Dictionary::build(large_records);
    auto large_collection = preprocess(large_records, large_dict);
    double large_b = verification_ms(large_collection, jaccard(7, 10), {StrategyKind::B, 32});
    double large_c = verification_ms(large_collection, jaccard(7, 10), {StrategyKind::C, 128});
    bool part2_large = large_c <= large_b;

    std::ostringstream d;
    d.precision(3);
    d << std::fixed << "chunks=" << report.chunk_count << " join=" << report.timings.join_ms
      << "ms bound=" << bound << "ms [" << (part1 ? "ok" : "FAIL")
      << "]; small sets B=" << small_b << "ms C=" << small_c << "ms ["
      << (part2_small ? "ok" : "FAIL") << "]; large sets C128=" << large_c
      << "ms B=" << large_b << "ms [" << (part2_large ? "ok" : "FAIL") << "]";
    return {part1 && part2_small && part2_large, d.str()};
}

void print(int n, const char* name, const Outcome& o) {
    std::printf("criterion %d (%s): %s [%s]\n", n, name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
}

} // namespace

int main() {
    Outcome c1, c6, c7;
    auto c2 = criterion_formulas();
    auto c3 = criterion_intersect_path();
    run_oracle_sweep(c1, c6, c7);
    auto c4 = criterion_invariance();
    auto c5 = criterion_overlap();

    print(1, "oracle equivalence", c1);
    print(2, "equivalent-overlap formula suite", c2);
    print(3, "intersect-path equivalence", c3);
    print(4, "chunking/pipeline invariance", c4);
    print(5, "execution overlap + strategy selection", c5);
    print(6, "flag layout accounting", c6);
    print(7, "early termination", c7);

    int failed = 0;
    for (const auto* o : {&c1, &c2, &c3, &c4, &c5, &c6, &c7})
        if (!o->pass) ++failed;
    return failed;
}
