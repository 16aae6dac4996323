#pragma once

#include <algorithm>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ssjoin/pipeline.hpp"
#include "ssjoin/similarity.hpp"

namespace ssjoin {

inline const char* to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::A: return "a";
        case StrategyKind::B: return "b";
        case StrategyKind::C: return "c";
        case StrategyKind::Auto: return "auto";
    }
    return "?";
}

struct ReportContext {
    Algorithm algorithm;
    SimilarityPredicate pred;
    Strategy strategy; // as configured; report also carries the resolved one
    OutputMode mode;
};

inline std::string threshold_string(const SimilarityPredicate& pred) {
    if (!pred.normalized()) return std::to_string(pred.overlap_threshold);
    return std::to_string(pred.threshold.num) + "/" + std::to_string(pred.threshold.den);
}

/// Deterministic pairs listing: r_id TAB s_id, r_id > s_id, 0-based input
/// line numbers, sorted. Timings never appear here so output bytes are
/// reproducible run to run.
inline void write_pairs(std::ostream& out, std::vector<ResultPair> pairs) {
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [r, s] : pairs) out << r << '\t' << s << '\n';
}

inline void write_text_report(std::ostream& out, const ReportContext& ctx,
                              const JoinReport& report) {
    out << "algorithm:      " << to_string(ctx.algorithm) << '\n'
        << "similarity:     " << to_string(ctx.pred.function) << '\n'
        << "threshold:      " << threshold_string(ctx.pred) << '\n'
        << "strategy:       " << to_string(report.resolved_strategy.kind) << " (B="
        << report.resolved_strategy.group_size << ")\n"
        << "result:         " << report.count << '\n'
        << "candidates:     " << report.candidate_count << '\n'
        << "chunks:         " << report.chunk_count << '\n'
        << "join_ms:        " << report.timings.join_ms << '\n'
        << "filtering_ms:   " << report.timings.filtering_ms << '\n'
        << "serialization_ms: " << report.timings.serialization_ms << '\n'
        << "verification_ms:  " << report.timings.verification_ms << '\n';
}

inline nlohmann::json json_report(const ReportContext& ctx, const JoinReport& report) {
    nlohmann::json j{
        {"schema", 1},
        {"algorithm", to_string(ctx.algorithm)},
        {"similarity", to_string(ctx.pred.function)},
        {"threshold", threshold_string(ctx.pred)},
        {"strategy", to_string(report.resolved_strategy.kind)},
        {"group_size", report.resolved_strategy.group_size},
        {"mode", ctx.mode == OutputMode::Pairs ? "pairs" : "count"},
        {"result", report.count},
        {"candidates", report.candidate_count},
        {"chunks", report.chunk_count},
        {"timings",
         {{"join_ms", report.timings.join_ms},
          {"filtering_ms", report.timings.filtering_ms},
          {"serialization_ms", report.timings.serialization_ms},
          {"verification_ms", report.timings.verification_ms}}},
    };
    if (ctx.mode == OutputMode::Pairs) {
        auto pairs = report.pairs;
        std::sort(pairs.begin(), pairs.end());
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [r, s] : pairs) arr.push_back({r, s});
        j["pairs"] = std::move(arr);
    }
    return j;
}

inline constexpr const char* kCsvHeader =
    "threshold,algorithm,strategy,join_ms,filtering_ms,serialization_ms,"
    "verification_ms,candidates,chunks,result";

inline void write_csv_row(std::ostream& out, const ReportContext& ctx,
                          const JoinReport& report) {
    double thr = ctx.pred.normalized() ? ctx.pred.threshold.value()
                                       : static_cast<double>(ctx.pred.overlap_threshold);
    out << thr << ',' << to_string(ctx.algorithm) << ','
        << to_string(report.resolved_strategy.kind) << ',' << report.timings.join_ms << ','
        << report.timings.filtering_ms << ',' << report.timings.serialization_ms << ','
        << report.timings.verification_ms << ',' << report.candidate_count << ','
        << report.chunk_count << ',' << report.count << '\n';
}

} // namespace ssjoin
