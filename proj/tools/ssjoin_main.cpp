#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ssjoin/io.hpp"
#include "ssjoin/oracle.hpp"
#include "ssjoin/pipeline.hpp"
#include "ssjoin/report.hpp"

namespace {

using namespace ssjoin;

std::uint64_t parse_bytes(const std::string& text) {
    if (text == "inf" || text == "unlimited") return kUnboundedBudget;
    std::size_t pos = 0;
    std::uint64_t value = std::stoull(text, &pos);
    if (pos < text.size()) {
        switch (text[pos]) {
            case 'K': case 'k': value <<= 10; break;
            case 'M': case 'm': value <<= 20; break;
            case 'G': case 'g': value <<= 30; break;
            default: throw CLI::ValidationError("bad byte suffix: " + text);
        }
    }
    return value;
}

SimilarityPredicate make_predicate(const std::string& function, const std::string& threshold) {
    SimilarityPredicate pred;
    if (function == "jaccard") pred.function = SimilarityFunction::Jaccard;
    else if (function == "cosine") pred.function = SimilarityFunction::Cosine;
    else if (function == "dice") pred.function = SimilarityFunction::Dice;
    else if (function == "overlap") pred.function = SimilarityFunction::Overlap;
    else throw CLI::ValidationError("unknown similarity function: " + function);
    if (pred.function == SimilarityFunction::Overlap)
        pred.overlap_threshold = std::stoull(threshold);
    else
        pred.threshold = Threshold::parse(threshold);
    pred.validate();
    return pred;
}

Algorithm make_algorithm(const std::string& name) {
    if (name == "allpairs") return Algorithm::AllPairs;
    if (name == "ppjoin") return Algorithm::PPJoin;
    if (name == "groupjoin") return Algorithm::GroupJoin;
    throw CLI::ValidationError("unknown algorithm: " + name);
}

StrategyKind make_strategy(const std::string& name) {
    if (name == "a") return StrategyKind::A;
    if (name == "b") return StrategyKind::B;
    if (name == "c") return StrategyKind::C;
    if (name == "auto") return StrategyKind::Auto;
    throw CLI::ValidationError("unknown strategy: " + name);
}

unsigned default_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

struct JoinOptions {
    std::string input;
    std::string algorithm = "ppjoin";
    std::string similarity = "jaccard";
    std::string threshold = "0.8";
    std::string mode = "count";
    std::string strategy = "auto";
    std::uint32_t group_size = 32;
    std::string chunk_budget = "64M";
    unsigned workers = default_workers();
    std::string report_format = "text";
    std::string output;
    bool precoded = false;
};

int run_join_command(const JoinOptions& opt) {
    auto records = read_records(opt.input);
    Collection collection;
    if (opt.precoded) {
        collection = preprocess_precoded(records);
    } else {
        auto dict = Dictionary::build(records);
        collection = preprocess(records, dict);
    }
    if (collection.dropped_empty)
        std::cerr << "dropped " << collection.dropped_empty << " empty set(s)\n";

    PipelineConfig config;
    config.algorithm = make_algorithm(opt.algorithm);
    config.mode = opt.mode == "pairs" ? OutputMode::Pairs : OutputMode::Count;
    config.strategy = {make_strategy(opt.strategy), opt.group_size};
    config.chunk_budget = parse_bytes(opt.chunk_budget);
    config.workers = opt.workers;

    SimilarityPredicate pred = make_predicate(opt.similarity, opt.threshold);
    JoinReport report = run_join(collection, pred, config);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!opt.output.empty()) {
        file.open(opt.output);
        if (!file) throw std::runtime_error("cannot open output file: " + opt.output);
        out = &file;
    }
    ReportContext ctx{config.algorithm, pred, config.strategy, config.mode};
    if (opt.report_format == "json") {
        *out << json_report(ctx, report).dump(2) << '\n';
    } else if (opt.report_format == "csv") {
        *out << kCsvHeader << '\n';
        write_csv_row(*out, ctx, report);
    } else {
        write_text_report(*out, ctx, report);
        if (config.mode == OutputMode::Pairs) {
            *out << "pairs:\n";
            write_pairs(*out, report.pairs);
        }
    }
    return 0;
}

struct BenchOptions {
    std::string suite = "scaling";
    std::string sizes = "1k";
    std::string thresholds = "0.5:0.95:0.05";
    std::string similarity = "jaccard";
    std::string algorithms = "allpairs,ppjoin,groupjoin";
    std::string strategy = "auto";
    std::uint32_t group_size = 32;
    std::string chunk_budget = "64M";
    unsigned workers = default_workers();
    std::uint64_t seed = 42;
    std::uint32_t min_size = 1, max_size = 50;
    std::uint32_t universe = 10000;
    bool zipf = false;
    double duplicate_fraction = 0.0;
    std::string output;
};

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t mult = 1;
        if (!item.empty() && (item.back() == 'k' || item.back() == 'K')) {
            mult = 1000;
            item.pop_back();
        }
        sizes.push_back(std::stoull(item) * mult);
    }
    return sizes;
}

std::vector<std::string> parse_thresholds(const std::string& text) {
    // Either a comma list ("0.5,0.7") or an inclusive range "lo:hi:step".
    std::vector<std::string> out;
    if (text.find(':') == std::string::npos) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(item);
        return out;
    }
    std::stringstream ss(text);
    std::string lo_s, hi_s, step_s;
    std::getline(ss, lo_s, ':');
    std::getline(ss, hi_s, ':');
    std::getline(ss, step_s, ':');
    Threshold lo = Threshold::parse(lo_s), hi = Threshold::parse(hi_s),
              step = Threshold::parse(step_s);
    // Walk in exact rational steps to dodge float accumulation.
    std::uint64_t den = lo.den * hi.den * step.den;
    std::uint64_t lo_n = lo.num * (den / lo.den);
    std::uint64_t hi_n = hi.num * (den / hi.den);
    std::uint64_t step_n = step.num * (den / step.den);
    if (step_n == 0) throw CLI::ValidationError("zero threshold step");
    for (std::uint64_t n = lo_n; n <= hi_n; n += step_n) {
        Threshold t{n, den};
        t.reduce();
        out.push_back(std::to_string(t.num) + "/" + std::to_string(t.den));
    }
    return out;
}

int run_bench_command(const BenchOptions& opt) {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!opt.output.empty()) {
        file.open(opt.output);
        if (!file) throw std::runtime_error("cannot open output file: " + opt.output);
        out = &file;
    }

    auto thresholds = parse_thresholds(opt.thresholds);
    std::vector<Algorithm> algorithms;
    {
        std::stringstream ss(opt.algorithms);
        std::string item;
        while (std::getline(ss, item, ',')) algorithms.push_back(make_algorithm(item));
    }

    *out << kCsvHeader << '\n';
    for (std::size_t n : parse_sizes(opt.sizes)) {
        *out << "# sets=" << n << " seed=" << opt.seed << '\n';
        SynthConfig synth;
        synth.sets = n;
        synth.min_size = opt.min_size;
        synth.max_size = opt.max_size;
        synth.universe = opt.universe;
        synth.zipf_sizes = synth.zipf_tokens = opt.zipf;
        synth.duplicate_fraction = opt.duplicate_fraction;
        auto records = synth_collection(opt.seed, synth);
        auto dict = Dictionary::build(records);
        auto collection = preprocess(records, dict);

        for (const auto& thr : thresholds) {
            SimilarityPredicate pred = make_predicate(opt.similarity, thr);
            for (Algorithm algorithm : algorithms) {
                PipelineConfig config;
                config.algorithm = algorithm;
                config.mode = OutputMode::Count;
                config.strategy = {make_strategy(opt.strategy), opt.group_size};
                config.chunk_budget = parse_bytes(opt.chunk_budget);
                config.workers = opt.workers;
                JoinReport report = run_join(collection, pred, config);
                ReportContext ctx{algorithm, pred, config.strategy, config.mode};
                write_csv_row(*out, ctx, report);
            }
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact set similarity join engine"};
    app.require_subcommand(1);

    JoinOptions join_opt;
    auto* join = app.add_subcommand("join", "Run a self-join over an input dataset");
    join->add_option("input", join_opt.input, "dataset file, one set per line")->required();
    join->add_option("--algorithm", join_opt.algorithm, "allpairs|ppjoin|groupjoin");
    join->add_option("--similarity", join_opt.similarity, "jaccard|cosine|dice|overlap");
    join->add_option("--threshold", join_opt.threshold,
                     "normalized threshold (e.g. 0.8) or integer for overlap");
    join->add_option("--mode", join_opt.mode, "count|pairs");
    join->add_option("--strategy", join_opt.strategy, "a|b|c|auto");
    join->add_option("--group-size", join_opt.group_size, "worker group size B (power of 2)");
    join->add_option("--chunk-budget", join_opt.chunk_budget,
                     "candidate chunk budget M_c in bytes (suffix K/M/G, or 'inf')");
    join->add_option("--workers", join_opt.workers, "verification worker threads");
    join->add_option("--report", join_opt.report_format, "text|json|csv");
    join->add_option("--output", join_opt.output, "write report to file instead of stdout");
    join->add_flag("--precoded", join_opt.precoded,
                   "tokens are integers already frequency-coded");

    BenchOptions bench_opt;
    auto* bench = app.add_subcommand("bench", "Phase-timing benchmark over synthetic data");
    bench->add_option("--suite", bench_opt.suite, "suite name (scaling)");
    bench->add_option("--sizes", bench_opt.sizes, "comma list of set counts (suffix k)");
    bench->add_option("--thresholds", bench_opt.thresholds, "lo:hi:step or comma list");
    bench->add_option("--similarity", bench_opt.similarity, "jaccard|cosine|dice");
    bench->add_option("--algorithms", bench_opt.algorithms, "comma list");
    bench->add_option("--strategy", bench_opt.strategy, "a|b|c|auto");
    bench->add_option("--group-size", bench_opt.group_size, "worker group size B");
    bench->add_option("--chunk-budget", bench_opt.chunk_budget, "M_c bytes");
    bench->add_option("--workers", bench_opt.workers, "verification worker threads");
    bench->add_option("--seed", bench_opt.seed, "generator seed");
    bench->add_option("--min-size", bench_opt.min_size, "min set size");
    bench->add_option("--max-size", bench_opt.max_size, "max set size");
    bench->add_option("--universe", bench_opt.universe, "token universe size");
    bench->add_flag("--zipf", bench_opt.zipf, "Zipf sizes and token frequencies");
    bench->add_option("--duplicates", bench_opt.duplicate_fraction,
                      "fraction of duplicated sets (click-stream-like)");
    bench->add_option("--output", bench_opt.output, "write CSV to file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*join) return run_join_command(join_opt);
        if (*bench) return run_bench_command(bench_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
