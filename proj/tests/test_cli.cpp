#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssjoin/report.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(SSJOIN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path write_dataset(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p);
    f << content;
    return p;
}

// a b c / a b c / a b d / (empty) / x
const char* kTinyData = "a b c\na b c\na b d\n\nx\n";

} // namespace

TEST_CASE("cli join count mode") {
    auto data = write_dataset("cli_tiny.txt", kTinyData);
    auto res = run_cli("join " + data.string() + " --threshold 0.5 --mode count");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("result:         3") != std::string::npos);
    CHECK(res.out.find("algorithm:      ppjoin") != std::string::npos);
}

TEST_CASE("cli join pairs mode lists normalized sorted line pairs") {
    auto data = write_dataset("cli_tiny.txt", kTinyData);
    auto res = run_cli("join " + data.string() +
                       " --threshold 0.5 --mode pairs --algorithm allpairs");
    CHECK(res.exit_code == 0);
    // The empty line 3 is dropped but line numbering stays original.
    auto pos = res.out.find("pairs:\n");
    REQUIRE(pos != std::string::npos);
    CHECK(res.out.substr(pos) == "pairs:\n1\t0\n2\t0\n2\t1\n");
}

TEST_CASE("cli json report") {
    auto data = write_dataset("cli_tiny.txt", kTinyData);
    auto res = run_cli("join " + data.string() +
                       " --threshold 0.5 --mode pairs --report json --algorithm groupjoin");
    REQUIRE(res.exit_code == 0);
    auto j = nlohmann::json::parse(res.out);
    CHECK(j["schema"] == 1);
    CHECK(j["algorithm"] == "groupjoin");
    CHECK(j["similarity"] == "jaccard");
    CHECK(j["threshold"] == "1/2");
    CHECK(j["result"] == 3);
    REQUIRE(j["pairs"].size() == 3);
    CHECK(j["pairs"][0] == nlohmann::json::array({1, 0}));
    CHECK(j["timings"].contains("verification_ms"));
}

TEST_CASE("cli csv report") {
    auto data = write_dataset("cli_tiny.txt", kTinyData);
    auto res = run_cli("join " + data.string() + " --threshold 0.5 --report csv");
    REQUIRE(res.exit_code == 0);
    std::istringstream lines(res.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == ssjoin::kCsvHeader);
    REQUIRE(std::getline(lines, row));
    CHECK(row.rfind("0.5,ppjoin,", 0) == 0);
    CHECK(row.substr(row.rfind(',') + 1) == "3");
}

TEST_CASE("cli precoded input and options") {
    auto data = write_dataset("cli_coded.txt", "3 5 9\n3 5 9\n1 2\n");
    auto res = run_cli("join " + data.string() +
                       " --precoded --threshold 0.9 --mode pairs --strategy b"
                       " --group-size 4 --chunk-budget 1K --workers 2");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("1\t0") != std::string::npos);
    CHECK(res.out.find("result:         1") != std::string::npos);
}

TEST_CASE("cli output file") {
    auto data = write_dataset("cli_tiny.txt", kTinyData);
    fs::path out = fs::temp_directory_path() / "cli_report.json";
    fs::remove(out);
    auto res = run_cli("join " + data.string() + " --threshold 0.5 --report json --output " +
                       out.string());
    CHECK(res.exit_code == 0);
    std::ifstream f(out);
    REQUIRE(f.good());
    auto j = nlohmann::json::parse(f);
    CHECK(j["result"] == 3);
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli("join").exit_code == 2);               // missing required arg
    CHECK(run_cli("join x --no-such-flag").exit_code == 2);
    CHECK(run_cli("join /no/such/file.txt").exit_code == 1);
    auto data = write_dataset("cli_tiny.txt", kTinyData);
    CHECK(run_cli("join " + data.string() + " --threshold nope").exit_code == 1);
    CHECK(run_cli("join " + data.string() + " --group-size 3").exit_code == 1);
    CHECK(run_cli("").exit_code == 2); // subcommand required
}

TEST_CASE("cli bench emits the fixed csv schema") {
    auto res = run_cli("bench --sizes 200 --thresholds 0.6,0.9 --max-size 10"
                       " --universe 60 --seed 9 --workers 1");
    REQUIRE(res.exit_code == 0);
    std::istringstream lines(res.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == ssjoin::kCsvHeader);
    std::getline(lines, line);
    CHECK(line == "# sets=200 seed=9");
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == 6); // 2 thresholds x 3 algorithms

    // Same seed, same counts: the result column must be reproducible.
    auto again = run_cli("bench --sizes 200 --thresholds 0.6,0.9 --max-size 10"
                         " --universe 60 --seed 9 --workers 1");
    auto results = [](const std::string& text) {
        std::vector<std::string> out;
        std::istringstream ss(text);
        std::string l;
        while (std::getline(ss, l))
            if (!l.empty() && l[0] != '#' && l.find("join_ms") == std::string::npos)
                out.push_back(l.substr(l.rfind(',')));
        return out;
    };
    CHECK(results(res.out) == results(again.out));
}
