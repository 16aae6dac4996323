#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssjoin/collection.hpp"

namespace ssjoin {

/// One set per line, tokens separated by ASCII whitespace. Blank lines
/// are empty sets (kept here; dropped later by preprocessing).
inline std::vector<RawRecord> read_records(std::istream& in) {
    std::vector<RawRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        RawRecord rec;
        std::istringstream tokens(line);
        std::string tok;
        while (tokens >> tok) rec.tokens.push_back(std::move(tok));
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::vector<RawRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    return read_records(in);
}

} // namespace ssjoin
