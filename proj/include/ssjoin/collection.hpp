#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssjoin {

using TokenCode = std::uint32_t;
using SetIndex = std::uint32_t;

/// One input record: an ordered list of opaque string tokens, duplicates
/// allowed. Records are what the dictionary and the preprocessor consume.
struct RawRecord {
    std::vector<std::string> tokens;
};

/// Token -> integer code map. Codes are assigned in ascending global
/// frequency so that infrequent tokens sort first inside every set;
/// frequency ties break on lexicographic token order.
class Dictionary {
public:
    static Dictionary build(const std::vector<RawRecord>& records) {
        if (records.empty()) throw std::invalid_argument("empty collection");
        Dictionary d;
        for (const auto& rec : records)
            for (const auto& tok : rec.tokens)
                ++d.frequency_[tok];
        std::vector<const std::string*> order;
        order.reserve(d.frequency_.size());
        for (const auto& [tok, freq] : d.frequency_) order.push_back(&tok);
        std::sort(order.begin(), order.end(), [&](const std::string* a, const std::string* b) {
            auto fa = d.frequency_.at(*a), fb = d.frequency_.at(*b);
            if (fa != fb) return fa < fb;
            return *a < *b;
        });
        TokenCode code = 0;
        for (const std::string* tok : order) d.codes_[*tok] = code++;
        return d;
    }

    TokenCode code(const std::string& token) const {
        auto it = codes_.find(token);
        if (it == codes_.end()) throw std::out_of_range("token not in dictionary");
        return it->second;
    }

    bool contains(const std::string& token) const { return codes_.count(token) != 0; }

    std::uint64_t frequency(const std::string& token) const {
        auto it = frequency_.find(token);
        return it == frequency_.end() ? 0 : it->second;
    }

    std::size_t size() const { return codes_.size(); }

    /// Reverse lookup, linear table built on demand. Test/debug use.
    std::vector<std::string> decode_table() const {
        std::vector<std::string> table(codes_.size());
        for (const auto& [tok, code] : codes_) table[code] = tok;
        return table;
    }

private:
    std::map<std::string, TokenCode> codes_;
    std::map<std::string, std::uint64_t> frequency_;
};

/// Linearized token layout: all coded tokens in one flat array plus an
/// offsets array delimiting set boundaries (offsets.size() == sets + 1).
/// Sets are deduplicated, coded ascending, and ordered by (size, lex).
struct Collection {
    std::vector<TokenCode> tokens;
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> original_id; // input line number per set
    std::size_t dropped_empty = 0;

    std::size_t size() const { return offsets.size() - 1; }

    std::uint32_t set_size(SetIndex i) const { return offsets[i + 1] - offsets[i]; }

    std::span<const TokenCode> set_view(SetIndex i) const {
        if (i >= size()) throw std::out_of_range("set index out of range");
        return {tokens.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }

    std::size_t average_set_size() const {
        return size() ? tokens.size() / size() : 0;
    }
};

/// Dedup, code, sort each record, then order the sets by size and
/// lexicographically within equal sizes. Empty sets are dropped and
/// counted in Collection::dropped_empty.
inline Collection preprocess(const std::vector<RawRecord>& records, const Dictionary& dict) {
    std::vector<std::pair<std::vector<TokenCode>, std::uint32_t>> sets;
    sets.reserve(records.size());
    std::size_t dropped = 0;
    for (std::uint32_t line = 0; line < records.size(); ++line) {
        std::vector<TokenCode> coded;
        coded.reserve(records[line].tokens.size());
        for (const auto& tok : records[line].tokens) coded.push_back(dict.code(tok));
        std::sort(coded.begin(), coded.end());
        coded.erase(std::unique(coded.begin(), coded.end()), coded.end());
        if (coded.empty()) {
            ++dropped;
            continue;
        }
        sets.emplace_back(std::move(coded), line);
    }
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    Collection c;
    c.dropped_empty = dropped;
    c.original_id.reserve(sets.size());
    for (auto& [coded, line] : sets) {
        c.tokens.insert(c.tokens.end(), coded.begin(), coded.end());
        c.offsets.push_back(static_cast<std::uint32_t>(c.tokens.size()));
        c.original_id.push_back(line);
    }
    return c;
}

/// Pre-coded variant: tokens are decimal integers already frequency-coded,
/// so no dictionary pass is needed. Per-set dedup/sort and the global set
/// ordering still apply.
inline Collection preprocess_precoded(const std::vector<RawRecord>& records) {
    std::vector<std::pair<std::vector<TokenCode>, std::uint32_t>> sets;
    sets.reserve(records.size());
    std::size_t dropped = 0;
    for (std::uint32_t line = 0; line < records.size(); ++line) {
        std::vector<TokenCode> coded;
        coded.reserve(records[line].tokens.size());
        for (const auto& tok : records[line].tokens) {
            std::size_t pos = 0;
            unsigned long v = std::stoul(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument("not an integer token: " + tok);
            coded.push_back(static_cast<TokenCode>(v));
        }
        std::sort(coded.begin(), coded.end());
        coded.erase(std::unique(coded.begin(), coded.end()), coded.end());
        if (coded.empty()) {
            ++dropped;
            continue;
        }
        sets.emplace_back(std::move(coded), line);
    }
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    Collection c;
    c.dropped_empty = dropped;
    for (auto& [coded, line] : sets) {
        c.tokens.insert(c.tokens.end(), coded.begin(), coded.end());
        c.offsets.push_back(static_cast<std::uint32_t>(c.tokens.size()));
        c.original_id.push_back(line);
    }
    return c;
}

} // namespace ssjoin
