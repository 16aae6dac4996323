#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssjoin/collection.hpp"

namespace ssjoin {

struct Posting {
    SetIndex set;
    std::uint32_t position; // token position inside the indexed set
};

/// Token -> postings list, built incrementally. For a self-join a set is
/// probed against the current contents before its own prefix is added, so
/// postings within a list carry non-decreasing set sizes.
class InvertedIndex {
public:
    explicit InvertedIndex(std::size_t universe) : lists_(universe) {}

    void add(TokenCode token, SetIndex set, std::uint32_t position) {
        lists_[token].push_back({set, position});
    }

    std::span<const Posting> postings(TokenCode token) const {
        if (token >= lists_.size()) return {};
        return lists_[token];
    }

private:
    std::vector<std::vector<Posting>> lists_;
};

} // namespace ssjoin
