#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ssjoin {

enum class SimilarityFunction { Jaccard, Cosine, Dice, Overlap };

inline const char* to_string(SimilarityFunction f) {
    switch (f) {
        case SimilarityFunction::Jaccard: return "jaccard";
        case SimilarityFunction::Cosine: return "cosine";
        case SimilarityFunction::Dice: return "dice";
        case SimilarityFunction::Overlap: return "overlap";
    }
    return "?";
}

/// Normalized threshold kept as an exact ratio num/den so that all
/// ceiling/floor computations and threshold comparisons avoid floating
/// point entirely. Cosine comparisons square both sides.
struct Threshold {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    static Threshold parse(const std::string& text) {
        // Accepts "0.8", ".85", "1", "1.0", or "4/5".
        if (text.empty()) throw std::invalid_argument("empty threshold");
        auto slash = text.find('/');
        std::uint64_t num = 0, den = 1;
        if (slash != std::string::npos) {
            num = std::stoull(text.substr(0, slash));
            den = std::stoull(text.substr(slash + 1));
        } else {
            auto dot = text.find('.');
            std::string digits = text.substr(0, dot);
            if (digits.empty()) digits = "0";
            num = std::stoull(digits);
            if (dot != std::string::npos) {
                for (std::size_t i = dot + 1; i < text.size(); ++i) {
                    char c = text[i];
                    if (c < '0' || c > '9') throw std::invalid_argument("bad threshold: " + text);
                    num = num * 10 + static_cast<std::uint64_t>(c - '0');
                    den *= 10;
                }
            }
        }
        if (den == 0) throw std::invalid_argument("bad threshold: " + text);
        Threshold t{num, den};
        t.reduce();
        return t;
    }

    void reduce() {
        std::uint64_t a = num, b = den;
        while (b) { auto r = a % b; a = b; b = r; }
        if (a > 1) { num /= a; den /= a; }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct SimilarityPredicate {
    SimilarityFunction function = SimilarityFunction::Jaccard;
    Threshold threshold;                 // normalized functions, in (0,1]
    std::uint64_t overlap_threshold = 1; // Overlap function only, t >= 1

    bool normalized() const { return function != SimilarityFunction::Overlap; }

    void validate() const {
        if (normalized()) {
            if (threshold.num == 0 || threshold.num > threshold.den)
                throw std::invalid_argument("normalized threshold must be in (0,1]");
        } else if (overlap_threshold < 1) {
            throw std::invalid_argument("overlap threshold must be >= 1");
        }
    }
};

namespace detail {

using u128 = unsigned __int128;

inline std::uint64_t ceil_div(u128 a, u128 b) {
    return static_cast<std::uint64_t>((a + b - 1) / b);
}

// Smallest k >= 0 with k^2 * den^2 >= num^2 * r * s, i.e. ceil(num*sqrt(r*s)/den).
inline std::uint64_t ceil_scaled_sqrt(std::uint64_t num, std::uint64_t den,
                                      std::uint64_t r, std::uint64_t s) {
    u128 rhs = static_cast<u128>(num) * num * r * s;
    if (rhs == 0) return 0;
    long double est = static_cast<long double>(num) / den *
                      sqrtl(static_cast<long double>(r) * static_cast<long double>(s));
    std::uint64_t k = est > 2.0L ? static_cast<std::uint64_t>(est) - 2 : 0;
    while (static_cast<u128>(k) * k * den * den < rhs) ++k;
    return k;
}

} // namespace detail

/// Minimum number of shared tokens implied by the predicate for sizes
/// (size_r, size_s).
inline std::uint64_t equivalent_overlap(const SimilarityPredicate& pred,
                                        std::uint64_t size_r, std::uint64_t size_s) {
    const auto num = pred.threshold.num;
    const auto den = pred.threshold.den;
    switch (pred.function) {
        case SimilarityFunction::Jaccard:
            return detail::ceil_div(static_cast<detail::u128>(num) * (size_r + size_s), den + num);
        case SimilarityFunction::Cosine:
            return detail::ceil_scaled_sqrt(num, den, size_r, size_s);
        case SimilarityFunction::Dice:
            return detail::ceil_div(static_cast<detail::u128>(num) * (size_r + size_s), 2 * den);
        case SimilarityFunction::Overlap:
            return pred.overlap_threshold;
    }
    return 0;
}

struct SizeBounds {
    std::uint64_t min = 0;
    std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    bool contains(std::uint64_t size) const { return size >= min && size <= max; }
};

/// Candidate-size interval outside of which no overlap value can reach the
/// threshold. The interval is function-specific: Jaccard uses
/// t*|r| <= |s| <= |r|/t; Cosine and Dice require the wider intervals
/// implied by their definitions.
inline SizeBounds size_bounds(const SimilarityPredicate& pred, std::uint64_t size_r) {
    using detail::u128;
    const auto num = pred.threshold.num;
    const auto den = pred.threshold.den;
    SizeBounds b;
    switch (pred.function) {
        case SimilarityFunction::Jaccard:
            b.min = detail::ceil_div(static_cast<u128>(num) * size_r, den);
            b.max = static_cast<std::uint64_t>(static_cast<u128>(den) * size_r / num);
            break;
        case SimilarityFunction::Cosine:
            // o/sqrt(rs) <= min(r,s)/sqrt(rs) = sqrt(s/r) for s <= r.
            b.min = detail::ceil_div(static_cast<u128>(num) * num * size_r,
                                     static_cast<u128>(den) * den);
            b.max = static_cast<std::uint64_t>(static_cast<u128>(den) * den * size_r /
                                               (static_cast<u128>(num) * num));
            break;
        case SimilarityFunction::Dice:
            // 2o/(r+s) <= 2s/(r+s) >= t  <=>  s >= t*r/(2-t).
            b.min = detail::ceil_div(static_cast<u128>(num) * size_r, 2 * den - num);
            b.max = static_cast<std::uint64_t>(
                static_cast<u128>(2 * den - num) * size_r / num);
            break;
        case SimilarityFunction::Overlap:
            b.min = pred.overlap_threshold;
            break;
    }
    if (b.min == 0) b.min = 1;
    return b;
}

/// Exact threshold test: score(overlap, size_r, size_s) >= threshold.
inline bool meets_threshold(const SimilarityPredicate& pred, std::uint64_t overlap,
                            std::uint64_t size_r, std::uint64_t size_s) {
    using detail::u128;
    const auto num = pred.threshold.num;
    const auto den = pred.threshold.den;
    switch (pred.function) {
        case SimilarityFunction::Jaccard:
            // o / (r + s - o) >= num/den
            return static_cast<u128>(overlap) * den >=
                   static_cast<u128>(num) * (size_r + size_s - overlap);
        case SimilarityFunction::Cosine:
            // o / sqrt(r*s) >= num/den, both sides squared
            return static_cast<u128>(overlap) * overlap * den * den >=
                   static_cast<u128>(num) * num * size_r * size_s;
        case SimilarityFunction::Dice:
            return static_cast<u128>(2) * overlap * den >=
                   static_cast<u128>(num) * (size_r + size_s);
        case SimilarityFunction::Overlap:
            return overlap >= pred.overlap_threshold;
    }
    return false;
}

/// Similarity score for reporting. Threshold decisions never go through
/// this; they use meets_threshold.
inline double similarity_score(const SimilarityPredicate& pred, std::uint64_t overlap,
                               std::uint64_t size_r, std::uint64_t size_s) {
    switch (pred.function) {
        case SimilarityFunction::Jaccard:
            return static_cast<double>(overlap) /
                   static_cast<double>(size_r + size_s - overlap);
        case SimilarityFunction::Cosine:
            return static_cast<double>(overlap) /
                   std::sqrt(static_cast<double>(size_r) * static_cast<double>(size_s));
        case SimilarityFunction::Dice:
            return 2.0 * static_cast<double>(overlap) /
                   static_cast<double>(size_r + size_s);
        case SimilarityFunction::Overlap:
            return static_cast<double>(overlap);
    }
    return 0.0;
}

} // namespace ssjoin
