#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "fracrep/errors.hpp"
#include "fracrep/specfun.hpp"

namespace fracrep {

/// A weak composition (i_1, ..., i_k) of n: non-negative parts summing to n.
struct Composition {
    std::vector<int> parts;
    int n = 0;

    [[nodiscard]] int k() const noexcept { return static_cast<int>(parts.size()); }
    friend bool operator==(const Composition&, const Composition&) = default;
};

inline constexpr std::uint64_t kMaxCompositions = 10'000'000;

/// C(n + k - 1, k - 1), saturating at UINT64_MAX.
[[nodiscard]] inline std::uint64_t count_compositions(int n, int k) {
    if (n < 0 || k < 1) {
        throw Error(ErrorCode::InvalidArgument, "compositions need n >= 0 and k >= 1");
    }
    // C(n + k - 1, r) with r = min(k - 1, n), built up exactly.
    const auto top = static_cast<std::uint64_t>(n + k - 1);
    const auto r = static_cast<std::uint64_t>(std::min(k - 1, n));
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        const std::uint64_t num = top - r + i;
        const std::uint64_t g = std::gcd(c, i);
        const std::uint64_t reduced = c / g;
        const std::uint64_t div = i / g;
        if (reduced > UINT64_MAX / num) {
            return UINT64_MAX;
        }
        c = reduced * num / div;
    }
    return c;
}

/// Streams every weak composition of n into k parts in lexicographic order,
/// from (0, ..., 0, n) to (n, 0, ..., 0), holding only the current one.
class CompositionStream {
public:
    CompositionStream(int n, int k) {
        if (count_compositions(n, k) > kMaxCompositions) {
            throw Error(ErrorCode::SizeOverflow,
                        "C(" + std::to_string(n + k - 1) + ", " + std::to_string(k - 1) +
                            ") compositions exceed the limit of " +
                            std::to_string(kMaxCompositions));
        }
        current_.parts.assign(static_cast<std::size_t>(k), 0);
        current_.parts.back() = n;
        current_.n = n;
    }

    /// Writes the next composition into out; false once exhausted.
    bool next(Composition& out) {
        if (done_) {
            return false;
        }
        out = current_;
        advance();
        return true;
    }

private:
    void advance() {
        auto& p = current_.parts;
        const auto k = p.size();
        // Rightmost nonzero part beyond the first one.
        std::size_t j = k;
        for (std::size_t q = k; q-- > 1;) {
            if (p[q] > 0) {
                j = q;
                break;
            }
        }
        if (j == k) {
            done_ = true;
            return;
        }
        const int mass = p[j];
        p[j] = 0;
        p[j - 1] += 1;
        p[k - 1] = mass - 1;
    }

    Composition current_;
    bool done_ = false;
};

/// All weak compositions of n into k parts, materialized.
[[nodiscard]] inline std::vector<Composition> enumerate_compositions(int n, int k) {
    std::vector<Composition> out;
    CompositionStream stream(n, k);
    Composition c;
    while (stream.next(c)) {
        out.push_back(c);
    }
    return out;
}

/// Bracketed coefficient of the k-fold composition sum for S_k:
///
///   (-b-n)! (-2b-s_1)! ... (-kb-s_{k-1})!          n!
///   -------------------------------------------  * -------------
///   (-b-s_1)! (-2b-s_2)! ... (-(k-1)b-s_{k-1})! (-kb-n)!   i_1! ... i_k!
///
/// with partial sums s_j = i_1 + ... + i_j. Factorials whose arguments differ
/// by an integer are paired into finite products, so the value stays finite
/// for integer beta where individual factorials are poles.
[[nodiscard]] inline double sk_coefficient(double beta, const Composition& comp) {
    if (!(beta > 0.0)) {
        throw Error(ErrorCode::InvalidOrder, "sk_coefficient needs beta > 0");
    }
    const int k = comp.k();
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "sk_coefficient needs at least one part");
    }
    int sum = 0;
    double multinomial = 1.0;
    for (int part : comp.parts) {
        if (part < 0) {
            throw Error(ErrorCode::InvalidArgument, "composition parts must be non-negative");
        }
        // Running n!/(i_1! ... i_j!) as a product of binomials.
        for (int q = 1; q <= part; ++q) {
            multinomial *= static_cast<double>(sum + q) / q;
        }
        sum += part;
    }
    if (sum != comp.n) {
        throw Error(ErrorCode::InvalidArgument, "composition parts do not sum to n");
    }
    if (k == 1) {
        return 1.0;
    }
    const int n = comp.n;
    int s_prev = comp.parts[0];  // s_1
    // (-b-n)!/(-b-s_1)! = Gamma(1-b-n)/Gamma(1-b-s_1)
    double value = 1.0 / gamma_ratio_shift(1.0 - beta - s_prev, n - s_prev);
    for (int j = 2; j <= k - 1; ++j) {
        const int part = comp.parts[static_cast<std::size_t>(j - 1)];
        // (-jb-s_{j-1})!/(-jb-s_j)!
        value *= gamma_ratio_shift(1.0 - j * beta - s_prev, part);
        s_prev += part;
    }
    // (-kb-s_{k-1})!/(-kb-n)!
    value *= gamma_ratio_shift(1.0 - k * beta - s_prev, n - s_prev);
    return value * multinomial;
}

}  // namespace fracrep
