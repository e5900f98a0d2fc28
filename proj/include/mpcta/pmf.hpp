#pragma once

#include <vector>

namespace mpcta {

/// Finite distribution over consecutive integers starting at `offset`.
/// Complete distributions sum to 1; truncated ones report the deficit
/// separately (see DelayDistribution, TreeLengthResult).
struct Pmf {
    int offset = 0;
    std::vector<double> weights;

    Pmf() = default;
    Pmf(int offset_, std::vector<double> weights_) : offset(offset_), weights(std::move(weights_)) {}

    static Pmf point(int value) { return Pmf(value, {1.0}); }

    bool empty() const { return weights.empty(); }
    int min_value() const { return offset; }
    int max_value() const { return offset + static_cast<int>(weights.size()) - 1; }

    double at(int value) const;
    /// Accumulates `mass` at `value`, growing the support as needed.
    void add(int value, double mass);

    double total() const;
    double mean() const;
    /// P(X <= value).
    double cdf(int value) const;
    /// Smallest value v with P(X <= v) >= q; max_value() + 1 when the
    /// stored mass never reaches q.
    int quantile(double q) const;

    /// Drops leading and trailing zero weights.
    Pmf trimmed() const;
};

Pmf convolve(const Pmf& a, const Pmf& b);

}  // namespace mpcta
