#include "mpcta/pmf.hpp"

#include <numeric>

namespace mpcta {

double Pmf::at(int value) const {
    if (weights.empty() || value < offset || value > max_value()) return 0.0;
    return weights[static_cast<std::size_t>(value - offset)];
}

void Pmf::add(int value, double mass) {
    if (weights.empty()) {
        offset = value;
        weights.assign(1, mass);
        return;
    }
    if (value < offset) {
        weights.insert(weights.begin(), static_cast<std::size_t>(offset - value), 0.0);
        offset = value;
    } else if (value > max_value()) {
        weights.resize(static_cast<std::size_t>(value - offset + 1), 0.0);
    }
    weights[static_cast<std::size_t>(value - offset)] += mass;
}

double Pmf::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double Pmf::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += (offset + static_cast<double>(i)) * weights[i];
    return s;
}

double Pmf::cdf(int value) const {
    if (weights.empty() || value < offset) return 0.0;
    double s = 0.0;
    const int last = value > max_value() ? max_value() : value;
    for (int v = offset; v <= last; ++v) s += weights[static_cast<std::size_t>(v - offset)];
    return s;
}

int Pmf::quantile(double q) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        s += weights[i];
        if (s >= q) return offset + static_cast<int>(i);
    }
    return max_value() + 1;
}

Pmf Pmf::trimmed() const {
    std::size_t lo = 0;
    std::size_t hi = weights.size();
    while (lo < hi && weights[lo] == 0.0) ++lo;
    while (hi > lo && weights[hi - 1] == 0.0) --hi;
    if (lo == hi) return {};
    return Pmf(offset + static_cast<int>(lo), std::vector<double>(weights.begin() + lo, weights.begin() + hi));
}

Pmf convolve(const Pmf& a, const Pmf& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.weights.size() + b.weights.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
        if (a.weights[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.weights.size(); ++j) out[i + j] += a.weights[i] * b.weights[j];
    }
    return Pmf(a.offset + b.offset, std::move(out));
}

}  // namespace mpcta
