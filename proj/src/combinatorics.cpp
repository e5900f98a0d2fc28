#include "mpcta/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace mpcta {

namespace {

// Psi^n_{r,j} for all r <= n, j <= r, grown one ball count at a time.
class PsiTable {
public:
    BigCount get(int n, int r, int j) {
        if (r > n || j > r) return 0;
        std::lock_guard lock(mutex_);
        grow(n);
        return slabs_[n][index(r, j)];
    }

private:
    static std::size_t index(int r, int j) { return static_cast<std::size_t>(r) * (r + 1) / 2 + j; }

    void grow(int n) {
        if (slabs_.empty()) slabs_.push_back({BigCount(1)});  // Psi^0_{0,0}
        while (static_cast<int>(slabs_.size()) <= n) {
            const int balls = static_cast<int>(slabs_.size());
            const auto& prev = slabs_.back();
            auto at_prev = [&](int r, int j) -> const BigCount* {
                if (r < 0 || j < 0 || r > balls - 1 || j > r) return nullptr;
                return &prev[index(r, j)];
            };
            std::vector<BigCount> slab(index(balls, balls) + 1);
            for (int r = 0; r <= balls; ++r) {
                for (int j = 0; j <= r; ++j) {
                    BigCount v = 0;
                    if (const auto* p = at_prev(r, j)) v += *p * j;
                    if (const auto* p = at_prev(r, j - 1)) v += *p * (r - j + 1);
                    if (const auto* p = at_prev(r - 1, j)) v += *p;
                    slab[index(r, j)] = std::move(v);
                }
            }
            slabs_.push_back(std::move(slab));
        }
    }

    std::mutex mutex_;
    std::vector<std::vector<BigCount>> slabs_;
};

PsiTable& psi_table() {
    static PsiTable table;
    return table;
}

class FactorialTable {
public:
    BigCount get(int n) {
        std::lock_guard lock(mutex_);
        if (values_.empty()) values_.push_back(1);
        while (static_cast<int>(values_.size()) <= n) {
            values_.push_back(values_.back() * static_cast<unsigned>(values_.size()));
        }
        return values_[n];
    }

private:
    std::mutex mutex_;
    std::vector<BigCount> values_;
};

void partitions_rec(int remaining, int parts_left, int min_part, std::vector<int>& prefix,
                    const std::function<void(std::span<const int>)>& visit) {
    if (parts_left == 0) {
        if (remaining == 0) visit(prefix);
        return;
    }
    // The smallest part caps the rest: min_part * parts_left <= remaining.
    for (int part = min_part; part * parts_left <= remaining; ++part) {
        if (parts_left == 1 && part != remaining) continue;
        prefix.push_back(part);
        partitions_rec(remaining - part, parts_left - 1, part, prefix, visit);
        prefix.pop_back();
    }
}

}  // namespace

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    std::sort(parts_.begin(), parts_.end());
    for (int p : parts_) {
        if (p < 2) throw std::domain_error("partition parts must be >= 2, got " + std::to_string(p));
        total_ += p;
    }
}

std::vector<std::pair<int, int>> Partition::multiplicities() const {
    std::vector<std::pair<int, int>> out;
    for (int p : parts_) {
        if (!out.empty() && out.back().first == p) {
            ++out.back().second;
        } else {
            out.emplace_back(p, 1);
        }
    }
    return out;
}

BigCount factorial(int n) {
    static FactorialTable table;
    if (n < 0) throw std::domain_error("factorial of a negative number");
    return table.get(n);
}

BigCount falling_factorial(std::uint64_t r, int b) {
    if (b < 0) throw std::domain_error("falling_factorial: negative length");
    if (static_cast<std::uint64_t>(b) > r) return 0;
    BigCount out = 1;
    for (int i = 0; i < b; ++i) out *= BigCount(r - static_cast<std::uint64_t>(i));
    return out;
}

BigCount binomial(std::uint64_t r, int b) {
    if (b < 0 || static_cast<std::uint64_t>(b) > r) return 0;
    return falling_factorial(r, b) / factorial(b);
}

BigCount psi(int n, int r, int j) {
    if (n < 1 || r < 1 || j < 0 || j > r) {
        throw std::domain_error("psi: need n >= 1, r >= 1, 0 <= j <= r (got n=" + std::to_string(n) +
                                ", r=" + std::to_string(r) + ", j=" + std::to_string(j) + ")");
    }
    if (r > n) return 0;
    return psi_table().get(n, r, j);
}

BigCount gamma_count(int n, int k, std::uint64_t r, int x) {
    if (n < 0 || k < 0 || k > n || x < 0) {
        throw std::domain_error("gamma_count: need 0 <= k <= n and x >= 0");
    }
    // x + n - k occupied bins: x collided, n - k singletons.
    const int occupied = x + n - k;
    if (k < 2 * x || (x == 0 && k != 0)) return 0;
    if (static_cast<std::uint64_t>(occupied) > r) return 0;
    if (n == 0) return 1;  // nothing to place, one (empty) arrangement
    return psi(n, occupied, x) * falling_factorial(r, occupied);
}

std::vector<Partition> enumerate_partitions(int k, int x) {
    std::vector<Partition> out;
    for_each_partition(k, x, [&](std::span<const int> parts) {
        out.emplace_back(std::vector<int>(parts.begin(), parts.end()));
    });
    return out;
}

void for_each_partition(int k, int x, const std::function<void(std::span<const int>)>& visit) {
    if (k < 0 || x < 0) throw std::domain_error("for_each_partition: negative argument");
    std::vector<int> prefix;
    prefix.reserve(static_cast<std::size_t>(x));
    if (x == 0) {
        if (k == 0) visit(prefix);
        return;
    }
    partitions_rec(k, x, 2, prefix, visit);
}

BigCount partition_count(const Partition& pi) {
    BigCount den = 1;
    for (int p : pi.parts()) den *= factorial(p);
    for (const auto& [value, mult] : pi.multiplicities()) den *= factorial(mult);
    return factorial(pi.total()) / den;
}

double partition_prob(const Partition& pi) {
    if (pi.size() == 0) throw std::domain_error("partition_prob: empty partition");
    const BigCount all = psi(pi.total(), pi.size(), pi.size());
    if (all == 0) throw std::domain_error("partition_prob: no partition of this shape exists");
    return ratio_to_double(partition_count(pi), all);
}

double mu(std::uint64_t alpha, int beta) {
    if (alpha < 1) throw std::domain_error("mu: alpha must be >= 1");
    if (beta < 0) throw std::domain_error("mu: beta must be >= 0");
    if (static_cast<std::uint64_t>(beta) > alpha) return 0.0;
    long double out = 1.0L;
    const auto a = static_cast<long double>(alpha);
    for (int i = 1; i < beta; ++i) out *= 1.0L - static_cast<long double>(i) / a;
    return static_cast<double>(out);
}

double ratio_to_double(const BigCount& num, const BigCount& den) {
    if (den <= 0) throw std::domain_error("ratio_to_double: non-positive denominator");
    if (num == 0) return 0.0;
    if (num < 0) return -ratio_to_double(-num, den);
    const long shift = 64 + static_cast<long>(boost::multiprecision::msb(den)) -
                       static_cast<long>(boost::multiprecision::msb(num));
    BigCount q = shift >= 0 ? BigCount(num << shift) / den : num / BigCount(den << -shift);
    return std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
}

}  // namespace mpcta
