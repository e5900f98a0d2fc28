#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mpcta {

/// Exact non-negative counts (arrangements of balls into bins).
using BigCount = boost::multiprecision::cpp_int;

/// A partition of `total()` collided contenders into collisions of size >= 2.
/// Parts are kept in non-decreasing order.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> parts);

    const std::vector<int>& parts() const { return parts_; }
    int total() const { return total_; }
    int size() const { return static_cast<int>(parts_.size()); }

    /// (value, multiplicity) pairs in increasing value order.
    std::vector<std::pair<int, int>> multiplicities() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<int> parts_;
    int total_ = 0;
};

BigCount factorial(int n);

/// r * (r-1) * ... * (r-b+1); zero when b > r.
BigCount falling_factorial(std::uint64_t r, int b);

BigCount binomial(std::uint64_t r, int b);

/// Number of ways to split n distinguishable balls into r non-empty unlabeled
/// groups such that exactly j of them hold two or more balls.
///
/// Memoized; safe to call from several threads. Throws std::domain_error for
/// n < 1, r < 1, j < 0 or j > r.
BigCount psi(int n, int r, int j);

/// Number of labeled-bin arrangements of n balls into r bins with exactly x
/// multi-ball bins that jointly hold k balls. Impossible combinations give 0.
BigCount gamma_count(int n, int k, std::uint64_t r, int x);

/// Canonical list of partitions of k into exactly x parts, every part >= 2.
/// Parts are non-decreasing; partitions come out in lexicographic order.
std::vector<Partition> enumerate_partitions(int k, int x);

/// Visits the same partitions as enumerate_partitions without materializing
/// the list. The span is only valid during the call.
void for_each_partition(int k, int x, const std::function<void(std::span<const int>)>& visit);

/// Number of ways k labeled balls realize the partition as unlabeled groups:
/// k! / (prod_j parts_j! * prod_a mult_a!).
BigCount partition_count(const Partition& pi);

/// Probability that a uniformly random arrangement of pi.total() collided
/// balls into pi.size() collisions has exactly the part sizes of pi.
double partition_prob(const Partition& pi);

/// Probability that `beta` balls thrown into `alpha` equiprobable bins land
/// in pairwise distinct bins (0 when alpha < beta).
double mu(std::uint64_t alpha, int beta);

/// Correctly scaled double approximation of num / den (den > 0).
double ratio_to_double(const BigCount& num, const BigCount& den);

}  // namespace mpcta
