#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpcta/access_delay.hpp"
#include "mpcta/pmf.hpp"

namespace mpcta {

/// Right-continuous step function over the distinct sample values.
struct EmpiricalCdf {
    std::vector<int> values;         ///< sorted distinct values
    std::vector<double> cumulative;  ///< F(values[i]); last entry is 1
    std::uint64_t count = 0;

    double operator()(int d) const;
};

/// Throws std::domain_error on empty input.
EmpiricalCdf empirical_cdf(std::span<const int> samples);
EmpiricalCdf empirical_cdf_from_histogram(const std::vector<std::uint64_t>& histogram);

struct KsConfig {
    int n = 0;
    int g = 0;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
    double epsilon = 0;
};

struct KsReport {
    double ks = 0;
    int argmax_d = 0;
    std::uint64_t samples = 0;
    double analytic_tail_mass = 0;
    KsConfig config;
};

/// max_d |F_emp(d) - F_analytic(d)| over every integer d in the union of both
/// supports. The analytic CDF stops at analytic.total(); its tail sits beyond
/// every finite d.
KsReport ks_statistic(const EmpiricalCdf& empirical, const Pmf& analytic);

/// Same statistic between two pmfs (both treated as possibly truncated).
double ks_distance(const Pmf& a, const Pmf& b);

/// Simulated delay samples vs the analytic delay pmf for one (n, g).
struct Comparison {
    KsReport report;
    DelayDistribution analytic;
    std::vector<std::uint64_t> empirical_histogram;
};

Comparison compare_delay(int n, int g, std::uint64_t runs, std::uint64_t seed, double epsilon, unsigned threads = 0);

/// Every (n, g) pair; each entry simulated from its own seed derived from
/// (seed, n, g). Results follow the order ns x gs.
std::vector<Comparison> sweep(const std::vector<int>& ns, const std::vector<int>& gs, std::uint64_t runs,
                              std::uint64_t seed, double epsilon, unsigned threads = 0);

std::uint64_t config_seed(std::uint64_t seed, int n, int g);

}  // namespace mpcta
