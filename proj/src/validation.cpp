#include "mpcta/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mpcta/simulator.hpp"

namespace mpcta {

double EmpiricalCdf::operator()(int d) const {
    const auto it = std::upper_bound(values.begin(), values.end(), d);
    if (it == values.begin()) return 0.0;
    return cumulative[static_cast<std::size_t>(it - values.begin()) - 1];
}

EmpiricalCdf empirical_cdf(std::span<const int> samples) {
    if (samples.empty()) throw std::domain_error("empirical_cdf: no samples");
    std::vector<int> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    EmpiricalCdf out;
    out.count = sorted.size();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        out.values.push_back(sorted[i]);
        out.cumulative.push_back(static_cast<double>(i + 1) / static_cast<double>(sorted.size()));
    }
    return out;
}

EmpiricalCdf empirical_cdf_from_histogram(const std::vector<std::uint64_t>& histogram) {
    EmpiricalCdf out;
    std::uint64_t total = 0;
    for (auto c : histogram) total += c;
    if (total == 0) throw std::domain_error("empirical_cdf: no samples");
    out.count = total;
    std::uint64_t running = 0;
    for (std::size_t v = 0; v < histogram.size(); ++v) {
        if (histogram[v] == 0) continue;
        running += histogram[v];
        out.values.push_back(static_cast<int>(v));
        out.cumulative.push_back(static_cast<double>(running) / static_cast<double>(total));
    }
    return out;
}

KsReport ks_statistic(const EmpiricalCdf& empirical, const Pmf& analytic) {
    KsReport report;
    report.samples = empirical.count;
    report.analytic_tail_mass = std::max(0.0, 1.0 - analytic.total());
    int lo = empirical.values.empty() ? analytic.min_value() : empirical.values.front();
    int hi = empirical.values.empty() ? analytic.max_value() : empirical.values.back();
    if (!analytic.empty()) {
        lo = std::min(lo, analytic.min_value());
        hi = std::max(hi, analytic.max_value());
    }
    report.argmax_d = lo;
    double f_analytic = analytic.cdf(lo - 1);
    for (int d = lo; d <= hi; ++d) {
        f_analytic += analytic.at(d);
        const double diff = std::abs(empirical(d) - f_analytic);
        if (diff > report.ks) {
            report.ks = diff;
            report.argmax_d = d;
        }
    }
    return report;
}

double ks_distance(const Pmf& a, const Pmf& b) {
    if (a.empty() && b.empty()) return 0.0;
    const int lo = a.empty() ? b.min_value() : (b.empty() ? a.min_value() : std::min(a.min_value(), b.min_value()));
    const int hi = a.empty() ? b.max_value() : (b.empty() ? a.max_value() : std::max(a.max_value(), b.max_value()));
    double fa = 0.0;
    double fb = 0.0;
    double ks = 0.0;
    for (int d = lo; d <= hi; ++d) {
        fa += a.at(d);
        fb += b.at(d);
        ks = std::max(ks, std::abs(fa - fb));
    }
    return ks;
}

std::uint64_t config_seed(std::uint64_t seed, int n, int g) {
    std::uint64_t z = seed ^ (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(g) ^ 0x6A09E667F3BCC909ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Comparison compare_delay(int n, int g, std::uint64_t runs, std::uint64_t seed, double epsilon, unsigned threads) {
    Comparison out;
    out.analytic = delay_pmf(TreeConfig{n, g}, epsilon);

    SimConfig sim;
    sim.n = n;
    sim.g = g;
    sim.runs = runs;
    sim.seed = seed;
    sim.threads = threads;
    const auto result = run_replications(sim);
    out.empirical_histogram = result.aggregates.delay;

    out.report = ks_statistic(empirical_cdf_from_histogram(out.empirical_histogram), out.analytic.pmf);
    out.report.analytic_tail_mass = out.analytic.tail_mass;
    out.report.config = KsConfig{n, g, runs, seed, epsilon};
    return out;
}

std::vector<Comparison> sweep(const std::vector<int>& ns, const std::vector<int>& gs, std::uint64_t runs,
                              std::uint64_t seed, double epsilon, unsigned threads) {
    if (ns.empty() || gs.empty()) throw std::invalid_argument("sweep needs at least one N and one G");
    std::vector<std::pair<int, int>> jobs;
    for (int n : ns) {
        for (int g : gs) jobs.emplace_back(n, g);
    }
    std::vector<Comparison> out(jobs.size());
    const unsigned hw = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, jobs.size()));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::size_t i = next++; i < jobs.size(); i = next++) {
                const auto [n, g] = jobs[i];
                out[i] = compare_delay(n, g, runs, config_seed(seed, n, g), epsilon, 1);
                out[i].report.config.seed = seed;
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace mpcta
