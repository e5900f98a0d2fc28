#include "mpcta/tree_length.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpcta {

namespace {

int slots_for(int collisions, int g) { return (collisions + g - 1) / g; }

}  // namespace

double completion_probability(int n, int m) {
    if (n < 0 || m < 0) throw std::domain_error("completion_probability: negative argument");
    const long double bins = std::ldexp(1.0L, m);
    if (static_cast<long double>(n) > bins) return 0.0;
    long double out = 1.0L;
    for (int i = 1; i < n; ++i) out *= 1.0L - static_cast<long double>(i) / bins;
    return static_cast<double>(out);
}

int select_truncation_level(int n, double epsilon) {
    if (n < 2) throw std::domain_error("select_truncation_level: N >= 2 required");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("select_truncation_level: epsilon must lie in (0, 1)");
    for (int m = 1;; ++m) {
        if (completion_probability(n, m) >= epsilon) return m;
        if (m > 4096) throw std::domain_error("select_truncation_level: epsilon too close to 1");
    }
}

TruncationPolicy TruncationPolicy::for_tree(int n, double epsilon) {
    return TruncationPolicy{epsilon, select_truncation_level(n, epsilon)};
}

LevelChainTable::LevelChainTable(TreeConfig cfg, int levels) : cfg_(cfg) {
    cfg_.validate();
    if (levels < 1) throw std::domain_error("level chain needs at least one level");
    if (levels > kMaxLevel) {
        throw std::domain_error("level chain deeper than " + std::to_string(kMaxLevel) + " levels requested");
    }
    joint_.resize(static_cast<std::size_t>(levels) + 1);
}

int LevelChainTable::max_x(int m) const {
    return static_cast<int>(joint_.at(static_cast<std::size_t>(m)).size()) - 1;
}

int LevelChainTable::max_s(int m) const {
    const auto& level = joint_.at(static_cast<std::size_t>(m));
    return level.empty() ? -1 : static_cast<int>(level.front().size()) - 1;
}

double LevelChainTable::at(int m, int x, int s) const {
    if (m < 0 || m > levels()) return 0.0;
    const auto& level = joint_[static_cast<std::size_t>(m)];
    if (x < 0 || x >= static_cast<int>(level.size())) return 0.0;
    const auto& row = level[static_cast<std::size_t>(x)];
    if (s < 0 || s >= static_cast<int>(row.size())) return 0.0;
    return row[static_cast<std::size_t>(s)];
}

Pmf LevelChainTable::collisions(int m) const {
    const auto& level = joint_.at(static_cast<std::size_t>(m));
    std::vector<double> w(level.size(), 0.0);
    for (std::size_t x = 0; x < level.size(); ++x) {
        for (double v : level[x]) w[x] += v;
    }
    return Pmf(0, std::move(w));
}

double LevelChainTable::total(int m) const { return collisions(m).total(); }

LevelChainTable build_level_chain(const TreeConfig& cfg, int levels) {
    LevelChainTable table(cfg, levels);
    const int n = cfg.n;
    const int g = cfg.g;
    auto& joint = table.joint_;

    // Level 0: the root always collides and precedes every counted slot.
    joint[0].assign(2, std::vector<double>(1, 0.0));
    joint[0][1][0] = 1.0;

    int s_cap = 0;
    for (int m = 1; m <= levels; ++m) {
        const auto& prev = joint[static_cast<std::size_t>(m - 1)];
        const int prev_x_cap = static_cast<int>(prev.size()) - 1;
        const int x_cap = max_collisions(m, n);
        s_cap += slots_for(prev_x_cap, g);

        const auto transition = collision_transition_matrix(m, n);
        auto& next = joint[static_cast<std::size_t>(m)];
        next.assign(static_cast<std::size_t>(x_cap) + 1, std::vector<double>(static_cast<std::size_t>(s_cap) + 1, 0.0));

        for (std::size_t s = 0; s < prev[0].size(); ++s) next[0][s] += prev[0][s];
        for (int x = 1; x <= prev_x_cap; ++x) {
            const auto& row = transition[static_cast<std::size_t>(x)];
            const int step = slots_for(x, g);
            const auto& from = prev[static_cast<std::size_t>(x)];
            for (std::size_t s = 0; s < from.size(); ++s) {
                const double mass = from[s];
                if (mass == 0.0) continue;
                const std::size_t to_s = s + static_cast<std::size_t>(step);
                for (int x_next = 0; x_next <= x_cap; ++x_next) {
                    const double p = row[static_cast<std::size_t>(x_next)];
                    if (p != 0.0) next[static_cast<std::size_t>(x_next)][to_s] += mass * p;
                }
            }
        }
    }
    return table;
}

TreeLengthResult tree_length_pmf(const LevelChainTable& chain) {
    const int last = chain.levels();
    TreeLengthResult out;
    out.levels = last;
    // T = 1 + S_m for the first level m without collisions.
    std::vector<double> w(static_cast<std::size_t>(chain.max_s(last)) + 2, 0.0);
    for (int s = 0; s <= chain.max_s(last); ++s) w[static_cast<std::size_t>(s) + 1] = chain.at(last, 0, s);
    out.pmf = Pmf(0, std::move(w)).trimmed();
    double unfinished = 0.0;
    for (int x = 1; x <= chain.max_x(last); ++x) {
        for (int s = 0; s <= chain.max_s(last); ++s) unfinished += chain.at(last, x, s);
    }
    out.tail_mass = unfinished;
    return out;
}

TreeLengthResult tree_length_pmf(const TreeConfig& cfg, double epsilon) {
    cfg.validate();
    return tree_length_pmf(build_level_chain(cfg, select_truncation_level(cfg.n, epsilon)));
}

MeanEstimate tree_length_mean(const TreeConfig& cfg, double epsilon) {
    cfg.validate();
    const auto chain = build_level_chain(cfg, select_truncation_level(cfg.n, epsilon));
    const auto result = tree_length_pmf(chain);
    MeanEstimate out;
    out.mean = result.pmf.mean();
    out.tail_mass = result.tail_mass;
    const int last = chain.levels();
    for (int x = 1; x <= chain.max_x(last); ++x) {
        for (int s = 0; s <= chain.max_s(last); ++s) {
            // An unfinished tree still needs the next level's slots.
            out.tail_bias += chain.at(last, x, s) * (1 + s + slots_for(x, cfg.g));
        }
    }
    return out;
}

}  // namespace mpcta
