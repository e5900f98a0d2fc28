#include "mpcta/access_delay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpcta {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

// P(H <= h) = (1 - 2^-h)^(n-1).
double success_by_level(int n, int h) {
    if (h <= 0) return 0.0;
    return std::exp(static_cast<double>(n - 1) * std::log1p(-std::ldexp(1.0, -h)));
}

double reach_probability(const Pmf& prev_collisions) {
    const double p = 1.0 - prev_collisions.at(0);
    if (!(p > 0.0)) throw std::domain_error("level is unreachable: no collisions at the previous level");
    return p;
}

}  // namespace

double success_level_prob(int n, int h) {
    if (n < 2) throw std::domain_error("success_level_prob: N >= 2 required");
    if (h < 1) return 0.0;
    return success_by_level(n, h) - success_by_level(n, h - 1);
}

Pmf success_level_pmf(int n) {
    if (n < 2) throw std::domain_error("success_level_pmf: N >= 2 required");
    Pmf out(1, {});
    for (int h = 1;; ++h) {
        out.weights.push_back(success_level_prob(n, h));
        if (1.0 - success_by_level(n, h) < kLevelTailCutoff) break;
    }
    return out;
}

Pmf level_nodes_from_collisions(const Pmf& prev_collisions) {
    const double reach = reach_probability(prev_collisions);
    Pmf out;
    for (int x = std::max(1, prev_collisions.min_value()); x <= prev_collisions.max_value(); ++x) {
        out.add(2 * x, prev_collisions.at(x) / reach);
        if (x < prev_collisions.max_value()) out.add(2 * x + 1, 0.0);
    }
    return out;
}

Pmf level_nodes_pmf(int n, int h) {
    if (h < 1) throw std::domain_error("level_nodes_pmf: level must be >= 1");
    return level_nodes_from_collisions(marginal_collisions(h - 1, n));
}

Pmf node_position_from_collisions(const Pmf& prev_collisions) {
    const double reach = reach_probability(prev_collisions);
    const int top = 2 * prev_collisions.max_value();
    std::vector<double> w(static_cast<std::size_t>(top), 0.0);
    for (int x = std::max(1, prev_collisions.min_value()); x <= prev_collisions.max_value(); ++x) {
        const double each = prev_collisions.at(x) / (2.0 * x * reach);
        for (int pos = 1; pos <= 2 * x; ++pos) w[static_cast<std::size_t>(pos - 1)] += each;
    }
    return Pmf(1, std::move(w));
}

Pmf node_position_pmf(int n, int h) {
    if (h < 1) throw std::domain_error("node_position_pmf: level must be >= 1");
    return node_position_from_collisions(marginal_collisions(h - 1, n));
}

double slot_position_given_level_size(int v, int l, int g) {
    if (l < 2 || l % 2 != 0) throw std::domain_error("slot_position_given_level_size: level size must be even and >= 2");
    if (g < 1) throw std::domain_error("slot_position_given_level_size: G >= 1 required");
    const int per_slot = 2 * g;
    const int slots = ceil_div(l, per_slot);
    if (v < 1 || v > slots) return 0.0;
    if (v < slots) return static_cast<double>(per_slot) / l;
    return static_cast<double>(l - per_slot * (slots - 1)) / l;
}

double mean_delay(const TreeConfig& cfg) {
    cfg.validate();
    const int n = cfg.n;
    const int g = cfg.g;
    int deepest = 1;
    while (1.0 - success_by_level(n, deepest) >= kLevelTailCutoff && deepest <= kMaxLevel) ++deepest;
    const LevelChainTable chain = build_level_chain(cfg, std::max(1, deepest - 1));

    double mean = success_level_prob(n, 1);
    for (int h = 2; h <= deepest; ++h) {
        const int prev = h - 1;
        const Pmf prev_collisions = marginal_collisions(prev, n);
        const double reach = chain.total(prev) - chain.collisions(prev).at(0);
        if (!(reach > 0.0)) break;
        // E[S_{h-1} | the tree reaches level h]
        double slots_before = 0.0;
        for (int x = 1; x <= chain.max_x(prev); ++x) {
            for (int s = 0; s <= chain.max_s(prev); ++s) slots_before += s * chain.at(prev, x, s);
        }
        slots_before /= reach;
        const Pmf position = node_position_from_collisions(prev_collisions);
        double slot_in_level = 0.0;
        for (int w = position.min_value(); w <= position.max_value(); ++w) slot_in_level += ceil_div(w, 2 * g) * position.at(w);
        mean += (slots_before + slot_in_level) * success_level_prob(n, h);
    }
    return mean;
}

double delay_upper_bound(int n, int g, int h) {
    if (h < 1) return 0.0;
    const auto capped = [](int cap, int k) { return k >= 30 ? cap : std::min(cap, 1 << k); };
    double bound = ceil_div(capped(n, h), 2 * g);
    for (int k = 0; k <= h - 2; ++k) bound += ceil_div(capped(n / 2, k), g);
    return bound;
}

std::vector<std::vector<double>> joint_slots_level(const LevelChainTable& chain, int h) {
    if (h < 1) throw std::domain_error("joint_slots_level: level must be >= 1");
    if (h - 1 > chain.levels()) throw std::domain_error("joint_slots_level: level beyond the chain's depth");
    const int g = chain.config().g;
    const int prev = h - 1;
    const int t_cap = ceil_div(chain.max_x(prev), g);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(t_cap) + 1,
                                         std::vector<double>(static_cast<std::size_t>(chain.max_s(prev)) + 1, 0.0));
    for (int x = 1; x <= chain.max_x(prev); ++x) {
        auto& row = out[static_cast<std::size_t>(ceil_div(x, g))];
        for (int s = 0; s <= chain.max_s(prev); ++s) row[static_cast<std::size_t>(s)] += chain.at(prev, x, s);
    }
    return out;
}

std::vector<std::vector<double>> joint_slots_level(const TreeConfig& cfg, int h) {
    return joint_slots_level(build_level_chain(cfg, std::max(1, h - 1)), h);
}

DelayDistribution delay_pmf(const LevelChainTable& chain) {
    const TreeConfig& cfg = chain.config();
    const int n = cfg.n;
    const int g = cfg.g;
    const int deepest = chain.levels() + 1;

    DelayDistribution out;
    out.levels = deepest;
    Pmf pmf;
    pmf.add(1, 0.0);
    for (int h = 1; h <= deepest; ++h) {
        const double p_h = success_level_prob(n, h);
        const Pmf prev = chain.collisions(h - 1);
        const double reach = reach_probability(prev);
        const auto joint = joint_slots_level(chain, h);
        const int t_cap = static_cast<int>(joint.size()) - 1;

        // P(V_h = v | T_h = t): the level size is drawn from the chain's own
        // X_{h-1} marginal restricted to the sizes that need t slots. With
        // G = 1 this reduces to 1/t.
        std::vector<std::vector<double>> position(static_cast<std::size_t>(t_cap) + 1);
        for (int t = 1; t <= t_cap; ++t) {
            auto& pv = position[static_cast<std::size_t>(t)];
            pv.assign(static_cast<std::size_t>(t) + 1, 0.0);
            double bucket = 0.0;
            for (int x = g * (t - 1) + 1; x <= std::min(g * t, prev.max_value()); ++x) bucket += prev.at(x);
            if (bucket <= 0.0) continue;
            for (int x = g * (t - 1) + 1; x <= std::min(g * t, prev.max_value()); ++x) {
                const double weight = prev.at(x) / bucket;
                if (weight == 0.0) continue;
                for (int v = 1; v <= t; ++v) pv[static_cast<std::size_t>(v)] += slot_position_given_level_size(v, 2 * x, g) * weight;
            }
        }

        for (int t = 1; t <= t_cap; ++t) {
            const auto& row = joint[static_cast<std::size_t>(t)];
            const auto& pv = position[static_cast<std::size_t>(t)];
            for (std::size_t s = 0; s < row.size(); ++s) {
                const double mass = row[s];
                if (mass == 0.0) continue;
                for (int v = 1; v <= t; ++v) {
                    const double pvv = pv[static_cast<std::size_t>(v)];
                    if (pvv != 0.0) pmf.add(static_cast<int>(s) + v, p_h * mass / reach * pvv);
                }
            }
        }
    }
    out.pmf = pmf;
    out.mean = pmf.mean();
    out.tail_mass = 1.0 - success_by_level(n, deepest);
    out.tail_bias = 0.0;
    for (int h = deepest + 1; h <= kMaxLevel + 1; ++h) out.tail_bias += success_level_prob(n, h) * delay_upper_bound(n, g, h);
    return out;
}

DelayDistribution delay_pmf(const TreeConfig& cfg, double epsilon) {
    cfg.validate();
    return delay_pmf(build_level_chain(cfg, select_truncation_level(cfg.n, epsilon)));
}

DelayDistribution single_channel_from_multichannel(const DelayDistribution& g1) {
    DelayDistribution out;
    Pmf pmf;
    for (int d = g1.pmf.min_value(); d <= g1.pmf.max_value(); ++d) {
        const double half = g1.pmf.at(d) / 2.0;
        pmf.add(2 * d - 1, half);
        pmf.add(2 * d, half);
    }
    out.pmf = pmf;
    out.mean = pmf.mean();
    out.tail_mass = g1.tail_mass;
    out.tail_bias = 2.0 * g1.tail_bias - 0.5 * g1.tail_mass;
    out.levels = g1.levels;
    return out;
}

DelayDistribution single_channel_delay_pmf(int n, double epsilon) {
    return single_channel_from_multichannel(delay_pmf(TreeConfig{n, 1}, epsilon));
}

}  // namespace mpcta
