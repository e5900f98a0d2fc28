#pragma once

#include <vector>

#include "mpcta/collision_model.hpp"
#include "mpcta/pmf.hpp"

namespace mpcta {

inline constexpr double kDefaultEpsilon = 0.999;

/// Probability that a tree of n contenders has finished by level m, i.e.
/// that all contenders sit in distinct nodes of level m.
double completion_probability(int n, int m);

/// Smallest M whose completion probability reaches epsilon.
int select_truncation_level(int n, double epsilon);

struct TruncationPolicy {
    double epsilon = kDefaultEpsilon;
    int m_max = 0;

    static TruncationPolicy for_tree(int n, double epsilon);
};

/// Joint law of (X_m, S_m) per level under the level-to-level Markov
/// approximation, with S_m the number of time slots spent in levels 1..m.
/// Level 1 always takes one slot. X_m = 0 is absorbing and keeps its S_m,
/// so at(m, 0, s) is the probability that the tree ended by level m with
/// S = s.
class LevelChainTable {
public:
    LevelChainTable(TreeConfig cfg, int levels);

    const TreeConfig& config() const { return cfg_; }
    int levels() const { return static_cast<int>(joint_.size()) - 1; }

    int max_x(int m) const;
    int max_s(int m) const;
    double at(int m, int x, int s) const;

    /// Marginal of X_m carried by the chain.
    Pmf collisions(int m) const;
    double total(int m) const;

private:
    friend LevelChainTable build_level_chain(const TreeConfig& cfg, int levels);

    // joint_[m][x][s]; level 0 is the root collision.
    TreeConfig cfg_;
    std::vector<std::vector<std::vector<double>>> joint_;
};

LevelChainTable build_level_chain(const TreeConfig& cfg, int levels);

struct TreeLengthResult {
    Pmf pmf;              ///< P(T = t) for trees finished within the analyzed levels
    double tail_mass = 0; ///< probability of trees still unfinished at the last level
    int levels = 0;
};

TreeLengthResult tree_length_pmf(const LevelChainTable& chain);
TreeLengthResult tree_length_pmf(const TreeConfig& cfg, double epsilon = kDefaultEpsilon);

struct MeanEstimate {
    double mean = 0;       ///< expectation over the truncated pmf
    double tail_mass = 0;
    /// Lower bound on the mass-weighted value missing from `mean`: every
    /// unfinished tree is longer than the last stored support point.
    double tail_bias = 0;
};

MeanEstimate tree_length_mean(const TreeConfig& cfg, double epsilon = kDefaultEpsilon);

}  // namespace mpcta
