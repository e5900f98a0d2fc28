#pragma once

#include <vector>

#include "mpcta/collision_model.hpp"
#include "mpcta/pmf.hpp"
#include "mpcta/tree_length.hpp"

namespace mpcta {

/// Residual success-level mass below which infinite sums over h stop.
inline constexpr double kLevelTailCutoff = 1e-12;

/// Access delay of a tagged contender, in time slots after the root slot.
struct DelayDistribution {
    Pmf pmf;
    double mean = 0;       ///< sum of d * pmf(d) over the stored support
    double tail_mass = 0;  ///< probability of success below the analyzed levels
    /// Upper bound on the mean contribution of the levels beyond the
    /// analyzed ones, from the largest delay possible at each such level.
    double tail_bias = 0;
    int levels = 0;        ///< deepest success level included
};

/// P(H = h): the tagged contender transmits alone for the first time at level h.
double success_level_prob(int n, int h);

/// Success-level pmf over h >= 1, cut once the residual mass drops below
/// kLevelTailCutoff.
Pmf success_level_pmf(int n);

/// Nodes at level h (even support) given the tree reaches level h, derived
/// from a marginal of X_{h-1}.
Pmf level_nodes_from_collisions(const Pmf& prev_collisions);
Pmf level_nodes_pmf(int n, int h);

/// Position of the tagged contender's node inside level h (uniform given the
/// level size), derived from a marginal of X_{h-1}.
Pmf node_position_from_collisions(const Pmf& prev_collisions);
Pmf node_position_pmf(int n, int h);

/// P(V_h = v | L_h = l): slot position inside a level of l nodes grouped 2g
/// per slot, the last slot possibly partial.
double slot_position_given_level_size(int v, int l, int g);

/// Mean access delay summed over success levels until the residual success
/// mass drops below kLevelTailCutoff. Slots before level h are averaged over
/// the trees that reach level h; the in-level slot uses the node position pmf.
double mean_delay(const TreeConfig& cfg);

/// Largest delay a contender succeeding at level h can see: every level up
/// to h - 1 holds as many collisions as possible and the contender sits in
/// the last slot of a full level h.
double delay_upper_bound(int n, int g, int h);

/// P(T_h = t, S_{h-1} = s) for t >= 1, indexed [t][s]. Sums to the
/// probability that the tree reaches level h. Needs h - 1 <= chain.levels().
std::vector<std::vector<double>> joint_slots_level(const LevelChainTable& chain, int h);
std::vector<std::vector<double>> joint_slots_level(const TreeConfig& cfg, int h);

DelayDistribution delay_pmf(const LevelChainTable& chain);
DelayDistribution delay_pmf(const TreeConfig& cfg, double epsilon = kDefaultEpsilon);

/// Delay in contention slots of the single-channel breadth-first tree,
/// pushed forward from the G = 1 multichannel delay: each multichannel slot d
/// splits evenly into contention slots 2d - 1 and 2d.
DelayDistribution single_channel_from_multichannel(const DelayDistribution& g1);
DelayDistribution single_channel_delay_pmf(int n, double epsilon = kDefaultEpsilon);

}  // namespace mpcta
