#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mpcta/combinatorics.hpp"
#include "mpcta/pmf.hpp"

namespace mpcta {

/// Parameters of a binary contention tree explored breadth-first with G
/// contention frames (2G contention slots) per time slot.
struct TreeConfig {
    int n = 2;                 ///< initial contenders
    int g = 1;                 ///< contention frames per time slot
    double split_prob = 0.5;   ///< only the unbiased tree is supported

    static constexpr int kBranching = 2;

    int channels() const { return kBranching * g; }

    /// Throws std::invalid_argument unless n >= 2, g >= 1 and split_prob == 1/2.
    void validate() const;
};

/// Deepest level whose 2^m bin count we evaluate exactly.
inline constexpr int kMaxLevel = 62;

/// Upper bound on collisions at level m: min(floor(n/2), 2^m).
int max_collisions(int m, int n);

/// Child collisions of a single collision with eta contenders, support {0,1,2}.
Pmf child_collision_pmf(int eta);

/// Total child collisions of the collisions described by pi.
Pmf children_given_partition(const Partition& pi);

/// P(X_m = x_next | X_{m-1} = x_prev, K_{m-1} = k_prev), indexed by x_next in
/// [0, 2 x_prev]. Memoized per (k_prev, x_prev) across levels and trees.
/// Throws std::domain_error when no partition of k_prev into x_prev parts >= 2 exists.
const std::vector<double>& children_given_contenders(int k_prev, int x_prev);

double collisions_given_prev_and_k(int x_m, int x_prev, int k_prev);

/// P(K_m = k | X_m = x) for n contenders in 2^m bins.
/// Throws std::domain_error when X_m = x is impossible.
double contenders_given_collisions(int k, int x, int m, int n);

/// The whole conditional row, indexed by k in [0, n].
std::vector<double> contenders_given_collisions_row(int x, int m, int n);

/// Markov transition P(X_m = x_m | X_{m-1} = x_prev) for n contenders.
double collision_transition(int x_m, int x_prev, int m, int n);

/// Rows x_prev in [0, max_collisions(m-1, n)], columns x_m in
/// [0, max_collisions(m, n)]. Rows for impossible x_prev are left zero.
std::vector<std::vector<double>> collision_transition_matrix(int m, int n);

/// Exact marginal of X_m from the balls-into-bins count; m = 0 gives {1: 1}.
Pmf marginal_collisions(int m, int n);

/// Persists / restores the per-(k, x) child-collision memo. The file starts
/// with the magic "MPCTA1" followed by a format version; entries already in
/// memory win over loaded ones. load returns false when the file is missing.
void save_children_cache(const std::filesystem::path& file);
bool load_children_cache(const std::filesystem::path& file);

/// Number of (k, x) entries currently memoized.
std::size_t children_cache_size();

}  // namespace mpcta
