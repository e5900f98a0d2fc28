#pragma once

// Brute-force references used only by the tests. Nothing here shares code
// with the library beyond the Pmf container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mpcta/pmf.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

// Calls visit(bins) for every assignment of `balls` labeled balls to `bins`
// labeled bins; bins[i] is the bin of ball i.
template <class F>
void for_each_assignment(int balls, int bins, F&& visit) {
    std::vector<int> a(static_cast<std::size_t>(balls), 0);
    while (true) {
        visit(static_cast<const std::vector<int>&>(a));
        int i = 0;
        while (i < balls && ++a[static_cast<std::size_t>(i)] == bins) a[static_cast<std::size_t>(i++)] = 0;
        if (i == balls) return;
    }
}

inline std::vector<int> occupancy(const std::vector<int>& assignment, int bins) {
    std::vector<int> occ(static_cast<std::size_t>(bins), 0);
    for (int b : assignment) ++occ[static_cast<std::size_t>(b)];
    return occ;
}

// Sorted collision sizes of every labeled assignment of k balls into x bins
// where each bin holds at least two balls, with their probabilities.
inline std::map<std::vector<int>, Rational> shape_probabilities(int k, int x) {
    std::map<std::vector<int>, Int> counts;
    Int valid = 0;
    for_each_assignment(k, x, [&](const std::vector<int>& a) {
        auto occ = occupancy(a, x);
        if (std::any_of(occ.begin(), occ.end(), [](int c) { return c < 2; })) return;
        std::sort(occ.begin(), occ.end());
        ++counts[occ];
        ++valid;
    });
    std::map<std::vector<int>, Rational> out;
    for (const auto& [shape, c] : counts) out[shape] = Rational(c, valid);
    return out;
}

// Set partitions of {0..n-1} into blocks of size >= min_block, counted by
// number of blocks (restricted growth strings).
inline std::vector<Int> set_partitions_by_blocks(int n, int min_block) {
    std::vector<Int> out(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> sizes;
    auto rec = [&](auto&& self, int i, int blocks) -> void {
        if (i == n) {
            for (int b = 0; b < blocks; ++b) {
                if (sizes[static_cast<std::size_t>(b)] < min_block) return;
            }
            ++out[static_cast<std::size_t>(blocks)];
            return;
        }
        for (int b = 0; b <= blocks; ++b) {
            if (b == blocks) sizes.push_back(0);
            ++sizes[static_cast<std::size_t>(b)];
            self(self, i + 1, b == blocks ? blocks + 1 : blocks);
            --sizes[static_cast<std::size_t>(b)];
            if (b == blocks) sizes.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

// Distribution of child collisions when k contenders fill x collisions
// uniformly (labeled, each >= 2) and every contender flips a fair coin.
inline std::vector<Rational> children_by_coins(int k, int x) {
    std::vector<Int> counts(static_cast<std::size_t>(2 * x) + 1, 0);
    Int total = 0;
    for_each_assignment(k, x, [&](const std::vector<int>& a) {
        auto occ = occupancy(a, x);
        if (std::any_of(occ.begin(), occ.end(), [](int c) { return c < 2; })) return;
        for (std::uint32_t coins = 0; coins < (1u << k); ++coins) {
            std::vector<int> child(static_cast<std::size_t>(2 * x), 0);
            for (int i = 0; i < k; ++i) ++child[static_cast<std::size_t>(2 * a[static_cast<std::size_t>(i)] + ((coins >> i) & 1u))];
            const auto c = std::count_if(child.begin(), child.end(), [](int v) { return v >= 2; });
            ++counts[static_cast<std::size_t>(c)];
            ++total;
        }
    });
    std::vector<Rational> out;
    for (const auto& c : counts) out.emplace_back(c, total);
    return out;
}

// Joint counts of (collided bins, balls in collided bins) for n balls in
// 2^m bins, and of (X_{m-1}, X_m) along the split paths.
struct LevelCounts {
    std::map<std::pair<int, int>, Int> x_k;   // (x, k) at level m
    std::map<std::pair<int, int>, Int> prev_next;  // (x_{m-1}, x_m)
    Int total = 0;
};

inline LevelCounts level_counts(int n, int m) {
    LevelCounts out;
    const int bins = 1 << m;
    for_each_assignment(n, bins, [&](const std::vector<int>& a) {
        const auto occ = occupancy(a, bins);
        int x = 0;
        int k = 0;
        for (int c : occ) {
            if (c >= 2) {
                ++x;
                k += c;
            }
        }
        int x_prev = 0;
        if (m >= 1) {
            std::vector<int> parent(static_cast<std::size_t>(bins / 2), 0);
            for (int b : a) ++parent[static_cast<std::size_t>(b / 2)];
            x_prev = static_cast<int>(std::count_if(parent.begin(), parent.end(), [](int c) { return c >= 2; }));
        }
        ++out.x_k[{x, k}];
        ++out.prev_next[{x_prev, x}];
        ++out.total;
    });
    return out;
}

// Exact tree length of BFS trees with g frames per slot, tracking the
// multiset of collision sizes per level. Trees still unresolved after
// `levels` levels are dropped, so the result is a sub-distribution.
inline mpcta::Pmf tree_length_by_levels(int n, int g, int levels) {
    using State = std::vector<int>;  // sorted collision sizes
    std::map<std::pair<State, int>, double> frontier;  // (collisions, slots so far)
    frontier[{State{n}, 1}] = 1.0;
    mpcta::Pmf out;
    for (int m = 0; m <= levels; ++m) {
        std::map<std::pair<State, int>, double> next;
        for (const auto& [key, p] : frontier) {
            const auto& [state, slots] = key;
            if (state.empty()) {
                out.add(slots, p);
                continue;
            }
            if (m == levels) continue;
            const int added = (static_cast<int>(state.size()) + g - 1) / g;
            // Convolve the children of every collision.
            std::map<State, double> kids{{State{}, 1.0}};
            for (int eta : state) {
                std::map<State, double> grown;
                Int ways = 1;
                for (int left = 0; left <= eta; ++left) {
                    if (left > 0) ways = ways * (eta - left + 1) / left;
                    const double q = static_cast<double>(ways) / std::ldexp(1.0, eta);
                    for (const auto& [partial, pk] : kids) {
                        State s = partial;
                        if (left >= 2) s.push_back(left);
                        if (eta - left >= 2) s.push_back(eta - left);
                        std::sort(s.begin(), s.end());
                        grown[s] += pk * q;
                    }
                }
                kids = std::move(grown);
            }
            for (const auto& [s, q] : kids) next[{s, slots + added}] += p * q;
        }
        frontier = std::move(next);
    }
    return out;
}

// Success level of contender 0 among n, by enumerating the first `depth`
// coin flips of every contender. Entry h holds P(H = h) for h in [1, depth].
inline std::vector<Rational> success_levels_by_coins(int n, int depth) {
    std::vector<Int> counts(static_cast<std::size_t>(depth) + 1, 0);
    const int balls = n;
    for_each_assignment(balls, 1 << depth, [&](const std::vector<int>& paths) {
        for (int h = 1; h <= depth; ++h) {
            const int shift = depth - h;
            const int mine = paths[0] >> shift;
            bool alone = true;
            for (int i = 1; i < n && alone; ++i) alone = (paths[static_cast<std::size_t>(i)] >> shift) != mine;
            if (alone) {
                ++counts[static_cast<std::size_t>(h)];
                return;
            }
        }
    });
    const Int total = Int(1) << (n * depth);
    std::vector<Rational> out;
    for (const auto& c : counts) out.emplace_back(c, total);
    return out;
}

}  // namespace oracle
