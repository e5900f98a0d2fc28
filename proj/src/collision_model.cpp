#include "mpcta/collision_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace mpcta {

namespace {

constexpr char kCacheMagic[6] = {'M', 'P', 'C', 'T', 'A', '1'};
constexpr std::uint32_t kCacheVersion = 1;

std::uint64_t bins_at_level(int m) {
    if (m < 0 || m > kMaxLevel) {
        throw std::domain_error("level " + std::to_string(m) + " outside [0, " + std::to_string(kMaxLevel) + "]");
    }
    return std::uint64_t{1} << m;
}

// P(Y_eta = 1) for eta > 2, i.e. (eta + 1) / 2^(eta - 1).
double single_child_prob(int eta) { return std::ldexp(static_cast<double>(eta + 1), -(eta - 1)); }

class ChildrenCache {
public:
    const std::vector<double>* find(int k, int x) {
        std::lock_guard lock(mutex_);
        auto it = entries_.find({k, x});
        return it == entries_.end() ? nullptr : &it->second;
    }

    const std::vector<double>& insert(int k, int x, std::vector<double> dist) {
        std::lock_guard lock(mutex_);
        return entries_.try_emplace({k, x}, std::move(dist)).first->second;
    }

    std::map<std::pair<int, int>, std::vector<double>> snapshot() {
        std::lock_guard lock(mutex_);
        return entries_;
    }

    std::size_t size() {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, std::vector<double>> entries_;
};

ChildrenCache& children_cache() {
    static ChildrenCache cache;
    return cache;
}

// Walks the partitions of k into x parts >= 2 depth-first, carrying the
// running convolution of the child-collision pmfs and the running
// denominator prod(eta!) * prod(mult!) so each leaf costs one big division.
class ChildrenAccumulator {
public:
    ChildrenAccumulator(int k, int x)
        : k_(k), x_(x), k_factorial_(factorial(k)), shape_count_(psi(k, x, x)),
          conv_(static_cast<std::size_t>(x) + 1), den_(static_cast<std::size_t>(x) + 1),
          result_(2 * static_cast<std::size_t>(x) + 1, 0.0) {
        conv_[0] = {1.0};
        den_[0] = 1;
    }

    std::vector<double> run() {
        if (shape_count_ == 0) {
            throw std::domain_error("no partition of " + std::to_string(k_) + " into " + std::to_string(x_) +
                                    " parts >= 2");
        }
        descend(0, k_, 2, 0);
        return std::move(result_);
    }

private:
    void descend(int depth, int remaining, int min_part, int run_length) {
        const int parts_left = x_ - depth;
        if (parts_left == 0) {
            const double weight = ratio_to_double(k_factorial_, den_[depth] * shape_count_);
            const auto& conv = conv_[depth];
            for (std::size_t i = 0; i < conv.size(); ++i) result_[i] += weight * conv[i];
            return;
        }
        for (int part = min_part; part * parts_left <= remaining; ++part) {
            if (parts_left == 1 && part != remaining) continue;
            const int run = (depth > 0 && part == min_part) ? run_length + 1 : 1;
            den_[depth + 1] = den_[depth] * factorial(part) * run;
            append_child(depth, part);
            descend(depth + 1, remaining - part, part, run);
        }
    }

    void append_child(int depth, int eta) {
        const auto& prev = conv_[depth];
        auto& next = conv_[depth + 1];
        next.assign(prev.size() + 2, 0.0);
        const std::array<double, 3> y = child_weights(eta);
        for (std::size_t i = 0; i < prev.size(); ++i) {
            if (prev[i] == 0.0) continue;
            for (std::size_t c = 0; c < 3; ++c) next[i + c] += prev[i] * y[c];
        }
    }

    static std::array<double, 3> child_weights(int eta) {
        if (eta == 2) return {0.5, 0.5, 0.0};
        const double one = single_child_prob(eta);
        return {0.0, one, 1.0 - one};
    }

    int k_;
    int x_;
    BigCount k_factorial_;
    BigCount shape_count_;
    std::vector<std::vector<double>> conv_;
    std::vector<BigCount> den_;
    std::vector<double> result_;
};

}  // namespace

void TreeConfig::validate() const {
    if (n < 2) throw std::invalid_argument("N >= 2 initial contenders required (got " + std::to_string(n) + ")");
    if (g < 1) throw std::invalid_argument("G >= 1 contention frames per slot required (got " + std::to_string(g) + ")");
    if (split_prob != 0.5) throw std::invalid_argument("only the unbiased tree (split probability 1/2) is supported");
}

int max_collisions(int m, int n) {
    const int half = n / 2;
    if (m >= 31) return half;
    return static_cast<int>(std::min<std::int64_t>(half, std::int64_t{1} << m));
}

Pmf child_collision_pmf(int eta) {
    if (eta < 2) throw std::domain_error("child_collision_pmf: collision size must be >= 2");
    if (eta == 2) return Pmf(0, {0.5, 0.5, 0.0});
    const double one = single_child_prob(eta);
    return Pmf(0, {0.0, one, 1.0 - one});
}

Pmf children_given_partition(const Partition& pi) {
    if (pi.size() == 0) throw std::domain_error("children_given_partition: empty partition");
    Pmf out = Pmf::point(0);
    for (int eta : pi.parts()) out = convolve(out, child_collision_pmf(eta));
    return out;
}

const std::vector<double>& children_given_contenders(int k_prev, int x_prev) {
    if (x_prev < 1 || k_prev < 2 * x_prev) {
        throw std::domain_error("children_given_contenders: need x >= 1 and k >= 2x (k=" + std::to_string(k_prev) +
                                ", x=" + std::to_string(x_prev) + ")");
    }
    auto& cache = children_cache();
    if (const auto* hit = cache.find(k_prev, x_prev)) return *hit;
    return cache.insert(k_prev, x_prev, ChildrenAccumulator(k_prev, x_prev).run());
}

double collisions_given_prev_and_k(int x_m, int x_prev, int k_prev) {
    const auto& dist = children_given_contenders(k_prev, x_prev);
    if (x_m < 0 || x_m >= static_cast<int>(dist.size())) return 0.0;
    return dist[static_cast<std::size_t>(x_m)];
}

std::vector<double> contenders_given_collisions_row(int x, int m, int n) {
    if (n < 0 || x < 0) throw std::domain_error("contenders_given_collisions: negative argument");
    const std::uint64_t bins = bins_at_level(m);
    if (static_cast<std::uint64_t>(x) > bins) {
        throw std::domain_error("contenders_given_collisions: more collisions than nodes at level " + std::to_string(m));
    }
    std::vector<BigCount> counts(static_cast<std::size_t>(n) + 1);
    BigCount total = 0;
    for (int k = 0; k <= n; ++k) {
        counts[k] = gamma_count(n, k, bins, x);
        total += counts[k];
    }
    if (total == 0) {
        throw std::domain_error("contenders_given_collisions: " + std::to_string(x) + " collisions impossible at level " +
                                std::to_string(m) + " with N=" + std::to_string(n));
    }
    std::vector<double> row(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) row[k] = ratio_to_double(counts[k], total);
    return row;
}

double contenders_given_collisions(int k, int x, int m, int n) {
    const auto row = contenders_given_collisions_row(x, m, n);
    if (k < 0 || k > n) return 0.0;
    return row[static_cast<std::size_t>(k)];
}

double collision_transition(int x_m, int x_prev, int m, int n) {
    if (m < 1) throw std::domain_error("collision_transition: level must be >= 1");
    if (x_prev < 0 || x_m < 0) throw std::domain_error("collision_transition: negative collision count");
    if (x_prev == 0) return x_m == 0 ? 1.0 : 0.0;
    if (x_m > 2 * x_prev) return 0.0;
    const auto row = contenders_given_collisions_row(x_prev, m - 1, n);
    double p = 0.0;
    for (int k = 2 * x_prev; k <= n; ++k) {
        if (row[static_cast<std::size_t>(k)] == 0.0) continue;
        p += row[static_cast<std::size_t>(k)] * collisions_given_prev_and_k(x_m, x_prev, k);
    }
    return p;
}

std::vector<std::vector<double>> collision_transition_matrix(int m, int n) {
    if (m < 1) throw std::domain_error("collision_transition_matrix: level must be >= 1");
    const int rows = max_collisions(m - 1, n);
    const int cols = max_collisions(m, n);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(rows) + 1,
                                         std::vector<double>(static_cast<std::size_t>(cols) + 1, 0.0));
    out[0][0] = 1.0;
    for (int x_prev = 1; x_prev <= rows; ++x_prev) {
        std::vector<double> k_row;
        try {
            k_row = contenders_given_collisions_row(x_prev, m - 1, n);
        } catch (const std::domain_error&) {
            continue;  // unreachable state
        }
        auto& row = out[static_cast<std::size_t>(x_prev)];
        for (int k = 2 * x_prev; k <= n; ++k) {
            const double pk = k_row[static_cast<std::size_t>(k)];
            if (pk == 0.0) continue;
            const auto& children = children_given_contenders(k, x_prev);
            const int top = std::min<int>(cols, static_cast<int>(children.size()) - 1);
            for (int x_m = 0; x_m <= top; ++x_m) row[static_cast<std::size_t>(x_m)] += pk * children[x_m];
        }
    }
    return out;
}

Pmf marginal_collisions(int m, int n) {
    if (n < 2) throw std::domain_error("marginal_collisions: N >= 2 required");
    if (m < 0) throw std::domain_error("marginal_collisions: level must be >= 0");
    if (m == 0) return Pmf::point(1);
    const std::uint64_t bins = bins_at_level(m);
    const BigCount all = boost::multiprecision::pow(BigCount(bins), static_cast<unsigned>(n));
    const int top = max_collisions(m, n);
    std::vector<double> weights(static_cast<std::size_t>(top) + 1, 0.0);
    for (int x = 0; x <= top; ++x) {
        BigCount ways = 0;
        const std::uint64_t hi = std::min<std::uint64_t>(static_cast<std::uint64_t>(n - x), bins);
        for (std::uint64_t i = std::max(1, x); i <= hi; ++i) {
            ways += psi(n, static_cast<int>(i), x) * falling_factorial(bins, static_cast<int>(i));
        }
        weights[static_cast<std::size_t>(x)] = ratio_to_double(ways, all);
    }
    return Pmf(0, std::move(weights));
}

void save_children_cache(const std::filesystem::path& file) {
    const auto entries = children_cache().snapshot();
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache file " + file.string());
    auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    out.write(kCacheMagic, sizeof(kCacheMagic));
    put(kCacheVersion);
    put(static_cast<std::uint64_t>(entries.size()));
    for (const auto& [key, dist] : entries) {
        put(static_cast<std::int32_t>(key.first));
        put(static_cast<std::int32_t>(key.second));
        put(static_cast<std::uint32_t>(dist.size()));
        out.write(reinterpret_cast<const char*>(dist.data()), static_cast<std::streamsize>(dist.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("failed writing cache file " + file.string());
}

bool load_children_cache(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return false;
    auto get = [&](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
    char magic[sizeof(kCacheMagic)];
    in.read(magic, sizeof(magic));
    std::uint32_t version = 0;
    get(version);
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0 || version != kCacheVersion) {
        throw std::runtime_error("cache file " + file.string() + " has an unknown format");
    }
    std::uint64_t count = 0;
    get(count);
    for (std::uint64_t e = 0; e < count; ++e) {
        std::int32_t k = 0;
        std::int32_t x = 0;
        std::uint32_t len = 0;
        get(k);
        get(x);
        get(len);
        if (!in || x < 1 || k < 2 * x || len != 2 * static_cast<std::uint32_t>(x) + 1) {
            throw std::runtime_error("cache file " + file.string() + " is corrupt");
        }
        std::vector<double> dist(len);
        in.read(reinterpret_cast<char*>(dist.data()), static_cast<std::streamsize>(len * sizeof(double)));
        if (!in) throw std::runtime_error("cache file " + file.string() + " is truncated");
        children_cache().insert(k, x, std::move(dist));
    }
    return true;
}

std::size_t children_cache_size() { return children_cache().size(); }

}  // namespace mpcta
