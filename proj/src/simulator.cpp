#include "mpcta/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <thread>

namespace mpcta {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = a ^ (b * 0xD6E8FEB86659FD93ull);
    splitmix64(state);
    return splitmix64(state);
}

std::uint64_t child_key(std::uint64_t parent, int branch) { return mix(parent, 2 + static_cast<std::uint64_t>(branch)); }

struct Node {
    std::vector<int> contenders;
    int first_child = -1;  // index into the next level, children are adjacent
};

void add_count(std::vector<std::uint64_t>& hist, int value, std::uint64_t count = 1) {
    if (value < 0) return;
    if (static_cast<std::size_t>(value) >= hist.size()) hist.resize(static_cast<std::size_t>(value) + 1, 0);
    hist[static_cast<std::size_t>(value)] += count;
}

void merge_into(std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
    if (from.size() > into.size()) into.resize(from.size(), 0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

double hist_mean(const std::vector<std::uint64_t>& h) {
    long double total = 0;
    long double weighted = 0;
    for (std::size_t v = 0; v < h.size(); ++v) {
        total += h[v];
        weighted += static_cast<long double>(v) * h[v];
    }
    return total == 0 ? 0.0 : static_cast<double>(weighted / total);
}

double hist_var(const std::vector<std::uint64_t>& h) {
    const long double mean = hist_mean(h);
    long double total = 0;
    long double acc = 0;
    for (std::size_t v = 0; v < h.size(); ++v) {
        total += h[v];
        acc += (static_cast<long double>(v) - mean) * (static_cast<long double>(v) - mean) * h[v];
    }
    return total < 2 ? 0.0 : static_cast<double>(acc / (total - 1));
}

void accumulate(SimAggregates& agg, const SimRecord& rec) {
    ++agg.runs;
    add_count(agg.tree_length, rec.total_slots);
    add_count(agg.total_nodes, rec.total_nodes);
    for (const auto& c : rec.contenders) {
        ++agg.samples;
        add_count(agg.delay, c.delay);
        add_count(agg.success_level, c.level);
    }
}

}  // namespace

Schedule parse_schedule(const std::string& name) {
    if (name == "bfs") return Schedule::kBfs;
    if (name == "bfs-single") return Schedule::kBfsSingle;
    if (name == "dfs-single") return Schedule::kDfsSingle;
    if (name == "dfs") return Schedule::kDfsFrame;
    throw ConfigurationError("unknown schedule '" + name + "' (expected bfs, bfs-single, dfs-single or dfs)");
}

std::string to_string(Schedule schedule) {
    switch (schedule) {
        case Schedule::kBfs: return "bfs";
        case Schedule::kBfsSingle: return "bfs-single";
        case Schedule::kDfsSingle: return "dfs-single";
        case Schedule::kDfsFrame: return "dfs";
    }
    return "bfs";
}

RandomSplits::RandomSplits(std::uint64_t seed, std::uint64_t replication) : root_(mix(mix(seed, 1), replication)) {}

void RandomSplits::split(std::uint64_t node_key, int contenders, std::vector<std::uint8_t>& choices) {
    choices.resize(static_cast<std::size_t>(contenders));
    std::uint64_t state = node_key;
    std::uint64_t bits = 0;
    for (int i = 0; i < contenders; ++i) {
        if (i % 64 == 0) bits = splitmix64(state);
        choices[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bits & 1u);
        bits >>= 1;
    }
}

InjectedSplits::InjectedSplits(std::vector<std::string> lines) : lines_(std::move(lines)) {
    for (const auto& line : lines_) {
        if (line.find_first_not_of("01") != std::string::npos) {
            throw ConfigurationError("injected split line '" + line + "' may only contain 0 and 1");
        }
    }
}

InjectedSplits InjectedSplits::parse(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
        if (!line.empty()) lines.push_back(line);
    }
    return InjectedSplits(std::move(lines));
}

void InjectedSplits::split(std::uint64_t, int contenders, std::vector<std::uint8_t>& choices) {
    if (next_ >= lines_.size()) {
        throw ConfigurationError("injected split sequence exhausted after " + std::to_string(next_) + " collisions");
    }
    const auto& line = lines_[next_];
    if (static_cast<int>(line.size()) != contenders) {
        throw ConfigurationError("injected split line " + std::to_string(next_ + 1) + " has " +
                                 std::to_string(line.size()) + " choices for a collision of " +
                                 std::to_string(contenders));
    }
    ++next_;
    choices.resize(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) choices[i] = static_cast<std::uint8_t>(line[i] - '0');
}

SimRecord simulate_tree(int n, int g, Schedule schedule, SplitOracle& oracle) {
    if (n < 0) throw ConfigurationError("number of contenders must be >= 0");
    if (g < 1) throw ConfigurationError("G >= 1 contention frames per slot required");
    if (schedule == Schedule::kDfsFrame && g != 1) {
        throw ConfigurationError("depth-first frame schedule is defined for G = 1 only");
    }

    SimRecord rec;
    rec.contenders.resize(static_cast<std::size_t>(n));
    if (n == 0) return rec;

    // Grow the tree breadth-first; the structure does not depend on the schedule.
    std::vector<std::vector<Node>> levels(1);
    std::vector<std::vector<std::uint64_t>> keys(1, {oracle.root_key()});
    levels[0].push_back(Node{});
    levels[0][0].contenders.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) levels[0][0].contenders[static_cast<std::size_t>(i)] = i;

    std::vector<std::uint8_t> choices;
    for (std::size_t m = 0; m < levels.size(); ++m) {
        std::vector<Node> next;
        std::vector<std::uint64_t> next_keys;
        for (std::size_t i = 0; i < levels[m].size(); ++i) {
            Node& node = levels[m][i];
            if (node.contenders.size() < 2) continue;
            oracle.split(keys[m][i], static_cast<int>(node.contenders.size()), choices);
            node.first_child = static_cast<int>(next.size());
            Node zero;
            Node one;
            for (std::size_t c = 0; c < node.contenders.size(); ++c) {
                (choices[c] == 0 ? zero : one).contenders.push_back(node.contenders[c]);
            }
            next.push_back(std::move(zero));
            next.push_back(std::move(one));
            next_keys.push_back(child_key(keys[m][i], 0));
            next_keys.push_back(child_key(keys[m][i], 1));
        }
        if (next.empty()) break;
        levels.push_back(std::move(next));
        keys.push_back(std::move(next_keys));
    }

    // Assign a time slot to every node.
    std::vector<std::vector<int>> slot(levels.size());
    for (std::size_t m = 0; m < levels.size(); ++m) slot[m].assign(levels[m].size(), 0);
    int last_slot = 0;
    switch (schedule) {
        case Schedule::kBfs:
        case Schedule::kBfsSingle: {
            const int per_slot = schedule == Schedule::kBfs ? 2 * g : 1;
            slot[0][0] = last_slot = 1;
            for (std::size_t m = 1; m < levels.size(); ++m) {
                const int base = last_slot;
                for (std::size_t i = 0; i < levels[m].size(); ++i) {
                    slot[m][i] = base + static_cast<int>(i) / per_slot + 1;
                }
                last_slot = slot[m].back();
            }
            break;
        }
        case Schedule::kDfsSingle: {
            // Iterative preorder: a node, then its 0-subtree, then its 1-subtree.
            std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
            while (!stack.empty()) {
                const auto [m, i] = stack.back();
                stack.pop_back();
                slot[m][i] = ++last_slot;
                const int child = levels[m][i].first_child;
                if (child >= 0) {
                    stack.emplace_back(m + 1, static_cast<std::size_t>(child) + 1);
                    stack.emplace_back(m + 1, static_cast<std::size_t>(child));
                }
            }
            break;
        }
        case Schedule::kDfsFrame: {
            slot[0][0] = last_slot = 1;
            // Visiting a collision transmits its children frame, then descends
            // into the 0-child and afterwards the 1-child.
            std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
            while (!stack.empty()) {
                const auto [m, i] = stack.back();
                stack.pop_back();
                const int child = levels[m][i].first_child;
                if (child < 0) continue;
                const auto c = static_cast<std::size_t>(child);
                slot[m + 1][c] = slot[m + 1][c + 1] = ++last_slot;
                stack.emplace_back(m + 1, c + 1);
                stack.emplace_back(m + 1, c);
            }
            break;
        }
    }

    rec.total_slots = last_slot;
    rec.levels_reached = static_cast<int>(levels.size()) - 1;
    for (std::size_t m = 0; m < levels.size(); ++m) {
        rec.total_nodes += static_cast<int>(levels[m].size());
        for (std::size_t i = 0; i < levels[m].size(); ++i) {
            const auto& node = levels[m][i];
            if (node.contenders.size() != 1) continue;
            auto& out = rec.contenders[static_cast<std::size_t>(node.contenders.front())];
            out.level = static_cast<int>(m);
            out.success_slot = slot[m][i];
            out.delay = slot[m][i] - 1;
        }
    }
    return rec;
}

double SimAggregates::mean_tree_length() const { return hist_mean(tree_length); }
double SimAggregates::var_tree_length() const { return hist_var(tree_length); }
double SimAggregates::mean_delay() const { return hist_mean(delay); }
double SimAggregates::var_delay() const { return hist_var(delay); }

SimResult run_replications(const SimConfig& cfg) {
    if (cfg.runs < 1) throw ConfigurationError("at least one replication required");
    SimResult result;
    result.config = cfg;
    if (cfg.keep_records) result.records.resize(cfg.runs);

    unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.runs));

    std::vector<SimAggregates> partial(threads);
    auto work = [&](unsigned t) {
        const std::uint64_t begin = cfg.runs * t / threads;
        const std::uint64_t end = cfg.runs * (t + 1) / threads;
        for (std::uint64_t i = begin; i < end; ++i) {
            RandomSplits oracle(cfg.seed, i);
            SimRecord rec = simulate_tree(cfg.n, cfg.g, cfg.schedule, oracle);
            accumulate(partial[t], rec);
            if (cfg.keep_records) result.records[i] = std::move(rec);
        }
    };
    // Validate once up front so worker threads never throw.
    if (cfg.n < 0 || cfg.g < 1 || (cfg.schedule == Schedule::kDfsFrame && cfg.g != 1)) {
        RandomSplits probe(cfg.seed, 0);
        simulate_tree(cfg.n, cfg.g, cfg.schedule, probe);
    }
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }

    auto& agg = result.aggregates;
    for (const auto& p : partial) {
        agg.runs += p.runs;
        agg.samples += p.samples;
        merge_into(agg.tree_length, p.tree_length);
        merge_into(agg.delay, p.delay);
        merge_into(agg.success_level, p.success_level);
        merge_into(agg.total_nodes, p.total_nodes);
    }
    return result;
}

std::vector<int> histogram_samples(const std::vector<std::uint64_t>& histogram) {
    std::vector<int> out;
    for (std::size_t v = 0; v < histogram.size(); ++v) out.insert(out.end(), histogram[v], static_cast<int>(v));
    return out;
}

}  // namespace mpcta
