#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mpcta/simulator.hpp"

using namespace mpcta;

namespace {

// Four contenders: the root splits {0,1} | {2,3}; {0,1} stays together once
// more and then separates, {2,3} separates right away.
InjectedSplits four_contender_tree() { return InjectedSplits({"0011", "00", "01", "01"}); }

std::vector<int> slots_of(const SimRecord& rec) {
    std::vector<int> out;
    for (const auto& c : rec.contenders) out.push_back(c.success_slot);
    return out;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("schedules of the four-contender tree") {
    auto splits = four_contender_tree();
    const auto bfs_single = simulate_tree(4, 1, Schedule::kBfsSingle, splits);
    CHECK(slots_of(bfs_single) == std::vector<int>{8, 9, 6, 7});
    CHECK(bfs_single.total_slots == 9);
    CHECK(bfs_single.total_nodes == 9);
    CHECK(splits.consumed() == 4);

    splits = four_contender_tree();
    CHECK(slots_of(simulate_tree(4, 1, Schedule::kDfsSingle, splits)) == std::vector<int>{4, 5, 8, 9});

    splits = four_contender_tree();
    const auto bfs = simulate_tree(4, 1, Schedule::kBfs, splits);
    CHECK(slots_of(bfs) == std::vector<int>{5, 5, 4, 4});
    CHECK(bfs.total_slots == 5);

    splits = four_contender_tree();
    CHECK(slots_of(simulate_tree(4, 1, Schedule::kDfsFrame, splits)) == std::vector<int>{4, 4, 5, 5});

    splits = four_contender_tree();
    const auto wide = simulate_tree(4, 4, Schedule::kBfs, splits);
    CHECK(slots_of(wide) == std::vector<int>{4, 4, 3, 3});
    CHECK(wide.contenders[0].delay == 3);
    CHECK(wide.contenders[0].level == 3);
    CHECK(wide.contenders[2].level == 2);
    CHECK(wide.levels_reached == 3);
}

TEST_CASE("injected split parsing and errors") {
    std::istringstream text("# example\n0011\n\n00 # left\n01\n01\n");
    auto parsed = InjectedSplits::parse(text);
    CHECK(slots_of(simulate_tree(4, 1, Schedule::kBfsSingle, parsed)) == std::vector<int>{8, 9, 6, 7});

    InjectedSplits short_seq({"0011"});
    CHECK_THROWS_AS(simulate_tree(4, 1, Schedule::kBfs, short_seq), ConfigurationError);
    InjectedSplits wrong_size({"001"});
    CHECK_THROWS_AS(simulate_tree(4, 1, Schedule::kBfs, wrong_size), ConfigurationError);
    CHECK_THROWS_AS(InjectedSplits({"0a"}), ConfigurationError);
    CHECK_THROWS_AS(parse_schedule("random"), ConfigurationError);
    CHECK(parse_schedule(to_string(Schedule::kDfsSingle)) == Schedule::kDfsSingle);
}

TEST_CASE("degenerate trees") {
    RandomSplits rng(1, 0);
    const auto one = simulate_tree(1, 1, Schedule::kBfs, rng);
    CHECK(one.total_slots == 1);
    CHECK(one.contenders[0].delay == 0);
    const auto none = simulate_tree(0, 1, Schedule::kBfs, rng);
    CHECK(none.total_slots == 0);
    CHECK(none.contenders.empty());
    InjectedSplits immediate({"01"});
    const auto two = simulate_tree(2, 1, Schedule::kBfs, immediate);
    CHECK(two.total_slots == 2);
    CHECK(two.contenders[0].delay == 1);
    CHECK(two.contenders[1].delay == 1);
    CHECK_THROWS_AS(simulate_tree(2, 0, Schedule::kBfs, rng), ConfigurationError);
    CHECK_THROWS_AS(simulate_tree(4, 2, Schedule::kDfsFrame, rng), ConfigurationError);
}

TEST_CASE("per-tree invariants") {
    for (int n : {2, 3, 7, 60}) {
        for (int g : {1, 3}) {
            for (std::uint64_t rep = 0; rep < 300; ++rep) {
                RandomSplits rng(99, rep);
                const auto rec = simulate_tree(n, g, Schedule::kBfs, rng);
                CHECK(rec.total_nodes % 2 == 1);
                CHECK(static_cast<int>(rec.contenders.size()) == n);
                std::vector<int> seen(static_cast<std::size_t>(n), 0);
                for (const auto& c : rec.contenders) {
                    CHECK(c.delay >= 1);
                    CHECK(c.delay <= rec.total_slots - 1);
                    CHECK(c.delay >= c.level);
                    CHECK(c.success_slot == c.delay + 1);
                }
            }
        }
    }
}

TEST_CASE("tree shape does not depend on the schedule") {
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        RandomSplits a(5, rep);
        RandomSplits b(5, rep);
        const auto bfs = simulate_tree(12, 1, Schedule::kBfs, a);
        const auto dfs = simulate_tree(12, 1, Schedule::kDfsSingle, b);
        CHECK(bfs.total_nodes == dfs.total_nodes);
        CHECK(dfs.total_slots == dfs.total_nodes);
        for (std::size_t i = 0; i < bfs.contenders.size(); ++i) CHECK(bfs.contenders[i].level == dfs.contenders[i].level);
    }
}

TEST_CASE("replications are reproducible and independent of thread count") {
    SimConfig cfg;
    cfg.n = 9;
    cfg.g = 2;
    cfg.runs = 2000;
    cfg.seed = 1234;
    cfg.threads = 1;
    const auto a = run_replications(cfg);
    cfg.threads = 4;
    const auto b = run_replications(cfg);
    CHECK(a.aggregates.delay == b.aggregates.delay);
    CHECK(a.aggregates.tree_length == b.aggregates.tree_length);
    CHECK(a.aggregates.samples == 9 * 2000);
    cfg.seed = 1235;
    CHECK(run_replications(cfg).aggregates.delay != a.aggregates.delay);
    cfg.runs = 0;
    CHECK_THROWS_AS(run_replications(cfg), ConfigurationError);
}

TEST_CASE("kept records match the aggregates") {
    SimConfig cfg;
    cfg.n = 5;
    cfg.runs = 100;
    cfg.seed = 3;
    cfg.keep_records = true;
    const auto r = run_replications(cfg);
    REQUIRE(r.records.size() == 100);
    std::uint64_t slots = 0;
    for (const auto& rec : r.records) slots += static_cast<std::uint64_t>(rec.total_slots);
    CHECK(static_cast<double>(slots) / 100.0 == doctest::Approx(r.aggregates.mean_tree_length()));
    const auto samples = histogram_samples(r.aggregates.delay);
    CHECK(samples.size() == 500);
}

TEST_CASE("two contenders: Monte Carlo moments") {
    SimConfig cfg;
    cfg.n = 2;
    cfg.g = 1;
    cfg.runs = 1000000;
    cfg.seed = 42;
    const auto agg = run_replications(cfg).aggregates;
    // T - 1 and D are geometric(1/2) with variance 2.
    const double se = std::sqrt(2.0 / static_cast<double>(cfg.runs));
    CHECK(std::abs(agg.mean_tree_length() - 3.0) <= 3 * se);
    CHECK(std::abs(agg.mean_delay() - 2.0) <= 3 * se);
}

}
