#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpcta {

/// Order in which contention slots are transmitted.
enum class Schedule {
    kBfs,        ///< breadth-first, 2G contention slots per time slot (default)
    kBfsSingle,  ///< breadth-first, one contention slot per time slot
    kDfsSingle,  ///< depth-first serial resolution, one contention slot per time slot
    kDfsFrame,   ///< depth-first over contention frames, one frame per time slot
};

Schedule parse_schedule(const std::string& name);
std::string to_string(Schedule schedule);

/// Raised for invalid simulator input, e.g. an injected split sequence that
/// runs out or does not match a collision's size.
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Source of the binary choices made by the contenders of each collision.
class SplitOracle {
public:
    virtual ~SplitOracle() = default;
    /// Fills `choices` with one 0/1 value per contender of the collision
    /// identified by `node_key`. Collisions are visited breadth-first.
    virtual void split(std::uint64_t node_key, int contenders, std::vector<std::uint8_t>& choices) = 0;
    virtual std::uint64_t root_key() const = 0;
};

/// Fair coins keyed by (seed, replication, node path): the choices of a
/// collision depend only on its position in the tree, never on visit order.
class RandomSplits final : public SplitOracle {
public:
    RandomSplits(std::uint64_t seed, std::uint64_t replication);
    void split(std::uint64_t node_key, int contenders, std::vector<std::uint8_t>& choices) override;
    std::uint64_t root_key() const override { return root_; }

private:
    std::uint64_t root_;
};

/// Deterministic choices: one line per collision in breadth-first order, each
/// a string of '0'/'1' with one character per contender of that collision.
class InjectedSplits final : public SplitOracle {
public:
    explicit InjectedSplits(std::vector<std::string> lines);
    /// Reads the text format; blank lines and '#' comments are skipped.
    static InjectedSplits parse(std::istream& in);

    void split(std::uint64_t node_key, int contenders, std::vector<std::uint8_t>& choices) override;
    std::uint64_t root_key() const override { return 0; }
    std::size_t consumed() const { return next_; }

private:
    std::vector<std::string> lines_;
    std::size_t next_ = 0;
};

struct ContenderOutcome {
    int level = 0;         ///< depth of the node where the contender succeeded
    int success_slot = 0;  ///< absolute time-slot index, root slot = 1
    int delay = 0;         ///< time slots after the root slot: success_slot - 1
};

struct SimRecord {
    int total_slots = 0;
    int total_nodes = 0;
    int levels_reached = 0;
    std::vector<ContenderOutcome> contenders;  ///< indexed by contender id
};

/// One tree with n contenders and g contention frames per time slot.
SimRecord simulate_tree(int n, int g, Schedule schedule, SplitOracle& oracle);

struct SimConfig {
    int n = 2;
    int g = 1;
    std::uint64_t runs = 1;
    std::uint64_t seed = 0;
    Schedule schedule = Schedule::kBfs;
    unsigned threads = 0;       ///< 0 picks the hardware concurrency
    bool keep_records = false;
};

/// Integer histograms indexed by value (index 0 = value 0).
struct SimAggregates {
    std::uint64_t runs = 0;
    std::uint64_t samples = 0;  ///< contender outcomes, runs * n
    std::vector<std::uint64_t> tree_length;
    std::vector<std::uint64_t> delay;
    std::vector<std::uint64_t> success_level;
    std::vector<std::uint64_t> total_nodes;

    double mean_tree_length() const;
    double var_tree_length() const;
    double mean_delay() const;
    double var_delay() const;
};

struct SimResult {
    SimConfig config;
    SimAggregates aggregates;
    std::vector<SimRecord> records;  ///< only when config.keep_records
};

/// Replication i uses RandomSplits(seed, i); output is independent of the
/// thread count.
SimResult run_replications(const SimConfig& cfg);

/// Expands an integer histogram back into samples (value repeated count times).
std::vector<int> histogram_samples(const std::vector<std::uint64_t>& histogram);

}  // namespace mpcta
