#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpcta/access_delay.hpp"
#include "mpcta/simulator.hpp"
#include "mpcta/tree_length.hpp"
#include "mpcta/validation.hpp"

#ifndef MPCTA_VERSION
#define MPCTA_VERSION "0.0.0"
#endif

namespace mpcta::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest text that reads back to the same double.
std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

struct OutputSpec {
    std::string format = "csv";
    std::string path;
};

void add_output_options(CLI::App& cmd, OutputSpec& spec) {
    cmd.add_option("--format", spec.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd.add_option("--out", spec.path, "write to this file instead of stdout");
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path + " for writing");
    file << text;
    if (!file) throw std::runtime_error("failed writing " + path);
}

void write_manifest(const std::vector<std::string>& args, const Json& config, const std::string& path, double seconds) {
    if (path.empty()) return;
    Json manifest;
    manifest["command"] = args;
    manifest["config"] = config;
    manifest["seed"] = config.contains("seed") ? config["seed"] : Json(nullptr);
    manifest["version"] = MPCTA_VERSION;
    manifest["outputs"] = Json::array({path});
    manifest["wall_time_s"] = seconds;
    write_text(manifest.dump(2) + "\n", path + ".manifest.json", std::cerr);
}

fs::path cache_file() {
    const char* dir = std::getenv("MPCTA_CACHE_DIR");
    if (dir == nullptr || *dir == '\0') return {};
    return fs::path(dir) / "children.mpcta";
}

void load_cache(std::ostream& err) {
    const fs::path file = cache_file();
    if (file.empty()) return;
    try {
        load_children_cache(file);
    } catch (const std::runtime_error& e) {
        err << "warning: ignoring cache: " << e.what() << "\n";
    }
}

void save_cache() {
    const fs::path file = cache_file();
    if (file.empty()) return;
    fs::create_directories(file.parent_path());
    save_children_cache(file);
}

Json pmf_rows(const Pmf& pmf, const char* key) {
    Json rows = Json::array();
    double cdf = 0;
    for (int v = pmf.min_value(); v <= pmf.max_value(); ++v) {
        cdf += pmf.at(v);
        if (pmf.at(v) == 0.0) continue;
        rows.push_back(Json{{key, v}, {"pmf", pmf.at(v)}, {"cdf", cdf}});
    }
    return rows;
}

std::string pmf_csv(const Pmf& pmf, const char* key) {
    std::ostringstream s;
    s << key << ",pmf,cdf\n";
    double cdf = 0;
    for (int v = pmf.min_value(); v <= pmf.max_value(); ++v) {
        cdf += pmf.at(v);
        if (pmf.at(v) == 0.0) continue;
        s << v << ',' << num(pmf.at(v)) << ',' << num(cdf) << '\n';
    }
    return s.str();
}

std::string header_line(const Json& fields) {
    std::ostringstream s;
    s << '#';
    for (const auto& [k, v] : fields.items()) s << ' ' << k << '=' << (v.is_number_float() ? num(v.get<double>()) : v.is_string() ? v.get<std::string>() : v.dump());
    s << '\n';
    return s.str();
}

// tree-length ---------------------------------------------------------------

struct TreeLengthArgs {
    int n = 0;
    int g = 1;
    double epsilon = kDefaultEpsilon;
    OutputSpec output;
};

std::string cmd_tree_length(const TreeLengthArgs& a, Json& config) {
    const TreeConfig cfg{a.n, a.g};
    cfg.validate();
    config = Json{{"n", a.n}, {"g", a.g}, {"epsilon", a.epsilon}};
    const auto r = tree_length_pmf(cfg, a.epsilon);
    const Json summary{{"n", a.n}, {"g", a.g}, {"epsilon", a.epsilon}, {"levels", r.levels}, {"mean", r.pmf.mean()}, {"tail_mass", r.tail_mass}};
    if (a.output.format == "json") {
        Json doc = summary;
        doc["pmf"] = pmf_rows(r.pmf, "t");
        return doc.dump(2) + "\n";
    }
    return header_line(summary) + pmf_csv(r.pmf, "t");
}

// delay ---------------------------------------------------------------------

struct DelayArgs {
    int n = 0;
    int g = 1;
    double epsilon = kDefaultEpsilon;
    bool mean_only = false;
    bool single_channel = false;
    OutputSpec output;
};

std::string cmd_delay(const DelayArgs& a, Json& config) {
    const TreeConfig cfg{a.n, a.g};
    cfg.validate();
    if (a.single_channel && a.g != 1) throw UsageError("--single-channel is derived from the G = 1 tree; drop --g or pass --g 1");
    config = Json{{"n", a.n}, {"g", a.g}, {"epsilon", a.epsilon}, {"mean_only", a.mean_only}, {"single_channel", a.single_channel}};
    const std::string unit = a.single_channel ? "contention_slots" : "time_slots";

    if (a.mean_only) {
        const double m = a.single_channel ? 2.0 * mean_delay(cfg) - 0.5 : mean_delay(cfg);
        if (a.output.format == "json") return Json{{"n", a.n}, {"g", a.g}, {"unit", unit}, {"mean", m}}.dump(2) + "\n";
        return "mean\n" + num(m) + "\n";
    }

    const auto d = a.single_channel ? single_channel_delay_pmf(a.n, a.epsilon) : delay_pmf(cfg, a.epsilon);
    const Json summary{{"n", a.n},
                       {"g", a.g},
                       {"epsilon", a.epsilon},
                       {"unit", unit},
                       {"levels", d.levels},
                       {"mean", d.mean},
                       {"tail_mass", d.tail_mass},
                       {"tail_bias", d.tail_bias}};
    if (a.output.format == "json") {
        Json doc = summary;
        doc["pmf"] = pmf_rows(d.pmf, "d");
        return doc.dump(2) + "\n";
    }
    return header_line(summary) + pmf_csv(d.pmf, "d");
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
    int n = 0;
    int g = 1;
    std::uint64_t runs = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string schedule = "bfs";
    std::string inject;
    bool raw = false;
    unsigned threads = 0;
    OutputSpec output;
};

Json histogram_json(const std::vector<std::uint64_t>& h) {
    Json rows = Json::array();
    for (std::size_t v = 0; v < h.size(); ++v) {
        if (h[v] != 0) rows.push_back(Json::array({v, h[v]}));
    }
    return rows;
}

std::string raw_output(const std::vector<SimRecord>& records, const OutputSpec& output, const Json& config) {
    if (output.format == "json") {
        Json rows = Json::array();
        for (std::size_t r = 0; r < records.size(); ++r) {
            for (const auto& c : records[r].contenders) rows.push_back(Json::array({r, c.level, c.delay, c.success_slot}));
        }
        Json doc{{"config", config}, {"columns", {"run_id", "level", "delay_slots", "success_slot_index"}}, {"rows", rows}};
        return doc.dump(1) + "\n";
    }
    std::ostringstream s;
    s << "run_id,level,delay_slots,success_slot_index\n";
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (const auto& c : records[r].contenders) s << r << ',' << c.level << ',' << c.delay << ',' << c.success_slot << '\n';
    }
    return s.str();
}

std::string cmd_simulate(const SimulateArgs& a, Json& config) {
    if (a.n < 1) throw UsageError("--n must be >= 1 contender");
    const Schedule schedule = parse_schedule(a.schedule);
    config = Json{{"n", a.n}, {"g", a.g}, {"schedule", a.schedule}};

    if (!a.inject.empty()) {
        std::ifstream in(a.inject);
        if (!in) throw UsageError("cannot read split file " + a.inject);
        auto splits = InjectedSplits::parse(in);
        config["inject"] = a.inject;
        std::vector<SimRecord> records{simulate_tree(a.n, a.g, schedule, splits)};
        return raw_output(records, a.output, config);
    }

    if (!a.seed_given) throw UsageError("--seed is required for random simulation");
    SimConfig sim;
    sim.n = a.n;
    sim.g = a.g;
    sim.runs = a.runs;
    sim.seed = a.seed;
    sim.schedule = schedule;
    sim.threads = a.threads;
    sim.keep_records = a.raw;
    config["runs"] = a.runs;
    config["seed"] = a.seed;
    const auto result = run_replications(sim);
    if (a.raw) return raw_output(result.records, a.output, config);

    const auto& agg = result.aggregates;
    const Json moments{{"runs", agg.runs},
                       {"samples", agg.samples},
                       {"tree_length_mean", agg.mean_tree_length()},
                       {"tree_length_var", agg.var_tree_length()},
                       {"delay_mean", agg.mean_delay()},
                       {"delay_var", agg.var_delay()}};
    const std::vector<std::pair<const char*, const std::vector<std::uint64_t>*>> hists{
        {"tree_length", &agg.tree_length}, {"delay", &agg.delay}, {"success_level", &agg.success_level}, {"total_nodes", &agg.total_nodes}};
    if (a.output.format == "json") {
        Json doc{{"config", config}, {"moments", moments}};
        for (const auto& [name, h] : hists) doc["histograms"][name] = histogram_json(*h);
        return doc.dump(2) + "\n";
    }
    std::ostringstream s;
    s << header_line(config) << header_line(moments) << "quantity,value,count\n";
    for (const auto& [name, h] : hists) {
        for (std::size_t v = 0; v < h->size(); ++v) {
            if ((*h)[v] != 0) s << name << ',' << v << ',' << (*h)[v] << '\n';
        }
    }
    return s.str();
}

// compare -------------------------------------------------------------------

struct CompareArgs {
    std::string n_list;
    std::string g_list;
    std::uint64_t runs = 26500;
    std::uint64_t seed = 0;
    double epsilon = kDefaultEpsilon;
    unsigned threads = 0;
    OutputSpec output{"json", ""};
};

std::string cmd_compare(const CompareArgs& a, Json& config) {
    const auto ns = parse_int_list(a.n_list);
    const auto gs = parse_int_list(a.g_list);
    for (int n : ns) TreeConfig{n, 1}.validate();
    for (int g : gs) TreeConfig{2, g}.validate();
    config = Json{{"n_list", ns}, {"g_list", gs}, {"runs", a.runs}, {"seed", a.seed}, {"epsilon", a.epsilon}};
    const auto entries = sweep(ns, gs, a.runs, a.seed, a.epsilon, a.threads);

    if (a.output.format == "json") {
        Json reports = Json::array();
        for (const auto& e : entries) {
            const auto& r = e.report;
            reports.push_back(Json{{"config", {{"n", r.config.n}, {"g", r.config.g}, {"runs", r.config.runs}, {"seed", r.config.seed}, {"epsilon", r.config.epsilon}}},
                                   {"ks", r.ks},
                                   {"argmax_d", r.argmax_d},
                                   {"analytic_tail_mass", r.analytic_tail_mass}});
        }
        return reports.dump(2) + "\n";
    }
    std::ostringstream s;
    for (const auto& e : entries) {
        const auto& r = e.report;
        s << header_line(Json{{"n", r.config.n}, {"g", r.config.g}, {"runs", r.config.runs}, {"seed", r.config.seed}, {"epsilon", r.config.epsilon},
                              {"ks", r.ks}, {"argmax_d", r.argmax_d}, {"analytic_tail_mass", r.analytic_tail_mass}});
    }
    s << "n,g,d,analytic_pmf,analytic_cdf,empirical_pmf,empirical_cdf\n";
    for (const auto& e : entries) {
        const auto& pmf = e.analytic.pmf;
        const auto& hist = e.empirical_histogram;
        std::uint64_t total = 0;
        for (auto c : hist) total += c;
        const int top = std::max(pmf.max_value(), static_cast<int>(hist.size()) - 1);
        double f_analytic = 0;
        std::uint64_t running = 0;
        for (int d = 1; d <= top; ++d) {
            f_analytic += pmf.at(d);
            const std::uint64_t c = static_cast<std::size_t>(d) < hist.size() ? hist[static_cast<std::size_t>(d)] : 0;
            running += c;
            const double emp = static_cast<double>(c) / static_cast<double>(total);
            if (pmf.at(d) == 0.0 && c == 0) continue;
            s << e.report.config.n << ',' << e.report.config.g << ',' << d << ',' << num(pmf.at(d)) << ',' << num(f_analytic) << ','
              << num(emp) << ',' << num(static_cast<double>(running) / static_cast<double>(total)) << '\n';
        }
    }
    return s.str();
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream items(text);
    std::string item;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not an integer: '" + s + "'");
        }
        if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
        return v;
    };
    while (std::getline(items, item, ',')) {
        if (item.empty()) continue;
        if (const auto dots = item.find(".."); dots != std::string::npos) {
            const int lo = to_int(item.substr(0, dots));
            const int hi = to_int(item.substr(dots + 2));
            if (hi < lo) throw std::invalid_argument("empty range '" + item + "'");
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(to_int(item));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tree length and access delay of multichannel contention trees"};
    app.name(args.empty() ? "mpcta" : fs::path(args[0]).filename().string());
    app.set_version_flag("--version", MPCTA_VERSION);
    app.require_subcommand(1);

    TreeLengthArgs tl;
    auto* tl_cmd = app.add_subcommand("tree-length", "tree length pmf in time slots");
    tl_cmd->add_option("--n", tl.n, "initial contenders (>= 2)")->required();
    tl_cmd->add_option("--g", tl.g, "contention frames per time slot")->capture_default_str();
    tl_cmd->add_option("--epsilon", tl.epsilon, "target probability of finishing within the analyzed levels")->capture_default_str();
    add_output_options(*tl_cmd, tl.output);

    DelayArgs dl;
    auto* dl_cmd = app.add_subcommand("delay", "access delay pmf or mean");
    dl_cmd->add_option("--n", dl.n, "initial contenders (>= 2)")->required();
    dl_cmd->add_option("--g", dl.g, "contention frames per time slot")->capture_default_str();
    dl_cmd->add_option("--epsilon", dl.epsilon, "target probability of finishing within the analyzed levels")->capture_default_str();
    dl_cmd->add_flag("--mean-only", dl.mean_only, "print only the mean");
    dl_cmd->add_flag("--single-channel", dl.single_channel, "delay of the single-channel tree in contention slots");
    add_output_options(*dl_cmd, dl.output);

    SimulateArgs sm;
    auto* sm_cmd = app.add_subcommand("simulate", "Monte Carlo trees");
    sm_cmd->add_option("--n", sm.n, "initial contenders")->required();
    sm_cmd->add_option("--g", sm.g, "contention frames per time slot")->capture_default_str();
    sm_cmd->add_option("--runs", sm.runs, "replications")->capture_default_str()->check(CLI::PositiveNumber);
    auto* seed_opt = sm_cmd->add_option("--seed", sm.seed, "base seed (required unless --inject)");
    sm_cmd->add_option("--schedule", sm.schedule, "bfs, bfs-single, dfs-single or dfs")->capture_default_str();
    sm_cmd->add_option("--inject", sm.inject, "file of split choices, one 0/1 line per collision in breadth-first order");
    sm_cmd->add_flag("--raw", sm.raw, "one row per contender instead of the summary");
    sm_cmd->add_option("--threads", sm.threads, "worker threads (0 = all cores)");
    add_output_options(*sm_cmd, sm.output);

    CompareArgs cp;
    auto* cp_cmd = app.add_subcommand("compare", "KS distance between simulated and analytic delay");
    cp_cmd->add_option("--n-list", cp.n_list, "contender counts, e.g. 10,20 or 10..12")->required();
    cp_cmd->add_option("--g-list", cp.g_list, "frames per slot, e.g. 1..8")->required();
    cp_cmd->add_option("--runs", cp.runs, "replications per configuration")->capture_default_str()->check(CLI::PositiveNumber);
    cp_cmd->add_option("--seed", cp.seed, "base seed")->required();
    cp_cmd->add_option("--epsilon", cp.epsilon, "target probability of finishing within the analyzed levels")->capture_default_str();
    cp_cmd->add_option("--threads", cp.threads, "worker threads (0 = all cores)");
    add_output_options(*cp_cmd, cp.output);
    cp_cmd->get_option("--format")->default_str("json");

    std::vector<char*> argv;
    for (const auto& s : args) argv.push_back(const_cast<char*>(s.c_str()));
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    sm.seed_given = seed_opt->count() > 0;

    const auto start = std::chrono::steady_clock::now();
    try {
        Json config;
        std::string text;
        std::string path;
        if (*tl_cmd) {
            load_cache(err);
            text = cmd_tree_length(tl, config);
            path = tl.output.path;
            save_cache();
        } else if (*dl_cmd) {
            load_cache(err);
            text = cmd_delay(dl, config);
            path = dl.output.path;
            save_cache();
        } else if (*sm_cmd) {
            text = cmd_simulate(sm, config);
            path = sm.output.path;
        } else {
            load_cache(err);
            text = cmd_compare(cp, config);
            path = cp.output.path;
            save_cache();
        }
        write_text(text, path, out);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(args, config, path, seconds);
        return kOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigurationError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace mpcta::cli
