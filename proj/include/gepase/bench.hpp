#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gepase/grid2d.hpp"
#include "gepase/planners.hpp"

namespace gepase::bench {

using grid2d::GridMap;
using grid2d::GridPoint;
using json = nlohmann::json;

struct OracleOptions {
    int footprint_side = 32;
    int step = 25;
};

/// Exact optimal cost over the same 8-move graph and integer cost model the
/// planners search, or nullopt if the goal is unreachable. Plain
/// single-threaded Dijkstra with no heuristic and no simulated delays; kept
/// independent of the search-core queue machinery on purpose.
inline std::optional<Cost> dijkstra_oracle(const GridMap& map, GridPoint start,
                                           GridPoint goal, OracleOptions opts = {}) {
    if (start == goal) return Cost{0};
    const auto moves = grid2d::make_moves(opts.step);
    const std::size_t n = std::size_t(map.width) * std::size_t(map.height);
    std::vector<Cost> dist(n, kInfiniteCost);
    auto id_of = [&](GridPoint p) {
        return std::size_t(p.y) * std::size_t(map.width) + std::size_t(p.x);
    };
    using Item = std::pair<Cost, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[id_of(start)] = 0;
    heap.emplace(0, id_of(start));
    const std::size_t goal_id = id_of(goal);
    while (!heap.empty()) {
        auto [d, id] = heap.top();
        heap.pop();
        if (d != dist[id]) continue; // stale entry
        if (id == goal_id) return d;
        const GridPoint p{int(id % std::size_t(map.width)), int(id / std::size_t(map.width))};
        for (const auto& mv : moves) {
            if (!grid2d::move_feasible(map, p, mv, opts.step, opts.footprint_side)) continue;
            const GridPoint q{p.x + mv.dx * opts.step, p.y + mv.dy * opts.step};
            const std::size_t qid = id_of(q);
            const Cost nd = d + mv.cost;
            if (nd < dist[qid]) {
                dist[qid] = nd;
                heap.emplace(nd, qid);
            }
        }
    }
    return std::nullopt;
}

struct ProblemInstance {
    int id = 0;
    std::size_t map_index = 0;
    std::string map_name;
    GridPoint start, goal;
    std::uint64_t seed = 0;
    Cost oracle_cost = 0;
};

struct ExperimentConfig {
    std::vector<std::string> map_paths;
    int scale = 1;
    int problems_per_map = 10;
    std::vector<std::string> planners{"wastar", "pase", "epase", "gepase"};
    std::vector<unsigned> thread_budgets{2, 4, 8};
    double w = 1.0;
    double epsilon = 1.0;
    double rc = 1.0;
    double timeout_s = 60.0;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int footprint_side = 32;
    int step = 25;
    int max_sample_attempts = 2000;

    void validate() const {
        if (map_paths.empty()) throw std::invalid_argument("config: no maps");
        if (scale < 1 || problems_per_map < 1)
            throw std::invalid_argument("config: counts must be >= 1");
        if (planners.empty() || thread_budgets.empty())
            throw std::invalid_argument("config: planners and thread_budgets must be nonempty");
        if (epsilon < w) throw std::invalid_argument("config: epsilon must be >= w");
        PlannerConfig pc{w, epsilon, 1, timeout_s};
        pc.validate();
    }

    static ExperimentConfig from_json(const json& j) {
        ExperimentConfig c;
        c.map_paths = j.at("maps").get<std::vector<std::string>>();
        c.scale = j.value("scale", 1);
        c.problems_per_map = j.value("problems_per_map", 10);
        if (j.contains("planners")) c.planners = j["planners"].get<std::vector<std::string>>();
        if (j.contains("thread_budgets"))
            c.thread_budgets = j["thread_budgets"].get<std::vector<unsigned>>();
        c.w = j.value("w", 1.0);
        c.epsilon = j.value("epsilon", c.w);
        c.rc = j.value("rc", 1.0);
        c.timeout_s = j.value("timeout_s", 60.0);
        c.seed = j.value("seed", std::uint64_t{1});
        c.output_dir = j.value("output_dir", std::string{"out"});
        c.footprint_side = j.value("footprint_side", 32);
        c.step = j.value("step", 25);
        c.max_sample_attempts = j.value("max_sample_attempts", 2000);
        return c;
    }

    json to_json() const {
        return json{{"maps", map_paths},
                    {"scale", scale},
                    {"problems_per_map", problems_per_map},
                    {"planners", planners},
                    {"thread_budgets", thread_budgets},
                    {"w", w},
                    {"epsilon", epsilon},
                    {"rc", rc},
                    {"timeout_s", timeout_s},
                    {"seed", seed},
                    {"output_dir", output_dir},
                    {"footprint_side", footprint_side},
                    {"step", step},
                    {"max_sample_attempts", max_sample_attempts}};
    }

    static ExperimentConfig load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        json j;
        in >> j;
        auto c = from_json(j);
        c.validate();
        return c;
    }
};

/// Sample footprint-feasible start/goal pairs on each map, oracle-verified
/// solvable. Deterministic for a given config seed. The goal is drawn from
/// the start's step lattice, since every move displaces by exactly `step`
/// cells per axis.
inline std::vector<ProblemInstance> generate_problems(const ExperimentConfig& cfg,
                                                      const std::vector<GridMap>& maps) {
    std::vector<ProblemInstance> out;
    int next_id = 0;
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
        const GridMap& map = maps[mi];
        std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + mi + 1);
        const int max_x = map.width - cfg.footprint_side;
        const int max_y = map.height - cfg.footprint_side;
        if (max_x < 0 || max_y < 0)
            throw std::runtime_error("map too small for footprint: " + map.name);
        std::uniform_int_distribution<int> dx(0, max_x), dy(0, max_y);
        for (int k = 0; k < cfg.problems_per_map; ++k) {
            bool found = false;
            for (int attempt = 0; attempt < cfg.max_sample_attempts && !found; ++attempt) {
                const GridPoint start{dx(rng), dy(rng)};
                if (!grid2d::footprint_feasible(map, start.x, start.y, cfg.footprint_side))
                    continue;
                // Goal on the start-congruent lattice.
                const int nx = max_x >= start.x ? (max_x - start.x) / cfg.step : 0;
                const int px = start.x / cfg.step;
                const int ny = max_y >= start.y ? (max_y - start.y) / cfg.step : 0;
                const int py = start.y / cfg.step;
                std::uniform_int_distribution<int> gx(-px, nx), gy(-py, ny);
                const GridPoint goal{start.x + cfg.step * gx(rng), start.y + cfg.step * gy(rng)};
                if (goal == start ||
                    !grid2d::footprint_feasible(map, goal.x, goal.y, cfg.footprint_side))
                    continue;
                auto oracle = dijkstra_oracle(map, start, goal,
                                              OracleOptions{cfg.footprint_side, cfg.step});
                if (!oracle) continue;
                out.push_back(ProblemInstance{next_id++, mi, map.name, start, goal,
                                              rng(), *oracle});
                found = true;
            }
            if (!found)
                throw std::runtime_error("no solvable start-goal pair found on map: " +
                                         map.name);
        }
    }
    return out;
}

struct RunReport {
    std::string planner;
    unsigned threads = 1;
    double rc = 1.0;
    int instance_id = 0;
    SearchStatus status = SearchStatus::Exhausted;
    double time_s = 0.0;
    std::uint64_t edge_evals = 0;
    std::uint64_t expansions = 0;
    std::optional<Cost> cost;
    Cost oracle_cost = 0;
};

inline SearchResult run_planner(const std::string& name, Domain& domain, StateId start,
                                const PlannerConfig& cfg, PlannerHooks* hooks = nullptr) {
    if (name == "wastar") return plan_wastar(domain, start, cfg, hooks);
    if (name == "pase") return plan_pase(domain, start, cfg, hooks);
    if (name == "epase") return plan_epase(domain, start, cfg, hooks);
    if (name == "gepase") return plan_gepase(domain, start, cfg, hooks);
    throw std::invalid_argument("unknown planner: " + name);
}

/// Round-trip-exact decimal form, so aggregates recomputed from runs.csv
/// match summary.json bit for bit.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* kRunsCsvHeader =
    "planner,threads,rc,instance_id,status,time_s,edge_evals,expansions,cost,oracle_cost";

inline void write_runs_csv(const std::vector<RunReport>& rows, std::ostream& os) {
    os << kRunsCsvHeader << "\n";
    for (const auto& r : rows) {
        os << r.planner << ',' << r.threads << ',' << format_double(r.rc) << ','
           << r.instance_id << ',' << to_string(r.status) << ',' << format_double(r.time_s)
           << ',' << r.edge_evals << ',' << r.expansions << ',';
        if (r.cost) os << *r.cost;
        os << ',' << r.oracle_cost << "\n";
    }
}

inline std::vector<RunReport> parse_runs_csv(std::istream& is) {
    std::vector<RunReport> rows;
    std::string line;
    if (!std::getline(is, line) || line != kRunsCsvHeader)
        throw std::runtime_error("runs.csv: unexpected header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            auto comma = line.find(',', pos);
            f.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (f.size() != 10) throw std::runtime_error("runs.csv: bad row: " + line);
        RunReport r;
        r.planner = f[0];
        r.threads = unsigned(std::stoul(f[1]));
        r.rc = std::stod(f[2]);
        r.instance_id = std::stoi(f[3]);
        if (f[4] == "Solved") r.status = SearchStatus::Solved;
        else if (f[4] == "Timeout") r.status = SearchStatus::Timeout;
        else r.status = SearchStatus::Exhausted;
        r.time_s = std::stod(f[5]);
        r.edge_evals = std::stoull(f[6]);
        r.expansions = std::stoull(f[7]);
        if (!f[8].empty()) r.cost = Cost(std::stoll(f[8]));
        r.oracle_cost = Cost(std::stoll(f[9]));
        rows.push_back(std::move(r));
    }
    return rows;
}

struct AggregateEntry {
    double mean_time_s = 0.0;
    double mean_edge_evaluations = 0.0;
    double mean_cost = 0.0;
    std::size_t solved = 0;          // rows solved in this cell, all instances
    std::size_t common_count = 0;    // instances solved by every cell
};

using AggregateTable = std::map<std::string, std::map<unsigned, AggregateEntry>>;

/// Pure function of the raw rows. Means are taken over the instances solved
/// by every (planner, threads) cell, in row order, so recomputation from the
/// CSV reproduces the table exactly.
inline AggregateTable aggregate_reports(const std::vector<RunReport>& rows) {
    std::set<std::pair<std::string, unsigned>> cells;
    std::set<int> instances;
    for (const auto& r : rows) {
        cells.insert({r.planner, r.threads});
        instances.insert(r.instance_id);
    }
    std::map<std::pair<std::string, unsigned>, std::set<int>> solved_by_cell;
    for (const auto& r : rows)
        if (r.status == SearchStatus::Solved)
            solved_by_cell[{r.planner, r.threads}].insert(r.instance_id);
    std::set<int> common = instances;
    for (const auto& cell : cells) {
        std::set<int> keep;
        const auto& solved = solved_by_cell[cell];
        for (int id : common)
            if (solved.count(id)) keep.insert(id);
        common = std::move(keep);
    }

    AggregateTable table;
    for (const auto& [planner, threads] : cells) {
        AggregateEntry e;
        e.common_count = common.size();
        double t = 0, ev = 0, c = 0;
        std::size_t n = 0;
        for (const auto& r : rows) {
            if (r.planner != planner || r.threads != threads) continue;
            if (r.status == SearchStatus::Solved) ++e.solved;
            if (!common.count(r.instance_id) || r.status != SearchStatus::Solved) continue;
            t += r.time_s;
            ev += double(r.edge_evals);
            c += double(*r.cost);
            ++n;
        }
        if (n > 0) {
            e.mean_time_s = t / double(n);
            e.mean_edge_evaluations = ev / double(n);
            e.mean_cost = c / double(n);
        }
        table[planner][threads] = e;
    }
    return table;
}

inline json aggregate_to_json(const AggregateTable& table) {
    json out = json::object();
    for (const auto& [planner, by_threads] : table) {
        json p = json::object();
        for (const auto& [threads, e] : by_threads) {
            p[std::to_string(threads)] = json{{"mean_time_s", e.mean_time_s},
                                              {"mean_edge_evaluations", e.mean_edge_evaluations},
                                              {"mean_cost", e.mean_cost},
                                              {"solved", e.solved},
                                              {"common_instances", e.common_count}};
        }
        out[planner] = p;
    }
    return out;
}

struct ExperimentResult {
    std::vector<ProblemInstance> problems;
    std::vector<RunReport> rows;
    AggregateTable aggregates;
};

inline std::vector<GridMap> load_maps(const ExperimentConfig& cfg) {
    std::vector<GridMap> maps;
    for (const auto& path : cfg.map_paths)
        maps.push_back(grid2d::scale_map(grid2d::load_movingai_map_file(path), cfg.scale));
    return maps;
}

/// Execute the full (planner x thread budget x instance) sweep. Runs are
/// sequential; any parallelism lives inside a single plan call. One warm-up
/// run per cell is discarded before timing. Timeouts are recorded, never
/// fatal. Writes runs.csv, summary.json and per-instance path polylines
/// under cfg.output_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       std::ostream* progress = nullptr) {
    cfg.validate();
    const auto maps = load_maps(cfg);
    ExperimentResult result;
    result.problems = generate_problems(cfg, maps);

    // Calibrate the expensive-action delay once per map and reuse it, so
    // every run of a sweep simulates the same rc.
    std::vector<double> cheap_ns(maps.size(), 0.0);
    if (cfg.rc > 1.0) {
        for (std::size_t mi = 0; mi < maps.size(); ++mi) {
            grid2d::GridWorldOptions probe_opts;
            probe_opts.footprint_side = cfg.footprint_side;
            probe_opts.step = cfg.step;
            probe_opts.rc = cfg.rc;
            grid2d::GridWorld probe(maps[mi], GridPoint{0, 0}, probe_opts);
            cheap_ns[mi] = probe.calibrated_cheap_ns();
        }
    }

    auto make_domain = [&](const ProblemInstance& p) {
        grid2d::GridWorldOptions opts;
        opts.footprint_side = cfg.footprint_side;
        opts.step = cfg.step;
        opts.rc = cfg.rc;
        opts.precalibrated_cheap_ns = cheap_ns[p.map_index];
        return grid2d::GridWorld(maps[p.map_index], p.goal, opts);
    };

    for (const auto& planner : cfg.planners) {
        const std::vector<unsigned> budgets =
            planner == "wastar" ? std::vector<unsigned>{1} : cfg.thread_budgets;
        for (unsigned nt : budgets) {
            PlannerConfig pc;
            pc.w = cfg.w;
            pc.epsilon = cfg.epsilon;
            pc.num_threads = nt;
            pc.timeout_s = cfg.timeout_s;
            if (!result.problems.empty()) {
                auto domain = make_domain(result.problems.front());
                run_planner(planner, domain, domain.state_of(result.problems.front().start),
                            pc); // warm-up, discarded
            }
            for (const auto& p : result.problems) {
                auto domain = make_domain(p);
                SearchResult sr =
                    run_planner(planner, domain, domain.state_of(p.start), pc);
                RunReport row;
                row.planner = planner;
                row.threads = nt;
                row.rc = cfg.rc;
                row.instance_id = p.id;
                row.status = sr.status;
                row.time_s = sr.stats.wall_time_s;
                row.edge_evals = sr.stats.edge_evaluations;
                row.expansions = sr.stats.state_expansions;
                row.cost = sr.cost;
                row.oracle_cost = p.oracle_cost;
                result.rows.push_back(row);
                if (progress)
                    *progress << planner << " nt=" << nt << " instance=" << p.id << " "
                              << to_string(sr.status)
                              << " t=" << format_double(sr.stats.wall_time_s) << "\n";
                if (sr.status == SearchStatus::Solved) {
                    namespace fs = std::filesystem;
                    fs::create_directories(fs::path(cfg.output_dir) / "paths");
                    std::ofstream pf(fs::path(cfg.output_dir) / "paths" /
                                     (std::to_string(p.id) + "_" + planner + ".txt"));
                    for (StateId s : sr.path->states) {
                        const GridPoint q = domain.point_of(s);
                        pf << q.x << ' ' << q.y << "\n";
                    }
                }
            }
        }
    }

    result.aggregates = aggregate_reports(result.rows);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    {
        std::ofstream csv(fs::path(cfg.output_dir) / "runs.csv");
        write_runs_csv(result.rows, csv);
    }
    {
        json summary;
        summary["config"] = cfg.to_json();
        summary["planners"] = aggregate_to_json(result.aggregates);
        std::ofstream js(fs::path(cfg.output_dir) / "summary.json");
        js << summary.dump(2) << "\n";
    }
    return result;
}

inline json problems_to_json(const std::vector<ProblemInstance>& problems) {
    json arr = json::array();
    for (const auto& p : problems) {
        arr.push_back(json{{"id", p.id},
                           {"map_index", p.map_index},
                           {"map", p.map_name},
                           {"start", {p.start.x, p.start.y}},
                           {"goal", {p.goal.x, p.goal.y}},
                           {"seed", p.seed},
                           {"oracle_cost", p.oracle_cost}});
    }
    return arr;
}

} // namespace gepase::bench
