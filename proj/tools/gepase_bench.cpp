// Command-line harness for the grid-world experiments.
//
//   gepase_bench gen    --config cfg.json --out problems.json
//   gepase_bench run    --config cfg.json [--out-dir DIR]
//   gepase_bench oracle --map m.map [--scale K] --start X Y --goal X Y

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gepase/bench.hpp"

namespace fs = std::filesystem;
using namespace gepase;

int main(int argc, char** argv) {
    CLI::App app{"Parallel heuristic-search planners on 2D grid worlds"};
    app.require_subcommand(1);

    std::string config_path;
    std::string problems_out = "problems.json";
    auto* gen = app.add_subcommand("gen", "Generate the oracle-verified problem set");
    gen->add_option("--config", config_path, "Experiment config (JSON)")->required();
    gen->add_option("--out", problems_out, "Problem set output path");

    std::string out_dir_override;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Execute the planner x thread-budget sweep");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out-dir", out_dir_override, "Override config output_dir");
    run->add_flag("--quiet", quiet, "Suppress per-run progress lines");

    std::string map_path;
    int scale = 1, side = 32, step = 25;
    std::vector<int> start_xy, goal_xy;
    auto* oracle = app.add_subcommand("oracle", "Print the optimal cost for one instance");
    oracle->add_option("--map", map_path, "MovingAI .map file")->required();
    oracle->add_option("--scale", scale, "Map scale factor");
    oracle->add_option("--start", start_xy, "Start cell: X Y")->expected(2)->required();
    oracle->add_option("--goal", goal_xy, "Goal cell: X Y")->expected(2)->required();
    oracle->add_option("--side", side, "Footprint side length");
    oracle->add_option("--step", step, "Move step length");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            auto cfg = bench::ExperimentConfig::load_file(config_path);
            auto maps = bench::load_maps(cfg);
            auto problems = bench::generate_problems(cfg, maps);
            std::ofstream out(problems_out);
            if (!out) throw std::runtime_error("cannot write " + problems_out);
            out << bench::problems_to_json(problems).dump(2) << "\n";
            std::cout << "wrote " << problems.size() << " problems to " << problems_out
                      << "\n";
        } else if (run->parsed()) {
            auto cfg = bench::ExperimentConfig::load_file(config_path);
            if (!out_dir_override.empty()) cfg.output_dir = out_dir_override;
            auto result = bench::run_experiment(cfg, quiet ? nullptr : &std::cerr);
            std::cout << "wrote " << result.rows.size() << " rows to "
                      << (fs::path(cfg.output_dir) / "runs.csv").string() << "\n";
            for (const auto& [planner, by_threads] : result.aggregates)
                for (const auto& [threads, e] : by_threads)
                    std::cout << planner << " nt=" << threads
                              << " mean_time_s=" << e.mean_time_s
                              << " mean_edge_evals=" << e.mean_edge_evaluations
                              << " mean_cost=" << e.mean_cost << " solved=" << e.solved
                              << "\n";
        } else if (oracle->parsed()) {
            auto map = grid2d::scale_map(grid2d::load_movingai_map_file(map_path), scale);
            auto cost = bench::dijkstra_oracle(
                map, grid2d::GridPoint{start_xy[0], start_xy[1]},
                grid2d::GridPoint{goal_xy[0], goal_xy[1]}, bench::OracleOptions{side, step});
            if (cost)
                std::cout << *cost << "\n";
            else {
                std::cout << "unreachable\n";
                return 2;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
