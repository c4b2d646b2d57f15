// Command-line front end: single episodes, the benchmark harness, and the
// vision-geometry self-test.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cbfnav/scenario_io.hpp"
#include "cbfnav/selftest.hpp"
#include "cbfnav/sim.hpp"
#include "cbfnav/svg.hpp"
#include "cbfnav/trajectory_io.hpp"

namespace {

using namespace cbfnav;

constexpr int kExitSuccess = 0;
constexpr int kExitPlannerFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

Scenario load_or_default(const std::string& path) {
    if (path.empty()) return parse_scenario(default_scenario_text());
    return load_scenario(path);
}

// --target accepts an index (1..n) or explicit "x,y" coordinates.
void apply_target(Scenario& scenario, const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
        size_t used = 0;
        const int index = std::stoi(spec, &used);
        if (used != spec.size()) throw std::invalid_argument("bad target index");
        select_target(scenario, index);
    } else {
        const double x = std::stod(spec.substr(0, comma));
        const double y = std::stod(spec.substr(comma + 1));
        select_target_point(scenario, {x, y});
        validate_scenario(scenario);
    }
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

std::string g6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

int cmd_run(const std::string& scenario_path, const std::string& planner_name,
            const std::string& target_spec, const std::string& out_dir) {
    Scenario scenario;
    PlannerKind planner;
    try {
        scenario = load_or_default(scenario_path);
        planner = planner_from_string(planner_name);
        apply_target(scenario, target_spec);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    Trajectory trajectory;
    Metrics metrics;
    std::string failure;
    try {
        std::tie(trajectory, metrics) =
            run_episode(scenario, planner, scenario.sim.dt, scenario.sim.max_steps);
    } catch (const std::exception& e) {
        failure = e.what();
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "i/o error: cannot create " << out_dir << "\n";
        return kExitIo;
    }
    if (!failure.empty()) {
        std::cerr << "planner failure: " << failure << "\n";
        return kExitPlannerFailure;
    }

    const std::filesystem::path dir(out_dir);
    if (!write_file(dir / "trajectory.csv", trajectory_csv(trajectory)) ||
        !write_file(dir / "trajectory.svg", scenario_svg(scenario, {trajectory}))) {
        std::cerr << "i/o error: cannot write outputs under " << out_dir << "\n";
        return kExitIo;
    }

    std::cout << "planner=" << to_string(planner)
              << " termination=" << to_string(trajectory.termination)
              << " steps=" << metrics.steps << " path_length=" << g6(metrics.path_length)
              << " min_h=" << g6(metrics.min_barrier)
              << " max_domega=" << g6(metrics.max_domega)
              << " planning_time_s=" << g6(metrics.wall_time) << "\n";
    return trajectory.termination == Termination::Reached ? kExitSuccess
                                                          : kExitPlannerFailure;
}

struct BenchCell {
    int target_index = 0;
    PlannerKind planner = PlannerKind::ClfCbf;
    bool failed = false;
    std::string status;
    Metrics mean;          // metrics of repeat 0, wall time averaged
    Trajectory first_run;  // repeat 0, written as the cell's trajectory CSV
};

int cmd_bench(const std::string& scenario_path, const std::string& planners_csv,
              int repeats, std::uint64_t seed, const std::string& out_dir) {
    if (repeats < 1) {
        std::cerr << "usage error: --repeats must be >= 1\n";
        return kExitUsage;
    }
    Scenario base;
    std::vector<PlannerKind> planners;
    try {
        base = load_or_default(scenario_path);
        std::stringstream ss(planners_csv);
        std::string token;
        while (std::getline(ss, token, ','))
            if (!token.empty()) planners.push_back(planner_from_string(token));
        if (planners.empty()) throw std::invalid_argument("no planners given");
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const int n_targets = static_cast<int>(base.targets.size());
    std::vector<BenchCell> cells(static_cast<std::size_t>(n_targets) * planners.size());
    for (int t = 0; t < n_targets; ++t)
        for (std::size_t p = 0; p < planners.size(); ++p) {
            cells[t * planners.size() + p].target_index = t + 1;
            cells[t * planners.size() + p].planner = planners[p];
        }

    const int n_cells = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < n_cells; ++c) {
        BenchCell& cell = cells[c];
        try {
            Scenario scenario = base;
            select_target(scenario, cell.target_index);
            double wall_sum = 0.0;
            for (int r = 0; r < repeats; ++r) {
                auto [traj, metrics] = run_episode(scenario, cell.planner,
                                                   scenario.sim.dt,
                                                   scenario.sim.max_steps);
                wall_sum += metrics.wall_time;
                if (r == 0) {
                    cell.first_run = std::move(traj);
                    cell.mean = metrics;
                    cell.status = to_string(cell.first_run.termination);
                }
            }
            cell.mean.wall_time = wall_sum / repeats;
            cell.failed = cell.first_run.termination != Termination::Reached;
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.status = e.what();
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "i/o error: cannot create " << out_dir << "\n";
        return kExitIo;
    }
    const std::filesystem::path dir(out_dir);

    std::ostringstream txt, csv;
    txt << "benchmark (seed " << seed << ", " << repeats << " repeats per cell)\n";
    char header[160];
    std::snprintf(header, sizeof(header), "%-7s %-9s %-22s %10s %10s %10s %12s\n",
                  "target", "planner", "status", "length_m", "min_h", "max_dw",
                  "mean_time_s");
    txt << header;
    csv << "target,planner,status,path_length,min_h,max_domega,steps,mean_wall_time_s,"
           "repeats\n";
    for (const auto& cell : cells) {
        const std::string status =
            cell.failed && cell.status != "Reached" ? "FAILED:" + cell.status : cell.status;
        char line[224];
        std::snprintf(line, sizeof(line), "%-7d %-9s %-22s %10.4f %10.4f %10.4f %12.6f\n",
                      cell.target_index, to_string(cell.planner), status.c_str(),
                      cell.mean.path_length, cell.mean.min_barrier, cell.mean.max_domega,
                      cell.mean.wall_time);
        txt << line;
        csv << cell.target_index << ',' << to_string(cell.planner) << ',' << status << ','
            << g6(cell.mean.path_length) << ',' << g6(cell.mean.min_barrier) << ','
            << g6(cell.mean.max_domega) << ',' << cell.mean.steps << ','
            << g6(cell.mean.wall_time) << ',' << repeats << '\n';

        if (!cell.first_run.samples.empty()) {
            std::ostringstream name;
            name << "target" << cell.target_index << "_" << to_string(cell.planner)
                 << ".csv";
            if (!write_file(dir / name.str(), trajectory_csv(cell.first_run))) {
                std::cerr << "i/o error: cannot write " << name.str() << "\n";
                return kExitIo;
            }
        }
    }
    std::cout << txt.str();
    if (!write_file(dir / "bench_report.txt", txt.str()) ||
        !write_file(dir / "bench_report.csv", csv.str())) {
        std::cerr << "i/o error: cannot write report under " << out_dir << "\n";
        return kExitIo;
    }
    return kExitSuccess;
}

int cmd_vision_selftest(std::uint64_t seed, double sigma) {
    const auto checks = run_vision_selftest(seed, sigma);
    const bool ok = print_selftest_report(std::cout, checks);
    return ok ? kExitSuccess : kExitPlannerFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CLF-CBF-QP trajectory planner with APF/Voronoi baselines"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string planner = "clf-cbf";
    std::string target = "3";
    std::string out_dir = "out";
    std::string planners = "clf-cbf,apf,voronoi";
    int repeats = 10;
    std::uint64_t seed = 1;
    double sigma = 0.5;

    auto* run = app.add_subcommand("run", "Run one episode; write CSV and SVG");
    run->add_option("--scenario", scenario_path,
                    "Scenario file (bundled default room if omitted)");
    run->add_option("--planner", planner, "clf-cbf | apf | voronoi");
    run->add_option("--target", target, "Target index 1..n or 'x,y'");
    run->add_option("--seed", seed, "Seed recorded with the run");
    run->add_option("--out", out_dir, "Output directory");

    auto* bench = app.add_subcommand("bench", "Run all target x planner cells");
    bench->add_option("--scenario", scenario_path,
                      "Scenario file (bundled default room if omitted)");
    bench->add_option("--planners", planners, "Comma-separated planner list");
    bench->add_option("--repeats", repeats, "Runs per cell");
    bench->add_option("--seed", seed, "Seed recorded in the report");
    bench->add_option("--out", out_dir, "Output directory");

    auto* selftest =
        app.add_subcommand("vision-selftest", "Run the vision-geometry checks");
    selftest->add_option("--seed", seed, "Scene generator seed");
    selftest->add_option("--sigma", sigma, "Pixel noise for the RANSAC scene");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (run->parsed()) return cmd_run(scenario_path, planner, target, out_dir);
    if (bench->parsed()) return cmd_bench(scenario_path, planners, repeats, seed, out_dir);
    return cmd_vision_selftest(seed, sigma);
}
