// trackflow command-line tool: LP and flow solving, synthetic scenarios,
// tracking, CLEAR evaluation and the method-comparison sweep.

#include <atomic>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "trackflow/assignment.hpp"
#include "trackflow/config.hpp"
#include "trackflow/csv.hpp"
#include "trackflow/lp_io.hpp"
#include "trackflow/metrics.hpp"
#include "trackflow/sim.hpp"
#include "trackflow/social.hpp"

namespace fs = std::filesystem;
using namespace trackflow;

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("TRACKFLOW_LOG");
        return env ? std::atoi(env) : 0;
    }();
    return level;
}

void logf(int level, const char* fmt, ...) {
    if (log_level() < level) return;
    va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
    va_end(args);
}

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

assign::VolumeBounds bounds_from(const std::vector<track::Detection>& dets) {
    assign::VolumeBounds b;
    if (dets.empty()) return b;
    b.xmin = b.xmax = dets[0].pos.x;
    b.ymin = b.ymax = dets[0].pos.y;
    b.zmin = b.zmax = dets[0].pos.z;
    for (const auto& d : dets) {
        b.xmin = std::min(b.xmin, d.pos.x);
        b.xmax = std::max(b.xmax, d.pos.x);
        b.ymin = std::min(b.ymin, d.pos.y);
        b.ymax = std::max(b.ymax, d.pos.y);
        b.zmin = std::min(b.zmin, d.pos.z);
        b.zmax = std::max(b.zmax, d.pos.z);
    }
    return b;
}

// Trajectory length in frames (gaps bridged by a tracker count as covered).
double trajectory_span(const track::TrackedTrajectory& t) {
    if (t.detections.empty()) return 0.0;
    return static_cast<double>(t.detections.back().frame - t.detections.front().frame + 1);
}

struct TrackOutcome {
    std::vector<track::TrackedTrajectory> trajectories;
    int iterations = 0;
    bool converged = true;
    double cost = 0.0;
};

TrackOutcome run_tracker(const std::vector<track::Detection>& dets, config::RunConfig cfg) {
    TrackOutcome out;
    if (cfg.method == "mlh" || cfg.method == "hungarian") {
        assign::MlhParams mp;
        mp.v_thresh = cfg.v_thresh();
        // Pad the field of view by one maximum step so a particle at the data
        // extent is not already "on" the border.
        mp.bounds = bounds_from(dets);
        mp.bounds.xmin -= mp.v_thresh;
        mp.bounds.xmax += mp.v_thresh;
        mp.bounds.ymin -= mp.v_thresh;
        mp.bounds.ymax += mp.v_thresh;
        if (mp.bounds.zmax > mp.bounds.zmin) mp.bounds.zmax += mp.v_thresh;
        out.trajectories = cfg.method == "mlh" ? assign::track_mlh(dets, mp)
                                               : assign::track_hungarian(dets, mp);
        return out;
    }
    social::SocialParams sp = cfg.social;
    sp.use_lp_solver = (cfg.solver == "lp");
    if (cfg.method == "dist") {
        sp.max_iterations = 1;
    } else if (cfg.method == "sfm") {
        sp.use_groups = false;
    } else if (cfg.method == "sfm_gr") {
        sp.use_sfm = true;
        sp.use_groups = true;
    } else {
        throw CLI::ValidationError("--method", "unknown method '" + cfg.method + "'");
    }
    social::EmResult em = social::em_track(dets, cfg.cost, sp);
    out.trajectories = std::move(em.trajectories);
    out.iterations = em.iterations_used;
    out.converged = em.converged;
    for (const auto& t : out.trajectories) out.cost += t.cost;
    return out;
}

struct ConfigCli {
    std::string config_path;
    std::vector<std::string> sets;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value configuration file");
        cmd->add_option("--set", sets, "override a single config key (key=value)");
    }
    config::RunConfig resolve(config::RunConfig base = {}) const {
        config::RunConfig cfg =
            config_path.empty() ? std::move(base) : config::read_config_file(config_path, base);
        for (const std::string& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--set", "expects key=value");
            config::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        cfg.finalize();
        return cfg;
    }
};

// ---------------------------------------------------------------------------
// solve-lp

int cmd_solve_lp(const std::string& path) {
    const lp::LinearProgram prog = lp::read_lp_file(path);
    const lp::SolveResult result = lp::solve(prog);
    lp::print_result(std::cout, prog, result);
    switch (result.status) {
        case lp::SolveStatus::Optimal: return kExitOk;
        case lp::SolveStatus::Unbounded: return 1;
        case lp::SolveStatus::Infeasible: return kExitInfeasible;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// solve-flow

netflow::FlowNetwork read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open flow file: " + path);
    netflow::FlowNetwork net;
    net.source = -1;
    net.sink = -1;
    int max_node = -1;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream is(line);
        std::string first;
        if (!(is >> first)) continue;
        if (first == "s") {
            is >> net.source;
        } else if (first == "t") {
            is >> net.sink;
        } else {
            netflow::Arc a;
            a.tail = std::stoi(first);
            if (!(is >> a.head >> a.cost >> a.capacity))
                throw std::runtime_error("flow file: bad arc line '" + line + "'");
            net.arcs.push_back(a);
            max_node = std::max({max_node, a.tail, a.head});
        }
    }
    if (net.source < 0 || net.sink < 0)
        throw std::runtime_error("flow file: missing 's <id>' or 't <id>' header");
    net.node_count = std::max({max_node, net.source, net.sink}) + 1;
    return net;
}

int cmd_solve_flow(const std::string& path, int k, bool split, const std::string& solver,
                   int flow_amount) {
    netflow::FlowNetwork net = read_edge_list(path);
    if (split) {
        const netflow::SplitResult sr = netflow::split_nodes(net);
        net = sr.net;
    }
    if (solver == "lp") {
        const netflow::LpFlowResult res = netflow::min_cost_flow_via_lp(net, flow_amount);
        if (!res.feasible) {
            std::cout << "INFEASIBLE: requested flow exceeds the maximum\n";
            return kExitInfeasible;
        }
        std::cout << "cost " << fmt_num(res.cost) << "\n";
        for (std::size_t i = 0; i < res.arc_flow.size(); ++i)
            if (res.arc_flow[i] > 0)
                std::cout << "arc " << net.arcs[i].tail << "->" << net.arcs[i].head << " flow "
                          << res.arc_flow[i] << "\n";
        return kExitOk;
    }
    netflow::SspOptions opts;
    if (k > 0) opts.k = k;
    const netflow::FlowSolution sol = netflow::successive_shortest_paths(net, opts);
    std::cout << "paths " << sol.paths.paths.size() << " total cost "
              << fmt_num(sol.paths.total_cost)
              << (sol.paths.truncated ? " (truncated)" : "") << "\n";
    for (std::size_t p = 0; p < sol.paths.paths.size(); ++p) {
        std::cout << "path " << p + 1 << " cost " << fmt_num(sol.paths.path_costs[p]) << ":";
        for (int v : sol.paths.paths[p]) std::cout << " " << v;
        std::cout << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// track

int cmd_track(const std::string& input, const std::string& out_dir, const config::RunConfig& cfg) {
    const std::vector<track::Detection> dets = io::read_detections_csv(input);
    const TrackOutcome outcome = run_tracker(dets, cfg);

    double mean_len = 0.0;
    for (const auto& t : outcome.trajectories) mean_len += trajectory_span(t);
    if (!outcome.trajectories.empty()) mean_len /= static_cast<double>(outcome.trajectories.size());

    fs::create_directories(out_dir);
    const std::string out_path = (fs::path(out_dir) / "trajectories.csv").string();
    io::write_trajectories_csv(out_path, outcome.trajectories);

    std::cout << "method " << cfg.method << " solver " << cfg.solver << "\n";
    std::cout << "detections " << dets.size() << "\n";
    std::cout << "trajectories " << outcome.trajectories.size() << "\n";
    std::cout << "mean_length " << fmt_num(mean_len) << "\n";
    std::cout << "total_cost " << fmt_num(outcome.cost) << "\n";
    std::cout << "em_iterations " << outcome.iterations << "\n";
    std::cout << "converged " << (outcome.converged ? 1 : 0) << "\n";
    std::cout << "output " << out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const sim::ScenarioSpec& spec, const sim::PerturbationSpec& pspec,
                 const std::string& out_dir) {
    const sim::Scenario scenario = sim::generate(spec);
    const std::vector<track::Detection> dets = sim::perturb(scenario, pspec);
    fs::create_directories(out_dir);
    const std::string det_path = (fs::path(out_dir) / "dets.csv").string();
    const std::string gt_path = (fs::path(out_dir) / "dets.gt.csv").string();
    io::write_detections_csv(det_path, dets);
    io::write_trajectories_csv(gt_path, scenario.ground_truth);
    std::cout << "walkers " << spec.walkers << " frames " << spec.frames << "\n";
    std::cout << "detections " << dets.size() << "\n";
    std::cout << "detections_csv " << det_path << "\n";
    std::cout << "ground_truth_csv " << gt_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const std::string& gt_path, const std::string& hyp_path,
                 const std::string& out_dir) {
    const auto gt = io::read_trajectories_csv(gt_path);
    const auto hyp = io::read_trajectories_csv(hyp_path);
    const metrics::ClearReport rep = metrics::evaluate(gt, hyp);
    std::cout << rep.to_text();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream txt(fs::path(out_dir) / "report.txt");
        txt << rep.to_text();
        std::ofstream csv(fs::path(out_dir) / "report.csv");
        csv << rep.to_csv();
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compare

struct CompareRow {
    double da = 0.0, ta = 0.0;
    int idsw = 0;
    double count_ratio = 0.0, len_ratio = 0.0;
};

config::RunConfig method_config(const std::string& method, const config::RunConfig& base) {
    config::RunConfig cfg = base;
    if (method == "hungarian" || method == "mlh") {
        cfg.method = method;
    } else if (method == "lp1lev") {
        cfg.method = "dist";
        cfg.cost.f_max = 1;
    } else if (method == "lp") {
        cfg.method = "dist";
        cfg.cost.f_max = 5;
    } else if (method == "dist" || method == "sfm" || method == "sfm_gr") {
        cfg.method = method;
    } else {
        throw CLI::ValidationError("--methods", "unknown method '" + method + "'");
    }
    return cfg;
}

int cmd_compare(int walkers, int frames, int seeds, std::uint64_t base_seed,
                const std::string& grid_str, const std::string& methods_str,
                const std::string& out_dir, int jobs, const config::RunConfig& base_cfg) {
    const std::vector<std::string> methods = split_list(methods_str);
    std::vector<double> grid;
    for (const std::string& g : split_list(grid_str)) grid.push_back(std::stod(g) / 100.0);
    if (methods.empty() || grid.empty())
        throw CLI::ValidationError("compare", "empty method list or missing grid");

    const std::size_t total = methods.size() * grid.size() * static_cast<std::size_t>(seeds);
    std::vector<CompareRow> rows(total);
    auto index = [&](std::size_t mi, std::size_t gi, int si) {
        return (mi * grid.size() + gi) * static_cast<std::size_t>(seeds) + si;
    };

    // Scenario depends only on the seed index; the perturbation stream and
    // grid point vary per task so every method sees identical inputs.
    std::atomic<std::size_t> next_task{0};
    const std::size_t n_scenarios = static_cast<std::size_t>(seeds) * grid.size();
    std::mutex error_mutex;
    std::string first_error;
    auto worker = [&] {
        while (true) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= n_scenarios) break;
            try {
            const int si = static_cast<int>(task / grid.size());
            const std::size_t gi = task % grid.size();

            sim::ScenarioSpec sspec;
            sspec.walkers = walkers;
            sspec.frames = frames;
            sspec.fps = base_cfg.fps;
            sspec.seed = base_seed + static_cast<std::uint64_t>(si);
            const sim::Scenario scenario = sim::generate(sspec);

            sim::PerturbationSpec pspec;
            pspec.missing = grid[gi];
            pspec.seed = base_seed + 7919 * static_cast<std::uint64_t>(si + 1) + gi;
            const std::vector<track::Detection> dets = sim::perturb(scenario, pspec);

            double gt_mean_len = 0.0;
            for (const auto& t : scenario.ground_truth) gt_mean_len += trajectory_span(t);
            gt_mean_len /= static_cast<double>(scenario.ground_truth.size());

            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                const config::RunConfig cfg = method_config(methods[mi], base_cfg);
                const TrackOutcome outcome = run_tracker(dets, cfg);
                const metrics::ClearReport rep =
                    metrics::evaluate(scenario.ground_truth, outcome.trajectories);

                CompareRow& row = rows[index(mi, gi, si)];
                row.da = rep.da;
                row.ta = rep.ta;
                row.idsw = rep.total_switches;
                row.count_ratio = static_cast<double>(outcome.trajectories.size()) /
                                  static_cast<double>(scenario.ground_truth.size());
                double mean_len = 0.0;
                for (const auto& t : outcome.trajectories) mean_len += trajectory_span(t);
                if (!outcome.trajectories.empty())
                    mean_len /= static_cast<double>(outcome.trajectories.size());
                row.len_ratio = gt_mean_len > 0.0 ? mean_len / gt_mean_len : 0.0;
            }
            logf(1, "compare: seed %d missing %.0f%% done", si, grid[gi] * 100.0);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    const int n_threads = std::max(1, jobs > 0 ? jobs
                                               : static_cast<int>(std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (!first_error.empty()) throw std::runtime_error("compare worker failed: " + first_error);

    fs::create_directories(out_dir);
    std::ofstream results(fs::path(out_dir) / "results.csv");
    results << "method,missing_pct,seed,da,ta,id_switches,count_ratio,length_ratio\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        for (std::size_t gi = 0; gi < grid.size(); ++gi)
            for (int si = 0; si < seeds; ++si) {
                const CompareRow& r = rows[index(mi, gi, si)];
                results << methods[mi] << ',' << fmt_num(grid[gi] * 100.0) << ',' << si << ','
                        << fmt_num(r.da) << ',' << fmt_num(r.ta) << ',' << r.idsw << ','
                        << fmt_num(r.count_ratio) << ',' << fmt_num(r.len_ratio) << "\n";
            }

    std::ofstream summary(fs::path(out_dir) / "summary.csv");
    summary << "method,missing_pct,mean_da,mean_ta,mean_id_switches,mean_count_ratio,"
               "mean_length_ratio\n";
    std::cout << "method missing_pct mean_count_ratio mean_length_ratio mean_ta mean_idsw\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            CompareRow mean;
            for (int si = 0; si < seeds; ++si) {
                const CompareRow& r = rows[index(mi, gi, si)];
                mean.da += r.da;
                mean.ta += r.ta;
                mean.idsw += r.idsw;
                mean.count_ratio += r.count_ratio;
                mean.len_ratio += r.len_ratio;
            }
            const double k = static_cast<double>(seeds);
            summary << methods[mi] << ',' << fmt_num(grid[gi] * 100.0) << ','
                    << fmt_num(mean.da / k) << ',' << fmt_num(mean.ta / k) << ','
                    << fmt_num(mean.idsw / k) << ',' << fmt_num(mean.count_ratio / k) << ','
                    << fmt_num(mean.len_ratio / k) << "\n";
            std::cout << methods[mi] << ' ' << fmt_num(grid[gi] * 100.0) << ' '
                      << fmt_num(mean.count_ratio / k) << ' ' << fmt_num(mean.len_ratio / k)
                      << ' ' << fmt_num(mean.ta / k) << ' ' << fmt_num(mean.idsw / k) << "\n";
        }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trackflow: multi-object tracking as minimum-cost network flow"};
    app.require_subcommand(1);

    // solve-lp
    std::string lp_path;
    CLI::App* solve_lp = app.add_subcommand("solve-lp", "solve an LP text file with simplex");
    solve_lp->add_option("file", lp_path, "LP file")->required();

    // solve-flow
    std::string flow_path, flow_solver = "ssp";
    int flow_k = 0, flow_amount = 1;
    bool flow_split = false;
    CLI::App* solve_flow = app.add_subcommand("solve-flow", "min-cost flow on an edge list");
    solve_flow->add_option("file", flow_path, "edge list: 's <id>', 't <id>', 'tail head cost cap'")
        ->required();
    solve_flow->add_option("--k", flow_k, "number of paths (default: until nonnegative)");
    solve_flow->add_flag("--split", flow_split, "split nodes for node-disjoint paths");
    solve_flow->add_option("--solver", flow_solver, "ssp | lp")->check(CLI::IsMember({"ssp", "lp"}));
    solve_flow->add_option("--flow", flow_amount, "flow amount for --solver lp");

    // track
    std::string track_input, track_out = ".";
    ConfigCli track_cfg_cli;
    std::string track_method, track_solver;
    std::uint64_t track_seed = 0;
    CLI::App* track_cmd = app.add_subcommand("track", "run a tracker over a detection CSV");
    track_cmd->add_option("input", track_input, "detection CSV")->required();
    track_cmd->add_option("--out", track_out, "output directory");
    track_cfg_cli.attach(track_cmd);
    CLI::Option* track_method_opt =
        track_cmd->add_option("--method", track_method, "dist | sfm | sfm_gr | mlh | hungarian");
    CLI::Option* track_solver_opt = track_cmd->add_option("--solver", track_solver, "ssp | lp");
    track_cmd->add_option("--seed", track_seed, "run seed (recorded, tracking is deterministic)");

    // simulate
    sim::ScenarioSpec sspec;
    sim::PerturbationSpec pspec;
    std::string sim_out = ".", sim_groups;
    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic scenario");
    simulate->add_option("--walkers", sspec.walkers, "number of walkers");
    simulate->add_option("--frames", sspec.frames, "number of frames");
    simulate->add_option("--groups", sim_groups, "group sizes, e.g. 3,2");
    simulate->add_option("--scene", sspec.scene_size, "scene side length (m)");
    simulate->add_option("--fps", sspec.fps, "frame rate");
    simulate->add_option("--speed", sspec.walker_speed, "walker speed (m/s)");
    simulate->add_option("--seed", sspec.seed, "random seed")->required();
    simulate->add_option("--missing", pspec.missing, "drop fraction [0,1]");
    simulate->add_option("--outliers", pspec.outliers, "outlier fraction [0,1]");
    simulate->add_option("--noise", pspec.noise_var, "noise variance as scene fraction");
    simulate->add_option("--conf", pspec.confidence, "emitted confidence");
    simulate->add_option("--out", sim_out, "output directory");

    // evaluate
    std::string eval_gt, eval_hyp, eval_out;
    CLI::App* evaluate = app.add_subcommand("evaluate", "CLEAR metrics for two trajectory CSVs");
    evaluate->add_option("gt", eval_gt, "ground-truth trajectory CSV")->required();
    evaluate->add_option("hyp", eval_hyp, "hypothesis trajectory CSV")->required();
    evaluate->add_option("--out", eval_out, "directory for report.txt / report.csv");

    // compare
    int cmp_walkers = 15, cmp_frames = 40, cmp_seeds = 20, cmp_jobs = 0;
    std::uint64_t cmp_seed = 0;
    std::string cmp_grid = "2,4,6,8,10", cmp_methods = "hungarian,mlh,lp1lev,lp", cmp_out = ".";
    ConfigCli cmp_cfg_cli;
    CLI::App* compare = app.add_subcommand("compare", "method sweep over a perturbation grid");
    compare->add_option("--walkers", cmp_walkers, "walkers per scenario");
    compare->add_option("--frames", cmp_frames, "frames per scenario");
    compare->add_option("--seeds", cmp_seeds, "number of seeded repetitions");
    compare->add_option("--seed", cmp_seed, "base seed")->required();
    compare->add_option("--missing-grid", cmp_grid, "missing percentages, e.g. 2,4,6,8,10");
    compare->add_option("--methods", cmp_methods, "subset of hungarian,mlh,lp1lev,lp");
    compare->add_option("--out", cmp_out, "output directory");
    compare->add_option("--jobs", cmp_jobs, "worker threads (default: hardware)");
    cmp_cfg_cli.attach(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve_lp->parsed()) return cmd_solve_lp(lp_path);
        if (solve_flow->parsed())
            return cmd_solve_flow(flow_path, flow_k, flow_split, flow_solver, flow_amount);
        if (track_cmd->parsed()) {
            config::RunConfig cfg = track_cfg_cli.resolve();
            if (track_method_opt->count()) cfg.method = track_method;
            if (track_solver_opt->count()) cfg.solver = track_solver;
            cfg.seed = track_seed;
            cfg.finalize();
            return cmd_track(track_input, track_out, cfg);
        }
        if (simulate->parsed()) {
            for (const std::string& g : split_list(sim_groups))
                sspec.group_sizes.push_back(std::stoi(g));
            pspec.seed = sspec.seed;
            return cmd_simulate(sspec, pspec, sim_out);
        }
        if (evaluate->parsed()) return cmd_evaluate(eval_gt, eval_hyp, eval_out);
        if (compare->parsed()) {
            const config::RunConfig cfg = cmp_cfg_cli.resolve();
            return cmd_compare(cmp_walkers, cmp_frames, cmp_seeds, cmp_seed, cmp_grid,
                               cmp_methods, cmp_out, cmp_jobs, cfg);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
