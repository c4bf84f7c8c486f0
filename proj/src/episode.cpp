#include "parce/episode.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "parce/ini.hpp"
#include "parce/rng.hpp"

namespace fs = std::filesystem;

namespace parce {

namespace {

Polygon parse_polygon(const std::string& text) {
    Polygon poly;
    std::istringstream ss(text);
    std::string vertex;
    while (std::getline(ss, vertex, ';')) {
        std::istringstream vs(vertex);
        std::string xs, ys;
        if (!std::getline(vs, xs, ',') || !std::getline(vs, ys))
            throw std::runtime_error("bad polygon vertex: " + vertex);
        poly.emplace_back(std::stod(xs), std::stod(ys));
    }
    if (poly.size() < 3) throw std::runtime_error("polygon needs at least 3 vertices");
    if (polygon_area(poly) <= 0.0) throw std::runtime_error("degenerate obstacle polygon");
    return poly;
}

}  // namespace

ScenarioSpec load_scenario(const std::string& path) {
    const Ini ini = Ini::from_file(path);
    ScenarioSpec spec;
    spec.id = static_cast<int>(ini.get_int("world", "scenario_id", 0));
    spec.name = ini.get_str("world", "name", fs::path(path).stem().string());
    spec.world.x_min = ini.get_double("world", "x_min", -2.0);
    spec.world.x_max = ini.get_double("world", "x_max", 18.0);
    spec.world.y_min = ini.get_double("world", "y_min", -10.0);
    spec.world.y_max = ini.get_double("world", "y_max", 10.0);
    spec.world.seed = static_cast<std::uint64_t>(ini.get_int("world", "seed", 0));
    spec.world.uniform_class = static_cast<int>(ini.get_int("world", "uniform_class", -1));
    spec.world.field_scale = ini.get_double("world", "field_scale", 0.12);

    for (const std::string& sec : ini.sections_with_prefix("obstacle.")) {
        Obstacle ob;
        const std::string kind = ini.get_str(sec, "kind", "unfamiliar");
        if (kind == "unfamiliar")
            ob.kind = TextureKind::unfamiliar;
        else if (kind == "familiar")
            ob.kind = TextureKind::familiar;
        else
            throw std::runtime_error("unknown obstacle kind: " + kind);
        ob.texture_seed = static_cast<std::uint64_t>(ini.get_int(sec, "seed", 0));
        ob.footprint = parse_polygon(ini.get_str(sec, "polygon"));
        spec.world.obstacles.push_back(std::move(ob));
    }

    spec.start.x = ini.get_double("start", "x", 0.0);
    spec.start.y = ini.get_double("start", "y", 0.0);
    spec.start.theta = ini.get_double("start", "theta", 0.0);
    spec.goal.x = ini.get_double("goal", "x");
    spec.goal.y = ini.get_double("goal", "y");
    spec.goal.tolerance = ini.get_double("goal", "tolerance", 0.5);
    spec.goal.timeout = ini.get_double("goal", "timeout", 90.0);
    return spec;
}

namespace {

struct LogState {
    std::ofstream diag_csv;
    int cycle = 0;
    Trajectory executed;
};

void log_cycle(LogState& ls, const EpisodeLog& log, const PlanResult& plan, const Image& scene,
               const CameraModel& cam, const VehicleState& state, const DynamicsParams& dyn,
               int horizon) {
    for (std::size_t i = 0; i < plan.diagnostics.size(); ++i) {
        const CandidateDiag& d = plan.diagnostics[i];
        const char* reason = d.rejected == RejectReason::kept
                                 ? "kept"
                                 : (d.rejected == RejectReason::fov ? "fov" : "low_competency");
        ls.diag_csv << ls.cycle << ',' << i << ',' << d.input.throttle << ',' << d.input.steer << ','
                    << d.cost << ',' << d.min_competency << ',' << reason << ',' << (d.selected ? 1 : 0)
                    << '\n';
    }
    if (log.overlays && !plan.diagnostics.empty()) {
        const Image overlay = draw_overlay(scene, plan.diagnostics, cam, state, dyn, horizon);
        std::ostringstream name;
        name << "overlay_" << ls.cycle << ".ppm";
        write_ppm(overlay, (fs::path(log.dir) / name.str()).string());
    }
    ++ls.cycle;
}

}  // namespace

EpisodeResult run_episode(const ScenarioSpec& scenario, Variant variant,
                          const CompetencyEstimator& estimator, const EpisodeConfig& cfg,
                          std::uint64_t seed, const EpisodeLog* log) {
    EpisodeResult result;
    result.variant = variant;
    result.scenario_id = scenario.id;
    result.seed = seed;

    PlannerConfig pcfg = cfg.planner;
    pcfg.variant = variant;
    Planner planner(pcfg, cfg.dynamics, cfg.camera);
    const std::vector<std::uint8_t> sky = sky_mask(cfg.camera);

    std::optional<LogState> ls;
    if (log != nullptr) {
        fs::create_directories(log->dir);
        ls.emplace();
        ls->diag_csv.open(fs::path(log->dir) / "diagnostics.csv");
        ls->diag_csv << "cycle,candidate,throttle,steer,cost,min_competency,rejected,selected\n";
    }

    const bool want_regional = variant_needs_regional(variant);
    const bool want_scoring = want_regional || variant_needs_overall(variant);

    VehicleState state = scenario.start;
    Trajectory reference;
    GainSchedule gains;
    std::size_t ref_idx = 0;
    std::vector<ControlInput> maneuver;
    std::size_t maneuver_idx = 0;
    int steps_since_plan = 0;
    bool have_plan = false;

    const auto max_steps = static_cast<long>(std::ceil(scenario.goal.timeout / cfg.dynamics.dt));
    auto at_goal = [&](const VehicleState& s) {
        return std::hypot(scenario.goal.x - s.x, scenario.goal.y - s.y) <= scenario.goal.tolerance;
    };

    result.outcome = Outcome::timeout;
    result.nav_time = scenario.goal.timeout;
    if (ls) ls->executed.states.push_back(state);

    for (long step_i = 0; step_i < max_steps; ++step_i) {
        ControlInput u;
        if (maneuver_idx < maneuver.size()) {
            // Safe maneuvers run open loop and may exceed the sampling bounds
            // (reverse motion).
            u = maneuver[maneuver_idx++];
        } else {
            const bool ref_exhausted = !have_plan || ref_idx >= reference.horizon();
            if (ref_exhausted || steps_since_plan >= cfg.replan_interval) {
                const RenderOutput scene = render_camera(scenario.world, state, cfg.camera);
                CompetencyRecord record;
                if (want_scoring) record = estimator.score(scene.image, sky, want_regional);
                const std::uint64_t plan_seed = hash_combine(seed, static_cast<std::uint64_t>(step_i));
                PlanResult plan = planner.plan(state, scenario.goal,
                                               want_scoring ? &record : nullptr, plan_seed);
                if (ls) log_cycle(*ls, *log, plan, scene.image, cfg.camera, state, cfg.dynamics,
                                  pcfg.horizon);
                steps_since_plan = 0;
                if (plan.kind == PlanResult::Kind::safe_maneuver) {
                    maneuver = std::move(plan.maneuver);
                    maneuver_idx = 0;
                    have_plan = false;
                    u = maneuver[maneuver_idx++];
                } else {
                    reference = std::move(plan.reference);
                    gains = gains_for_reference(reference, cfg.dynamics, cfg.lqr);
                    ref_idx = 0;
                    have_plan = true;
                }
            }
            if (maneuver_idx >= maneuver.size() && have_plan) {
                u = track(state, reference.states[ref_idx], reference.inputs[ref_idx],
                          gains.K[ref_idx], pcfg.bounds);
                ++ref_idx;
            }
        }

        const VehicleState prev = state;
        state = step(state, u, cfg.dynamics);
        ++steps_since_plan;
        result.path_length += std::hypot(state.x - prev.x, state.y - prev.y);

        if (collision_query(scenario.world, state, pcfg.footprint_length, pcfg.footprint_width)) {
            result.collided = true;
            if (const auto mtv =
                    collision_mtv(scenario.world, state, pcfg.footprint_length, pcfg.footprint_width)) {
                state.x += mtv->x();
                state.y += mtv->y();
            }
        }
        if (ls) ls->executed.states.push_back(state), ls->executed.inputs.push_back(u);

        if (at_goal(state)) {
            result.outcome = Outcome::success;
            result.nav_time = static_cast<double>(step_i + 1) * cfg.dynamics.dt;
            break;
        }
    }

    if (ls) write_trajectory_csv(ls->executed, (fs::path(log->dir) / "trajectory.csv").string());
    return result;
}

BenchmarkCell BenchmarkTable::averaged(std::size_t variant_index) const {
    BenchmarkCell avg;
    int path_cells = 0;
    for (const BenchmarkCell& c : cells[variant_index]) {
        avg.success_rate += c.success_rate;
        avg.timeout_rate += c.timeout_rate;
        avg.collision_rate += c.collision_rate;
        avg.mean_nav_time += c.mean_nav_time;
        if (c.n_success > 0) {
            avg.mean_path_length += c.mean_path_length;
            ++path_cells;
        }
        avg.n_trials += c.n_trials;
        avg.n_success += c.n_success;
    }
    const auto n = static_cast<double>(cells[variant_index].size());
    avg.success_rate /= n;
    avg.timeout_rate /= n;
    avg.collision_rate /= n;
    avg.mean_nav_time /= n;
    avg.mean_path_length =
        path_cells > 0 ? avg.mean_path_length / path_cells : std::nan("");
    return avg;
}

BenchmarkTable run_benchmark(const std::vector<ScenarioSpec>& scenarios,
                             const std::vector<Variant>& variants, int trials_per_cell,
                             const CompetencyEstimator& estimator, const EpisodeConfig& cfg,
                             std::uint64_t base_seed, bool verbose) {
    BenchmarkTable table;
    table.variants = variants;
    for (const ScenarioSpec& s : scenarios) table.scenario_ids.push_back(s.id);
    table.cells.assign(variants.size(), std::vector<BenchmarkCell>(scenarios.size()));

    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        for (std::size_t si = 0; si < scenarios.size(); ++si) {
            BenchmarkCell& cell = table.cells[vi][si];
            cell.n_trials = trials_per_cell;
            double nav_sum = 0.0, path_sum = 0.0;
            int collisions = 0;
            for (int trial = 0; trial < trials_per_cell; ++trial) {
                const std::uint64_t trial_seed =
                    hash_combine(base_seed, hash_combine(scenarios[si].id, trial));
                // Jitter the start pose so trials are distinct runs.
                ScenarioSpec s = scenarios[si];
                Rng jitter(hash_combine(trial_seed, 0x1a7eULL));
                s.start.x += jitter.uniform(-0.25, 0.25);
                s.start.y += jitter.uniform(-0.25, 0.25);
                s.start.theta = normalize_angle(s.start.theta + jitter.uniform(-0.1, 0.1));

                const EpisodeResult r =
                    run_episode(s, variants[vi], estimator, cfg, trial_seed, nullptr);
                if (r.outcome == Outcome::success) {
                    ++cell.n_success;
                    path_sum += r.path_length;
                }
                if (r.collided) ++collisions;
                nav_sum += r.nav_time;
                if (verbose)
                    std::cout << variant_name(variants[vi]) << " scenario " << scenarios[si].id
                              << " trial " << trial << ": "
                              << (r.outcome == Outcome::success ? "success" : "timeout")
                              << (r.collided ? " (collided)" : "") << " t=" << r.nav_time
                              << "s len=" << r.path_length << "m\n";
            }
            cell.success_rate = 100.0 * cell.n_success / trials_per_cell;
            cell.timeout_rate = 100.0 - cell.success_rate;
            cell.collision_rate = 100.0 * collisions / trials_per_cell;
            cell.mean_nav_time = nav_sum / trials_per_cell;
            cell.mean_path_length =
                cell.n_success > 0 ? path_sum / cell.n_success : std::nan("");
        }
    }
    return table;
}

namespace {

void write_cell_row(std::ofstream& out, const std::string& label, const BenchmarkCell& c) {
    out << label << ',' << c.success_rate << ',' << c.timeout_rate << ',' << c.collision_rate << ','
        << c.mean_nav_time << ',';
    if (c.n_success > 0 || !std::isnan(c.mean_path_length))
        out << c.mean_path_length;
    else
        out << "--";
    out << '\n';
}

}  // namespace

void write_benchmark_csv(const BenchmarkTable& table, const std::vector<ScenarioSpec>& scenarios,
                         const std::string& dir) {
    fs::create_directories(dir);
    for (std::size_t si = 0; si < scenarios.size(); ++si) {
        std::ofstream out(fs::path(dir) / ("scenario_" + std::to_string(scenarios[si].id) + ".csv"));
        out << "# scenario " << scenarios[si].id << ": " << scenarios[si].name
            << " (desk-scale analog)\n";
        out << "variant,success_rate,timeout_rate,collision_rate,mean_nav_time,mean_path_length\n";
        for (std::size_t vi = 0; vi < table.variants.size(); ++vi)
            write_cell_row(out, variant_name(table.variants[vi]), table.cells[vi][si]);
    }
    std::ofstream out(fs::path(dir) / "summary.csv");
    out << "# averaged over scenarios\n";
    out << "variant,success_rate,timeout_rate,collision_rate,mean_nav_time,mean_path_length\n";
    for (std::size_t vi = 0; vi < table.variants.size(); ++vi)
        write_cell_row(out, variant_name(table.variants[vi]), table.averaged(vi));
}

void append_episode_csv(const EpisodeResult& result, const std::string& path) {
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    if (fresh) out << "scenario,variant,seed,outcome,collided,nav_time,path_length\n";
    out << result.scenario_id << ',' << variant_name(result.variant) << ',' << result.seed << ','
        << (result.outcome == Outcome::success ? "success" : "timeout") << ','
        << (result.collided ? 1 : 0) << ',' << result.nav_time << ',' << result.path_length << '\n';
}

namespace {

void draw_path(Image& img, const Trajectory& traj, const CameraModel& cam, const CameraPose& pose,
               double r, double g, double b) {
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
        const PixelProjection p =
            project_ground_point(cam, pose, {traj.states[k].x, traj.states[k].y});
        if (!p.in_view) continue;
        const int x = std::min(static_cast<int>(p.u), img.width - 1);
        const int y = std::min(static_cast<int>(p.v), img.height - 1);
        img.set(x, y, r, g, b);
    }
}

}  // namespace

Image draw_overlay(const Image& scene, const std::vector<CandidateDiag>& diags,
                   const CameraModel& cam, const VehicleState& state, const DynamicsParams& dyn,
                   int horizon) {
    Image out = scene;
    const CameraPose pose = CameraPose::from_state(cam, state);
    const CandidateDiag* selected = nullptr;
    for (const CandidateDiag& d : diags) {
        if (d.selected) {
            selected = &d;
            continue;
        }
        if (d.rejected == RejectReason::fov) continue;
        const std::vector<ControlInput> seq(horizon, d.input);
        // Competency colormap: red (0) to green (1).
        draw_path(out, rollout(state, seq, dyn), cam, pose, 1.0 - d.min_competency,
                  d.min_competency, 0.05);
    }
    if (selected != nullptr) {
        const std::vector<ControlInput> seq(horizon, selected->input);
        draw_path(out, rollout(state, seq, dyn), cam, pose, 0.1, 0.4, 1.0);
    }
    return out;
}

}  // namespace parce
