// Closed-loop navigation episodes and the five-scenario benchmark.
//
// Per control step the runner tracks the active reference with the LQR (or
// plays out a safe maneuver open loop), steps the vehicle model, and checks
// collisions; rendering and competency scoring happen on replanning cycles.
// Collisions are counted, not terminal: penetration is resolved by projecting
// the vehicle out along the minimum translation vector.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parce/competency.hpp"
#include "parce/control.hpp"
#include "parce/planner.hpp"
#include "parce/world.hpp"

namespace parce {

struct ScenarioSpec {
    int id = 0;
    std::string name;
    World world;
    VehicleState start;
    GoalSpec goal;
};

// Parses [world], [obstacle.N], [start], [goal] sections.
ScenarioSpec load_scenario(const std::string& path);

enum class Outcome { success, timeout };

struct EpisodeResult {
    Outcome outcome = Outcome::timeout;
    bool collided = false;
    double nav_time = 0.0;     // s, simulated; capped at the timeout limit
    double path_length = 0.0;  // m
    Variant variant = Variant::baseline;
    int scenario_id = 0;
    std::uint64_t seed = 0;
};

struct EpisodeConfig {
    DynamicsParams dynamics;
    CameraModel camera;
    PlannerConfig planner;
    LqrWeights lqr = LqrWeights::table_defaults();
    int replan_interval = 10;  // control steps between replans
};

// When set, the runner writes per-cycle planner diagnostics (CSV), overlay
// images (PPM) and the executed trajectory (CSV) under `dir`.
struct EpisodeLog {
    std::string dir;
    bool overlays = true;
};

EpisodeResult run_episode(const ScenarioSpec& scenario, Variant variant,
                          const CompetencyEstimator& estimator, const EpisodeConfig& cfg,
                          std::uint64_t seed, const EpisodeLog* log = nullptr);

struct BenchmarkCell {
    double success_rate = 0.0;    // percent
    double timeout_rate = 0.0;    // percent
    double collision_rate = 0.0;  // percent
    double mean_nav_time = 0.0;   // s, timeouts counted at the cap
    double mean_path_length = 0.0;  // m, successful trials only (NaN if none)
    int n_trials = 0;
    int n_success = 0;
};

struct BenchmarkTable {
    std::vector<Variant> variants;
    std::vector<int> scenario_ids;
    // cells[variant_index][scenario_index]
    std::vector<std::vector<BenchmarkCell>> cells;

    BenchmarkCell averaged(std::size_t variant_index) const;
};

// trials_per_cell episodes per (variant, scenario); trial starts are jittered
// deterministically from the trial seed.
BenchmarkTable run_benchmark(const std::vector<ScenarioSpec>& scenarios,
                             const std::vector<Variant>& variants, int trials_per_cell,
                             const CompetencyEstimator& estimator, const EpisodeConfig& cfg,
                             std::uint64_t base_seed, bool verbose = false);

void write_benchmark_csv(const BenchmarkTable& table, const std::vector<ScenarioSpec>& scenarios,
                         const std::string& dir);
void append_episode_csv(const EpisodeResult& result, const std::string& path);

// Scene overlay: candidate paths colored by min competency (red = 0 through
// green = 1), the selected path in blue. Candidates are re-rolled from the
// constant inputs recorded in the diagnostics.
Image draw_overlay(const Image& scene, const std::vector<CandidateDiag>& diags,
                   const CameraModel& cam, const VehicleState& state, const DynamicsParams& dyn,
                   int horizon);

}  // namespace parce
