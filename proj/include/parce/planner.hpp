// Sampling-based local planner. Samples constant-input action sequences,
// rolls them out through the vehicle model, removes candidates that leave the
// camera's field of view, and picks the goal-cost minimizer. Five variants
// layer competency awareness on top of that baseline, either by triggering a
// backup-and-turn safe maneuver or by pruning candidates whose projected
// footprint crosses low-competency image regions.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parce/camera.hpp"
#include "parce/competency.hpp"
#include "parce/dynamics.hpp"

namespace parce {

enum class Variant {
    baseline,
    overall_turning,
    regional_turning,
    regional_trajectory,
    both_turning,
    both_trajectory,
};

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);
bool variant_needs_overall(Variant v);
bool variant_needs_regional(Variant v);

struct PlannerConfig {
    int n_samples = 128;
    int horizon = 60;
    InputBounds bounds;
    double w_ori = 3.0;      // angle-from-goal cost
    double w_goal_x = 1.0;   // |x_goal - x_H| cost
    double w_goal_y = 1.5;   // |y_goal - y_H| cost
    double footprint_length = 0.9;  // m
    double footprint_width = 0.6;   // m
    Variant variant = Variant::baseline;
    double eta_overall = 0.8;
    double eta_regional = 0.8;
    // Safe maneuver shape.
    double backup_time = 1.0;   // s
    double turn_time = 1.0;     // s
    double backup_speed = 0.3;  // m/s, applied in reverse
    double turn_rate = 0.4;     // rad/s
    // Near-field check region: ground patch [0, near_field_range] ahead,
    // vehicle width widened by 50% on both flanks.
    double near_field_range = 2.0;
};

struct GoalSpec {
    double x = 0.0;
    double y = 0.0;
    double tolerance = 0.5;  // m
    double timeout = 90.0;   // s
};

enum class RejectReason { kept, fov, low_competency };

struct CandidateDiag {
    ControlInput input;
    double cost = 0.0;
    double min_competency = 1.0;  // 1.0 when no map or nothing projected
    RejectReason rejected = RejectReason::kept;
    bool selected = false;
};

struct PlanResult {
    enum class Kind { follow_path, safe_maneuver };
    Kind kind = Kind::follow_path;
    Trajectory reference;                // when follow_path
    std::vector<ControlInput> maneuver;  // when safe_maneuver
    std::vector<CandidateDiag> diagnostics;
};

// N constant (throttle, steer) pairs drawn uniformly from the bound box,
// each held for the whole horizon. Deterministic per seed.
std::vector<std::vector<ControlInput>> sample_action_sequences(const PlannerConfig& cfg,
                                                               std::uint64_t seed);

// Terminal-state cost: w_ori * wrap(atan2(goal - pos_H) - theta_H)^2
//                    + w_goal_x * |dx| + w_goal_y * |dy|.
// The orientation term is defined as zero when the terminal position is
// within the goal tolerance (the bearing is undefined at the goal).
double path_cost(const Trajectory& traj, const GoalSpec& goal, const PlannerConfig& cfg);

// A future position is in the field of view when it lies in front of the
// camera, inside the horizontal FOV (its image column is in bounds), and
// within the max view distance. Rows below the image bottom edge are the
// blind strip the vehicle is about to traverse and do not disqualify a path;
// ground points never project above the horizon row.
bool position_in_fov(const CameraModel& cam, const CameraPose& pose, const Vec2& p);

// Keeps trajectories whose every future position (k >= 1) stays in the FOV of
// the camera at the planning state.
std::vector<int> fov_filter(const std::vector<Trajectory>& trajs, const CameraModel& cam,
                            const VehicleState& state);

// Minimum regional-map value over the projected vehicle footprint (4 corners
// plus a 3x3 interior grid) at every step of the trajectory. Returns 1.0 and
// sets `vacuous` when no sample point projects into the image.
double min_traj_competency(const Trajectory& traj, const CompetencyRecord& rec,
                           const CameraModel& cam, const VehicleState& state,
                           const PlannerConfig& cfg, bool* vacuous = nullptr);

// Mean map competency over the image region covered by the near-field ground
// patch; true when that mean falls below eta_regional.
bool near_field_low_competency(const CompetencyRecord& rec, const CameraModel& cam,
                               const PlannerConfig& cfg, double eta_regional);

class Planner {
public:
    Planner(PlannerConfig cfg, DynamicsParams dyn, CameraModel cam)
        : cfg_(cfg), dyn_(dyn), cam_(cam) {}

    // `competency` may be null only for the baseline variant.
    PlanResult plan(const VehicleState& state, const GoalSpec& goal,
                    const CompetencyRecord* competency, std::uint64_t seed);

    // Backup-then-turn action sequence; turns toward the image half with the
    // higher mean competency (ties break left). Without a map the turn
    // direction alternates per invocation.
    std::vector<ControlInput> safe_maneuver(const CompetencyRecord* rec);

    const PlannerConfig& config() const { return cfg_; }

private:
    PlanResult best_path_plan(const VehicleState& state, const GoalSpec& goal,
                              const CompetencyRecord* rec, std::uint64_t seed,
                              bool prune_low_competency);

    PlannerConfig cfg_;
    DynamicsParams dyn_;
    CameraModel cam_;
    bool turn_left_next_ = true;  // alternation state for map-less maneuvers
};

}  // namespace parce
