#include "parce/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parce/rng.hpp"

namespace parce {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::baseline: return "baseline";
        case Variant::overall_turning: return "overall_turning";
        case Variant::regional_turning: return "regional_turning";
        case Variant::regional_trajectory: return "regional_trajectory";
        case Variant::both_turning: return "both_turning";
        case Variant::both_trajectory: return "both_trajectory";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : {Variant::baseline, Variant::overall_turning, Variant::regional_turning,
                      Variant::regional_trajectory, Variant::both_turning, Variant::both_trajectory})
        if (variant_name(v) == name) return v;
    throw std::invalid_argument("unknown planner variant: " + name);
}

bool variant_needs_overall(Variant v) {
    return v == Variant::overall_turning || v == Variant::both_turning || v == Variant::both_trajectory;
}

bool variant_needs_regional(Variant v) {
    return v == Variant::regional_turning || v == Variant::regional_trajectory ||
           v == Variant::both_turning || v == Variant::both_trajectory;
}

std::vector<std::vector<ControlInput>> sample_action_sequences(const PlannerConfig& cfg,
                                                               std::uint64_t seed) {
    if (cfg.n_samples < 1 || cfg.horizon < 1)
        throw std::invalid_argument("sample_action_sequences: bad config");
    Rng rng(hash_combine(seed, 0x5a3eULL));
    std::vector<std::vector<ControlInput>> out(cfg.n_samples);
    for (auto& seq : out) {
        const ControlInput u{rng.uniform(cfg.bounds.lo.throttle, cfg.bounds.hi.throttle),
                             rng.uniform(cfg.bounds.lo.steer, cfg.bounds.hi.steer)};
        seq.assign(cfg.horizon, u);
    }
    return out;
}

double path_cost(const Trajectory& traj, const GoalSpec& goal, const PlannerConfig& cfg) {
    if (traj.states.empty()) throw std::invalid_argument("path_cost: empty trajectory");
    const VehicleState& end = traj.states.back();
    const double dx = goal.x - end.x;
    const double dy = goal.y - end.y;
    double ori = 0.0;
    if (std::hypot(dx, dy) > goal.tolerance) {
        const double err = normalize_angle(std::atan2(dy, dx) - end.theta);
        ori = err * err;
    }
    return cfg.w_ori * ori + cfg.w_goal_x * std::abs(dx) + cfg.w_goal_y * std::abs(dy);
}

bool position_in_fov(const CameraModel& cam, const CameraPose& pose, const Vec2& p) {
    const PixelProjection proj = project_ground_point(cam, pose, p);
    if (proj.depth <= 0.0) return false;
    if (proj.u < 0.0 || proj.u >= cam.image_width) return false;
    const double dist = (p - Vec2(pose.position.x(), pose.position.y())).norm();
    return dist <= cam.max_view_distance;
}

std::vector<int> fov_filter(const std::vector<Trajectory>& trajs, const CameraModel& cam,
                            const VehicleState& state) {
    const CameraPose pose = CameraPose::from_state(cam, state);
    std::vector<int> kept;
    for (int i = 0; i < static_cast<int>(trajs.size()); ++i) {
        bool ok = true;
        for (std::size_t k = 1; k < trajs[i].states.size() && ok; ++k)
            ok = position_in_fov(cam, pose, {trajs[i].states[k].x, trajs[i].states[k].y});
        if (ok) kept.push_back(i);
    }
    return kept;
}

namespace {

// Footprint sample points in the vehicle frame: 4 corners + 3x3 interior grid.
std::vector<Vec2> footprint_points(double length, double width) {
    std::vector<Vec2> pts;
    pts.reserve(13);
    const double hl = 0.5 * length, hw = 0.5 * width;
    pts.emplace_back(hl, hw);
    pts.emplace_back(hl, -hw);
    pts.emplace_back(-hl, hw);
    pts.emplace_back(-hl, -hw);
    for (double fx : {-0.5, 0.0, 0.5})
        for (double fy : {-0.5, 0.0, 0.5}) pts.emplace_back(fx * hl, fy * hw);
    return pts;
}

}  // namespace

double min_traj_competency(const Trajectory& traj, const CompetencyRecord& rec,
                           const CameraModel& cam, const VehicleState& state,
                           const PlannerConfig& cfg, bool* vacuous) {
    if (!rec.has_regional()) throw std::invalid_argument("min_traj_competency: record has no map");
    const CameraPose pose = CameraPose::from_state(cam, state);
    const std::vector<Vec2> local = footprint_points(cfg.footprint_length, cfg.footprint_width);
    double best = 1.0;
    bool any = false;
    for (const VehicleState& s : traj.states) {
        const double c = std::cos(s.theta), sn = std::sin(s.theta);
        for (const Vec2& l : local) {
            const Vec2 world(s.x + c * l.x() - sn * l.y(), s.y + sn * l.x() + c * l.y());
            const PixelProjection proj = project_ground_point(cam, pose, world);
            if (!proj.in_view) continue;
            any = true;
            const int px = std::min(static_cast<int>(proj.u), rec.map_width - 1);
            const int py = std::min(static_cast<int>(proj.v), rec.map_height - 1);
            best = std::min(best, rec.regional_at(px, py));
        }
    }
    if (vacuous) *vacuous = !any;
    return best;
}

bool near_field_low_competency(const CompetencyRecord& rec, const CameraModel& cam,
                               const PlannerConfig& cfg, double eta_regional) {
    if (!rec.has_regional()) throw std::invalid_argument("near_field_low_competency: no map");
    // Image region covered by the ground patch [0, range] ahead of the vehicle
    // and 1.5x the vehicle width across, found by inverse-projecting pixel
    // centers. The patch is expressed in the vehicle frame, so the identity
    // pose suffices.
    VehicleState origin{};
    const CameraPose pose = CameraPose::from_state(cam, origin);
    const double half_width = 0.75 * cfg.footprint_width;
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < rec.map_height; ++y)
        for (int x = 0; x < rec.map_width; ++x) {
            const GroundHit hit = pixel_to_ground(cam, pose, x + 0.5, y + 0.5);
            if (!hit.hit) continue;
            if (hit.point.x() < 0.0 || hit.point.x() > cfg.near_field_range) continue;
            if (std::abs(hit.point.y()) > half_width) continue;
            sum += rec.regional_at(x, y);
            ++n;
        }
    if (n == 0) return false;
    return sum / static_cast<double>(n) < eta_regional;
}

std::vector<ControlInput> Planner::safe_maneuver(const CompetencyRecord* rec) {
    bool turn_left;
    if (rec != nullptr && rec->has_regional()) {
        double left = 0.0, right = 0.0;
        std::size_t nl = 0, nr = 0;
        for (int y = 0; y < rec->map_height; ++y)
            for (int x = 0; x < rec->map_width; ++x) {
                if (x < rec->map_width / 2) {
                    left += rec->regional_at(x, y);
                    ++nl;
                } else {
                    right += rec->regional_at(x, y);
                    ++nr;
                }
            }
        // Image left is the vehicle's left; ties break left.
        turn_left = (left / nl) >= (right / nr);
    } else {
        turn_left = turn_left_next_;
        turn_left_next_ = !turn_left_next_;
    }
    const int n_backup = static_cast<int>(std::lround(cfg_.backup_time / dyn_.dt));
    const int n_turn = static_cast<int>(std::lround(cfg_.turn_time / dyn_.dt));
    std::vector<ControlInput> seq;
    seq.reserve(n_backup + n_turn);
    for (int i = 0; i < n_backup; ++i) seq.push_back({-cfg_.backup_speed, 0.0});
    const double s = turn_left ? cfg_.turn_rate : -cfg_.turn_rate;
    for (int i = 0; i < n_turn; ++i) seq.push_back({0.0, s});
    return seq;
}

PlanResult Planner::best_path_plan(const VehicleState& state, const GoalSpec& goal,
                                   const CompetencyRecord* rec, std::uint64_t seed,
                                   bool prune_low_competency) {
    const auto sequences = sample_action_sequences(cfg_, seed);
    std::vector<Trajectory> trajs;
    trajs.reserve(sequences.size());
    for (const auto& seq : sequences) trajs.push_back(rollout(state, seq, dyn_));

    PlanResult result;
    result.diagnostics.resize(trajs.size());
    const bool have_map = rec != nullptr && rec->has_regional();
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        CandidateDiag& d = result.diagnostics[i];
        d.input = sequences[i][0];
        d.cost = path_cost(trajs[i], goal, cfg_);
        d.min_competency =
            have_map ? min_traj_competency(trajs[i], *rec, cam_, state, cfg_) : 1.0;
        d.rejected = RejectReason::fov;  // until proven kept
    }

    int best = -1;
    for (int idx : fov_filter(trajs, cam_, state)) {
        CandidateDiag& d = result.diagnostics[idx];
        if (prune_low_competency && d.min_competency < cfg_.eta_regional) {
            d.rejected = RejectReason::low_competency;
            continue;
        }
        d.rejected = RejectReason::kept;
        if (best < 0 || d.cost < result.diagnostics[best].cost) best = idx;
    }

    if (best < 0) {
        result.kind = PlanResult::Kind::safe_maneuver;
        result.maneuver = safe_maneuver(rec);
        return result;
    }
    result.kind = PlanResult::Kind::follow_path;
    result.diagnostics[best].selected = true;
    result.reference = std::move(trajs[best]);
    return result;
}

PlanResult Planner::plan(const VehicleState& state, const GoalSpec& goal,
                         const CompetencyRecord* competency, std::uint64_t seed) {
    const Variant v = cfg_.variant;
    if (variant_needs_overall(v) && competency == nullptr)
        throw std::invalid_argument("plan: variant needs an overall competency score");
    if (variant_needs_regional(v) && (competency == nullptr || !competency->has_regional()))
        throw std::invalid_argument("plan: variant needs a regional competency map");

    auto turn_response = [&]() {
        PlanResult r;
        r.kind = PlanResult::Kind::safe_maneuver;
        r.maneuver = safe_maneuver(competency);
        return r;
    };

    switch (v) {
        case Variant::baseline:
            return best_path_plan(state, goal, competency, seed, false);
        case Variant::overall_turning:
            if (competency->overall < cfg_.eta_overall) return turn_response();
            return best_path_plan(state, goal, competency, seed, false);
        case Variant::regional_turning:
            if (near_field_low_competency(*competency, cam_, cfg_, cfg_.eta_regional))
                return turn_response();
            return best_path_plan(state, goal, competency, seed, false);
        case Variant::regional_trajectory:
            return best_path_plan(state, goal, competency, seed, true);
        case Variant::both_turning:
            if (competency->overall < cfg_.eta_overall &&
                near_field_low_competency(*competency, cam_, cfg_, cfg_.eta_regional))
                return turn_response();
            return best_path_plan(state, goal, competency, seed, false);
        case Variant::both_trajectory:
            if (competency->overall >= cfg_.eta_overall)
                return best_path_plan(state, goal, competency, seed, false);
            return best_path_plan(state, goal, competency, seed, true);
    }
    throw std::logic_error("plan: unhandled variant");
}

}  // namespace parce
