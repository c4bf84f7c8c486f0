#include "parce/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace parce {

ControlInput InputBounds::clamp(const ControlInput& u) const {
    return {std::clamp(u.throttle, lo.throttle, hi.throttle),
            std::clamp(u.steer, lo.steer, hi.steer)};
}

double normalize_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a <= 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

void linearize(double theta_est, const DynamicsParams& p, StateMatrix& A, InputMatrix& B) {
    A.setIdentity();
    A(0, 3) = p.dt * std::cos(theta_est);
    A(1, 3) = p.dt * std::sin(theta_est);
    A(2, 4) = p.dt;
    A(3, 3) = 1.0 - p.alpha;
    A(4, 4) = 1.0 - p.beta;
    B.setZero();
    B(3, 0) = p.alpha;
    B(4, 1) = p.beta;
}

VehicleState step(const VehicleState& state, const ControlInput& input, const DynamicsParams& params) {
    StateMatrix A;
    InputMatrix B;
    linearize(state.theta, params, A, B);
    const Eigen::Matrix<double, 5, 1> next =
        A * state.vec() + B * Eigen::Vector2d(input.throttle, input.steer);
    VehicleState out = VehicleState::from_vec(next);
    out.theta = normalize_angle(out.theta);
    return out;
}

Trajectory rollout(const VehicleState& state0, std::span<const ControlInput> inputs,
                   const DynamicsParams& params) {
    if (inputs.empty()) throw std::invalid_argument("rollout: empty input sequence");
    Trajectory traj;
    traj.states.reserve(inputs.size() + 1);
    traj.inputs.assign(inputs.begin(), inputs.end());
    traj.states.push_back(state0);
    for (const ControlInput& u : inputs) traj.states.push_back(step(traj.states.back(), u, params));
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "k,x,y,theta,v,omega,throttle,steer\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const VehicleState& s = traj.states[k];
        out << k << ',' << s.x << ',' << s.y << ',' << s.theta << ',' << s.v << ',' << s.omega;
        if (k < traj.inputs.size())
            out << ',' << traj.inputs[k].throttle << ',' << traj.inputs[k].steer;
        else
            out << ",,";
        out << '\n';
    }
}

}  // namespace parce
