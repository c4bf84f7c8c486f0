// Discrete time-varying vehicle model: a Dubins-like unicycle with first-order
// lag on linear velocity and turn rate.
//
// State x = [x y theta v omega]^T, input u = [throttle steer]^T.
// One step:
//   x'     = x + dt*cos(theta_est)*v
//   y'     = y + dt*sin(theta_est)*v
//   theta' = theta + dt*omega
//   v'     = (1-alpha)*v + alpha*throttle
//   omega' = (1-beta)*omega + beta*steer
#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

namespace parce {

struct VehicleState {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double theta = 0.0;  // rad, normalized to (-pi, pi]
    double v = 0.0;      // m/s
    double omega = 0.0;  // rad/s

    Eigen::Matrix<double, 5, 1> vec() const {
        return (Eigen::Matrix<double, 5, 1>() << x, y, theta, v, omega).finished();
    }
    static VehicleState from_vec(const Eigen::Matrix<double, 5, 1>& v5) {
        return {v5[0], v5[1], v5[2], v5[3], v5[4]};
    }
};

struct ControlInput {
    double throttle = 0.0;  // desired linear velocity, m/s
    double steer = 0.0;     // desired turn rate, rad/s
};

struct InputBounds {
    ControlInput lo{0.0, -0.4};
    ControlInput hi{0.8, 0.4};

    ControlInput clamp(const ControlInput& u) const;
};

struct DynamicsParams {
    double dt = 0.1;     // s
    double alpha = 0.26; // linear velocity factor
    double beta = 0.35;  // turn rate factor
};

struct Trajectory {
    std::vector<VehicleState> states;  // length H+1
    std::vector<ControlInput> inputs;  // length H

    std::size_t horizon() const { return inputs.size(); }
};

using StateMatrix = Eigen::Matrix<double, 5, 5>;
using InputMatrix = Eigen::Matrix<double, 5, 2>;

// Maps an angle into (-pi, pi].
double normalize_angle(double a);

// Linearization about a heading estimate theta_est.
void linearize(double theta_est, const DynamicsParams& params, StateMatrix& A, InputMatrix& B);

// One step of the model, using the current state's heading as theta_est.
VehicleState step(const VehicleState& state, const ControlInput& input, const DynamicsParams& params);

// Multi-step propagation; each propagated state's heading feeds the next
// linearization.
Trajectory rollout(const VehicleState& state0, std::span<const ControlInput> inputs,
                   const DynamicsParams& params);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace parce
