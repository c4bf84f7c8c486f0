// Reference-tracking LQR on the time-varying linearization:
//   K_k = (R + B^T P_{k+1} B)^{-1} B^T P_{k+1} A_k
//   P_k = Q + K_k^T R K_k + (A_k - B K_k)^T P_{k+1} (A_k - B K_k),  P_H = Q
//   u_k = -K_k (x_k - x_k_ref) + u_k_ref
#pragma once

#include <span>
#include <vector>

#include "parce/dynamics.hpp"

namespace parce {

struct LqrWeights {
    StateMatrix Q;       // positive semidefinite diagonal
    Eigen::Matrix2d R;   // positive definite diagonal

    static LqrWeights table_defaults();  // Q = diag(1,1,2,0.5,0), R = diag(0.1,0.1)
};

struct GainSchedule {
    std::vector<Eigen::Matrix<double, 2, 5>> K;  // k = 0..H-1
    std::vector<StateMatrix> P;                  // k = 0..H, P[H] = Q
};

// Backward Riccati recursion over a per-step linearization sequence.
GainSchedule riccati_backward(std::span<const StateMatrix> A_seq, const InputMatrix& B,
                              const LqrWeights& weights);

// Gain schedule for tracking a reference trajectory: A_k is built from the
// reference state headings.
GainSchedule gains_for_reference(const Trajectory& ref, const DynamicsParams& params,
                                 const LqrWeights& weights);

// Feedback law with the heading error wrapped to (-pi, pi], clamped to bounds.
ControlInput track(const VehicleState& state, const VehicleState& ref_state,
                   const ControlInput& ref_input, const Eigen::Matrix<double, 2, 5>& K,
                   const InputBounds& bounds);

}  // namespace parce
