#include "parce/control.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace parce {

LqrWeights LqrWeights::table_defaults() {
    LqrWeights w;
    w.Q = StateMatrix::Zero();
    w.Q.diagonal() << 1.0, 1.0, 2.0, 0.5, 0.0;
    w.R = Eigen::Matrix2d::Zero();
    w.R.diagonal() << 0.1, 0.1;
    return w;
}

GainSchedule riccati_backward(std::span<const StateMatrix> A_seq, const InputMatrix& B,
                              const LqrWeights& weights) {
    const std::size_t H = A_seq.size();
    GainSchedule sched;
    sched.K.resize(H);
    sched.P.resize(H + 1);
    sched.P[H] = weights.Q;
    for (std::size_t k = H; k-- > 0;) {
        const StateMatrix& P_next = sched.P[k + 1];
        const Eigen::Matrix2d M = weights.R + B.transpose() * P_next * B;
        if (std::abs(M.determinant()) < 1e-300)
            throw std::runtime_error("riccati_backward: singular R + B'PB");
        sched.K[k] = M.inverse() * B.transpose() * P_next * A_seq[k];
        const StateMatrix closed = A_seq[k] - B * sched.K[k];
        sched.P[k] = weights.Q + sched.K[k].transpose() * weights.R * sched.K[k] +
                     closed.transpose() * P_next * closed;
    }
    return sched;
}

GainSchedule gains_for_reference(const Trajectory& ref, const DynamicsParams& params,
                                 const LqrWeights& weights) {
    std::vector<StateMatrix> A_seq(ref.horizon());
    InputMatrix B;
    for (std::size_t k = 0; k < ref.horizon(); ++k) linearize(ref.states[k].theta, params, A_seq[k], B);
    return riccati_backward(A_seq, B, weights);
}

ControlInput track(const VehicleState& state, const VehicleState& ref_state,
                   const ControlInput& ref_input, const Eigen::Matrix<double, 2, 5>& K,
                   const InputBounds& bounds) {
    Eigen::Matrix<double, 5, 1> err = state.vec() - ref_state.vec();
    err[2] = normalize_angle(err[2]);
    const Eigen::Vector2d u =
        Eigen::Vector2d(ref_input.throttle, ref_input.steer) - K * err;
    return bounds.clamp({u[0], u[1]});
}

}  // namespace parce
