#pragma once
/**
 * @file trigger.hpp
 * @brief Event-triggered transmission: detector, trigger-matrix synthesis and closed-loop simulation.
 */

#include "lpvet/synthesis.hpp"

namespace lpvet {

struct TriggerConfig {
    Mat Psi1, Psi2;
    double v = 0.01;
    double mu = 40.0;
    double eps2 = 0.001;
    double beta2 = 0.1;

    void validate() const;
};

/// Zero-order-hold state of the controller-to-actuator channel.
struct EtState {
    Vec x_hat, p_hat, u_held;
    int k_hat = 0;
};

/// B_d0..B_dl read off (X+ - W) G^+ (or X+ G^+ when the noise record is not used).
AffineMatrixFunction extract_input_matrix(const ExperimentData& d, bool subtract_w = true);

/// nu = B(p)K(p)(x_hat - x) + B(p)(K(p_hat) - K(p)) x_hat
Vec compute_nu(const AffineMatrixFunction& B, const AffineMatrixFunction& K, const Vec& x, const Vec& p,
               const EtState& et);

/// nu' Psi1 nu >= x' Psi2 x + v
bool trigger_fire(const Vec& nu, const Vec& x, const TriggerConfig& cfg);

struct TriggerDesign {
    double mu = 40.0;
    double eps2 = 0.001;
    double beta2 = 0.1;
    double delta = 0.1;
    double margin = 1e-7;
    bool w_known = false;

    void validate() const;
};

/// The program is posed in S_i = P Psi_i P; Psi_i = P^{-1} S_i P^{-1} is recovered after the solve.
struct TriggerProgram {
    sdp::Program prog;
    sdp::VariableHandle S1, S2, Xi;
    Mat P;
    fbsp::Layout layout;
    TriggerDesign design;
};

/// Psi1, Psi2 and the multiplier for fixed P and F_Q (layout channels n, n, T).
TriggerProgram build_trigger_program(const Mat& P, const Mat& FQ, const ExperimentData& data,
                                     const SchedulingBox& box, const TriggerDesign& design);

struct TriggerSolution {
    sdp::Status status = sdp::Status::NumericalFailure;
    Mat Psi1, Psi2, Xi;
    bool plug_in_ok = false;
    std::string plug_in_failure;
    sdp::Solution raw;
};

TriggerSolution solve_trigger(const TriggerProgram& tp, const sdp::SolverOptions& opts = {});

/// Closed loop with the detector in the loop; k = 0 always transmits.
SimulationTrace simulate_event_triggered(const LpvSystem& sys, const AffineMatrixFunction& K,
                                         const TriggerConfig& cfg, const AffineMatrixFunction& B_est,
                                         const SignalLaw& schedule, const SignalLaw& noise, const Vec& x0, int N);

struct DecreaseReport {
    bool pass = true;
    int first_violation = -1;
    double worst_slack = 0.0;  // max over steps of lhs - rhs
};

/// V(x+) - V(x) <= -beta2 V(x) + sigma lambda_max(P^{-1}) |nu + w|^2 + v/mu at every step.
DecreaseReport practical_decrease_check(const SimulationTrace& tr, const Mat& P, const TriggerConfig& cfg,
                                        double sigma, double slack = 1e-8);

/// Steps where a transmission was skipped although the recorded pair violates the guard.
std::vector<int> detector_violations(const SimulationTrace& tr, const TriggerConfig& cfg);

struct InterEventStats {
    int count = 0;
    double mean_interval = 0.0;
    int max_interval = 0;
};

InterEventStats inter_event_stats(const SimulationTrace& tr);

/// c0 = c1 / (mu (1 - exp(-beta2/2))), c1 = 1 / sqrt(lambda_min(P^{-1}))
double iss_practical_constant(const Mat& P, double mu, double beta2);

}  // namespace lpvet
