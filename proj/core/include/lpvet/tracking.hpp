#pragma once
/**
 * @file tracking.hpp
 * @brief Integral-compensator augmentation, reference generators and event-triggered tracking.
 */

#include "lpvet/trigger.hpp"

namespace lpvet {

/// psi = Col(x, chi), chi+ = chi + y - r. The augmented plant keeps the base output y.
struct AugmentedSystem {
    LpvSystem base;
    LpvSystem plant;  // A-hat, B-hat, C-hat = [C 0], D-hat = D
    Mat E;            // Blkdiag(I_n, -I_r)
    int nbar = 0;

    const AffineMatrixFunction& A() const { return plant.A; }
    const AffineMatrixFunction& B() const { return plant.B; }
};

AugmentedSystem augment_system(const LpvSystem& sys);

int min_data_length_aug(int nbar, int m, int ell);

enum class ReferenceKind { Sinusoid, Square, Circle, Figure8, Custom };

struct ReferenceSignal {
    ReferenceKind kind = ReferenceKind::Custom;
    double amplitude = 1.0;  // radius for circle and figure-8
    double period = 1.0;     // samples per period
    std::vector<Vec> samples;
    int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
    double max_norm() const;
};

ReferenceKind parse_reference_kind(const std::string& s);
const char* to_string(ReferenceKind k);

/// N+1 samples; period is in samples.
ReferenceSignal make_reference(ReferenceKind kind, double amplitude, double period, int N);

/// Smallest two-decimal value not below |(delta, max_k |r_k|)|.
double default_delta_hat(double delta, const ReferenceSignal& ref);

/// Open-loop experiment on the augmented state with the reference folded into the perturbation.
ExperimentData collect_aug(const AugmentedSystem& aug, int T, const SignalLaw& input_law,
                           const SignalLaw& schedule_law, const SignalLaw& noise_law, const ReferenceSignal& ref,
                           const Vec& psi0, double delta_hat);

SynthesisProgram build_tracking_synthesis_program(const ExperimentData& aug_data, const SchedulingBox& box,
                                                  const SynthesisConfig& cfg);

TriggerProgram build_tracking_trigger_program(const Mat& P, const Mat& FQ, const ExperimentData& aug_data,
                                              const SchedulingBox& box, const TriggerDesign& design);

/// Event-triggered loop on psi; the recorded w column is E Col(omega_k, r_k).
SimulationTrace simulate_tracking_event_triggered(const AugmentedSystem& aug, const AffineMatrixFunction& K,
                                                  const TriggerConfig& cfg, const AffineMatrixFunction& B_est,
                                                  const ReferenceSignal& ref, const SignalLaw& schedule,
                                                  const SignalLaw& noise, const Vec& psi0, int N);

struct TrackingStats {
    double max_error = 0.0;
    double final_rms = 0.0;   // over the last quarter of the horizon
    double chi_max = 0.0;
    double chi_mid = 0.0;     // max |chi| up to the horizon midpoint
    double chi_final_max = 0.0;  // max |chi| over the last quarter
    std::vector<Vec> error;   // y_k - r_k
};

TrackingStats tracking_error_stats(const SimulationTrace& tr, const ReferenceSignal& ref, int n);

}  // namespace lpvet
