#pragma once
/**
 * @file data.hpp
 * @brief Excitation experiments, data matrices, excitation checks and least-squares identification.
 */

#include "lpvet/lpv.hpp"

namespace lpvet {

struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentData {
    Mat U, UP, X, XP, Xplus, W, WP, Y;
    std::vector<Vec> p;  // recorded schedule, one per column
    int n = 0, m = 0, r = 0, ell = 0, T = 0;
    double delta = 0.0;
    bool below_min_length = false;

    /// sqrt(T) * delta * I_n
    Mat Delta() const;
};

struct RegressorMatrices {
    Mat G;      // Col(X, XP, U, UP)
    Mat Theta;  // Col(U, UP, X, XP)
    Mat Z;      // Col(X, XP)
};

int min_data_length(int n, int m, int ell);

/// Runs the open-loop experiment x+ = A(p)x + B(p)u + w for T steps.
ExperimentData collect(const LpvSystem& sys, int T, const SignalLaw& input_law, const SignalLaw& schedule_law,
                       const SignalLaw& noise_law, const Vec& x0, double delta);

/// Builds the data record from already recorded sequences (x has T+1 entries).
ExperimentData assemble(const std::vector<Vec>& x, const std::vector<Vec>& u, const std::vector<Vec>& p,
                        const std::vector<Vec>& w, const std::vector<Vec>& y, double delta);

RegressorMatrices regressors(const ExperimentData& d);

/// Smallest singular value of the depth-L Hankel matrix of Col(u_k, p_k (x) u_k).
double theta_pe_margin(const std::vector<Vec>& u_seq, const std::vector<Vec>& p_seq, int L);

int numerical_rank(const Mat& M, double rel_tol = 1e-9);
int regressor_rank(const ExperimentData& d, double rel_tol = 1e-9);

struct IdentifiedModel {
    Mat A_stack;  // n x n(1+ell): [A0 A1 .. Al]
    Mat B_stack;  // n x m(1+ell): [B0 B1 .. Bl]
    AffineMatrixFunction A() const;
    AffineMatrixFunction B() const;
};

/// [A_stack, B_stack] = (X+ - W) G^+ when subtract_w, else X+ G^+.
IdentifiedModel identify(const ExperimentData& d, bool subtract_w = true, double rel_tol = 1e-9);

/// Upper bound on the accumulated perturbation norm over the recorded schedule.
double perturbation_accumulation_bound(const LpvSystem& sys, const std::vector<Vec>& p_seq, double delta);

/// Col(Wbar, Wbar_P) built from the explicit recursion wbar_{k+1} = A(p_k) wbar_k + w_k, wbar_0 = 0.
Mat accumulated_perturbation(const LpvSystem& sys, const std::vector<Vec>& p_seq, const std::vector<Vec>& w_seq);

}  // namespace lpvet
