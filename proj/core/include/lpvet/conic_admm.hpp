#pragma once
/**
 * @file conic_admm.hpp
 * @brief Bundled first-order conic solver (ADMM on the homogeneous self-dual embedding).
 */

#include "lpvet/sdp.hpp"

namespace lpvet::sdp {

class AdmmSolver final : public ConicSolver {
public:
    struct Settings {
        double alpha = 1.0;    // relaxation; values above 1 fight the Anderson step
        int scale_passes = 12; // Ruiz equilibration passes
        int check_every = 10;
        double infeas_tol = 1e-8;
        int anderson_memory = 10;  // 0 gives plain ADMM
    };

    AdmmSolver() = default;
    explicit AdmmSolver(Settings s) : settings_(s) {}

    ConicResult solve(const ConicProblem& problem, const SolverOptions& opts) const override;

private:
    Settings settings_;
};

/// svec of a symmetric matrix: lower triangle, column-major, off-diagonals times sqrt(2).
Vec svec(const Mat& S);
Mat smat(const Eigen::Ref<const Vec>& v, int d);
int svec_size(int d);
int svec_index(int i, int j, int d);  // requires i >= j

/// Euclidean projection onto the PSD cone in svec coordinates.
void project_psd_svec(Eigen::Ref<Vec> v, int d);

}  // namespace lpvet::sdp
