#pragma once
/**
 * @file synthesis.hpp
 * @brief Data-driven gain-scheduled stabilization: certificate and vertex-relaxed synthesis programs.
 */

#include "lpvet/data.hpp"
#include "lpvet/sdp.hpp"

#include <optional>

namespace lpvet {

struct SynthesisConfig {
    double sigma = 4.0;
    double beta = 0.2;
    double epsilon = 0.01;
    double delta = 0.1;
    double trace_lo = 0.1;
    double trace_hi = 10.0;
    double margin = 1e-7;
    bool w_known = false;  // use X+ - W and drop the Delta robustification

    void validate() const;
};

/// Column blocks [F0 | F1..Fl | F11..Fll], each T x n; F_ij sits at block i*l + j.
Mat eval_F(const Mat& Fscr, int n, int ell, const Vec& p);
/// Canonical F_Q: Q00 = F0, Q01 = [F1..Fl], Q10 = 0, Q11(i,j) = F_ij.
Mat build_fq(const Mat& Fscr, int n, int ell);
/// Same layout as an affine expression in the variable behind Fscr.
sdp::AffineExpr fq_expr(const sdp::AffineExpr& Fscr, int T, int n, int ell);

AffineMatrixFunction recover_gains(const Mat& P, const Mat& Z0, const Mat& Zbar);

namespace fbsp {

using sdp::SpMat;

/// Channel layout of the full-block multiplier: channel c has size d[c] and occupies
/// (1+l) d[c] rows of Phi, split as [base; p (x) base].
struct Layout {
    std::vector<int> d;
    int ell = 0;
    int D() const;
    int phi_dim() const { return (1 + ell) * D(); }
    int xi_dim() const { return 2 * ell * D(); }
};

SpMat M12(const Layout& L);
SpMat M21(const Layout& L);
SpMat M22(const Layout& L);
Mat upsilon(const Layout& L, const Vec& p);
/// M(p) = M22 + M21 Upsilon(p) M12
Mat M_of_p(const Layout& L, const Vec& p);

/// Assembles Phi from channel blocks; missing (0x0) entries become zeros, lower blocks
/// may be omitted and are filled by transposition.
sdp::AffineExpr assemble_phi(const Layout& L, std::vector<std::vector<sdp::AffineExpr>> blocks);

/// Adds the multiplier constraint with -Phi, the vertex constraints and Xi_22 < 0.
void add_constraints(sdp::Program& prog, const Layout& L, const sdp::AffineExpr& Phi, const sdp::VariableHandle& Xi,
                     const std::vector<Vec>& verts, double margin, const std::string& tag);

/// Blkdiag(M, I_l (x) M)
Mat lifted_blkdiag(const Mat& M, int ell);
/// Blkdiag(e, 0) with the zero block l times the size of e.
sdp::AffineExpr pad(const sdp::AffineExpr& e, int ell);

/// Expression [I; Upsilon]' Xi [I; Upsilon] at given Xi value (dense check helper).
Mat vertex_form(const Layout& L, const Mat& Xi, const Vec& p);

}  // namespace fbsp

struct SynthesisProgram {
    sdp::Program prog;
    sdp::VariableHandle P, Z0, Zbar, F, Xi;
    fbsp::Layout layout;
    int n = 0, m = 0, ell = 0, T = 0;
    Mat Xp;     // X+ (or X+ - W when W is known)
    Mat Delta;  // zero when W is known
    Mat G;
    std::vector<Vec> verts;
    SynthesisConfig cfg;
};

SynthesisProgram build_synthesis_program(const ExperimentData& data, const SchedulingBox& box,
                                         const SynthesisConfig& cfg);

struct SynthesisSolution {
    sdp::Status status = sdp::Status::NumericalFailure;
    Mat P, Z0, Zbar, Fscr, FQ, Xi;
    AffineMatrixFunction K;
    bool plug_in_ok = false;
    std::string plug_in_failure;
    sdp::Solution raw;
};

SynthesisSolution solve_synthesis(const SynthesisProgram& sp, const sdp::SolverOptions& opts = {});

struct CertificateProgram {
    sdp::Program prog;
    sdp::VariableHandle P;
};

/// Pointwise block LMI on a grid of scheduling points with F fixed and P free.
CertificateProgram build_certificate_program(const ExperimentData& data, const Mat& Fscr, const SynthesisConfig& cfg,
                                             const std::vector<Vec>& grid);

/// Dense value of the five-block certificate matrix at p (for plug-in checks).
Mat certificate_matrix(const Mat& P, const Mat& F, const Mat& Xp, const Mat& Delta, const SynthesisConfig& cfg);

struct ClosedLoopReport {
    std::vector<double> vertex_radii;
    bool vertices_stable = false;
    bool decrease_ok = false;
    int first_violation_trial = -1;
    int first_violation_step = -1;
    double worst_slack = 0.0;  // max over steps of lhs - rhs
    bool pass = false;
};

/// Frozen-vertex spectral radii plus the Lyapunov decrease check along random trajectories.
ClosedLoopReport verify_closed_loop(const LpvSystem& sys, const AffineMatrixFunction& K, const Mat& P,
                                    const SchedulingBox& box, double beta, double sigma, double delta, int trials,
                                    int steps, std::uint64_t seed, double slack = 1e-8);

struct IssConstants {
    double R;
    double c1;
};

IssConstants iss_constants(const Mat& P);

}  // namespace lpvet
