#pragma once
/**
 * @file lpv.hpp
 * @brief Affine LPV models, Kronecker/Hankel helpers, scheduling boxes and plant simulation.
 */

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpvet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// M(p) = M0 + sum_i p_i M_i
struct AffineMatrixFunction {
    Mat base;
    std::vector<Mat> coeffs;

    AffineMatrixFunction() = default;
    AffineMatrixFunction(Mat base_, std::vector<Mat> coeffs_);

    static AffineMatrixFunction zero(int rows, int cols, int ell);

    int rows() const { return static_cast<int>(base.rows()); }
    int cols() const { return static_cast<int>(base.cols()); }
    int ell() const { return static_cast<int>(coeffs.size()); }

    /// Horizontal stack [M0 M1 ... Ml].
    Mat stacked() const;
};

Mat eval_affine(const AffineMatrixFunction& f, const Vec& p);

/// Col(x, p (x) x), block i of the tail is p_i * x.
Vec lift_state(const Vec& x, const Vec& p);

struct LpvSystem {
    AffineMatrixFunction A, B, C, D;
    int n = 0, m = 0, r = 0, ell = 0;

    LpvSystem() = default;
    LpvSystem(AffineMatrixFunction A_, AffineMatrixFunction B_, AffineMatrixFunction C_,
              AffineMatrixFunction D_);
    /// C = I, D = 0.
    static LpvSystem state_output(AffineMatrixFunction A_, AffineMatrixFunction B_);
};

struct StepResult {
    Vec x_next;
    Vec y;
};

StepResult step(const LpvSystem& sys, const Vec& x, const Vec& u, const Vec& p, const Vec& w);

/// Block Hankel matrix of depth L; block (i,j) = seq[i+j].
Mat hankel(const std::vector<Vec>& seq, int L);

struct SchedulingBox {
    Vec lower, upper;
    SchedulingBox() = default;
    SchedulingBox(Vec lo, Vec hi);
    static SchedulingBox symmetric(int ell, double bound);
    int ell() const { return static_cast<int>(lower.size()); }
};

/// Corner points in lexicographic order (first coordinate slowest), duplicates removed.
std::vector<Vec> vertices(const SchedulingBox& box);

struct SimulationTrace {
    std::vector<Vec> x;   // N+1
    std::vector<Vec> u;   // N
    std::vector<Vec> p;   // N
    std::vector<Vec> w;   // N
    std::vector<Vec> y;   // N
    std::vector<Vec> nu;  // N, event-triggered runs only
    std::vector<bool> triggered;  // N
    std::vector<double> V;        // N+1 when a Lyapunov matrix is attached
    int N = 0;
};

using FeedbackLaw = std::function<Vec(int k, const Vec& x, const Vec& p)>;
using SignalLaw = std::function<Vec(int k)>;

/// i.i.d. uniform entries on [lo, hi]; draws are made in call order.
SignalLaw uniform_law(int dim, double lo, double hi, std::uint64_t seed);
/// i.i.d. uniform samples from the box.
SignalLaw box_law(const SchedulingBox& box, std::uint64_t seed);
/// Uniform direction, norm uniform on [0, delta].
SignalLaw ball_noise_law(int dim, double delta, std::uint64_t seed);
SignalLaw zero_law(int dim);

SimulationTrace simulate(const LpvSystem& sys, const FeedbackLaw& feedback, const SignalLaw& schedule,
                         const SignalLaw& noise, const Vec& x0, int N);

/// Fills trace.V with x' P^{-1} x.
void attach_lyapunov(SimulationTrace& trace, const Mat& P);

double spectral_radius(const Mat& M);

/// Dense helpers shared by the synthesis modules.
Mat kron(const Mat& a, const Mat& b);
Mat blkdiag(const std::vector<Mat>& blocks);
double lambda_min_sym(const Mat& S);
double lambda_max_sym(const Mat& S);

}  // namespace lpvet
