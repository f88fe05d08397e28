#pragma once
/**
 * @file sdp.hpp
 * @brief Semidefinite feasibility programs built from affine matrix expressions.
 *
 * Variables are matrices. An expression is C + sum_t L_t V_t^(T?) R_t with sparse
 * multipliers. Programs compile to the standard conic form A x + s = b, s in K,
 * with K a product of zero, nonnegative and PSD cones (scaled svec layout).
 */

#include "lpvet/lpv.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace lpvet::sdp {

using SpMat = Eigen::SparseMatrix<double>;

enum class VarKind { Symmetric, Rectangular, Scalar };

struct VariableHandle {
    int id = -1;
    VarKind kind = VarKind::Scalar;
    int rows = 0, cols = 0;
    int components() const;
};

struct Term {
    SpMat left;
    int var = -1;
    SpMat right;
    bool transpose = false;
};

class AffineExpr {
public:
    /// Placeholder (zero block of unspecified shape) for blocks().
    AffineExpr() = default;
    AffineExpr(int rows, int cols);
    bool placeholder() const { return placeholder_; }
    static AffineExpr constant(const Mat& c);
    static AffineExpr zero(int rows, int cols) { return AffineExpr(rows, cols); }
    static AffineExpr var(const VariableHandle& h);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Mat& constant_term() const { return constant_; }
    const std::vector<Term>& terms() const { return terms_; }

    AffineExpr transpose() const;
    AffineExpr operator-() const;
    AffineExpr& operator+=(const AffineExpr& o);
    AffineExpr& operator-=(const AffineExpr& o);
    AffineExpr& operator*=(double s);

    AffineExpr lmul(const SpMat& L) const;
    AffineExpr rmul(const SpMat& R) const;
    AffineExpr lmul(const Mat& L) const { return lmul(SpMat(L.sparseView())); }
    AffineExpr rmul(const Mat& R) const { return rmul(SpMat(R.sparseView())); }
    /// L * this * L'
    AffineExpr congruence(const SpMat& L) const { return lmul(L).rmul(SpMat(L.transpose())); }

    /// Block matrix with explicit block heights and widths; default-constructed entries are zero blocks.
    static AffineExpr blocks(const std::vector<int>& heights, const std::vector<int>& widths,
                             const std::vector<std::vector<AffineExpr>>& b);
    static AffineExpr blkdiag(const std::vector<AffineExpr>& b);
    /// I_k (x) this
    AffineExpr kron_identity(int k) const;

    /// Dense evaluation at given variable values (indexed by handle id).
    Mat evaluate(const std::vector<Mat>& values) const;

private:
    bool placeholder_ = true;
    int rows_ = 0, cols_ = 0;
    Mat constant_;
    std::vector<Term> terms_;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator*(double s, AffineExpr a);

/// Sparse selector E with E(i, offset + i) = 1, size k x total.
SpMat selector(int k, int offset, int total);
SpMat sparse_identity(int k);

enum class Sense { PSD, NSD };

struct PsdConstraint {
    AffineExpr expr;
    Sense sense;
    double margin;
    std::string label;
};

struct EqualityConstraint {
    AffineExpr expr;
    std::string label;
};

struct BoxConstraint {
    int var;
    bool trace;  // trace box when true, scalar box otherwise
    double lo, hi;
    std::string label;
};

/// Standard conic data: A x + s = b, s in {0}^z x R+^l x PSD(d_1) x ... ; minimize c'x.
struct ConicProblem {
    SpMat A;
    Vec b;
    Vec c;
    int zero = 0;
    int nonneg = 0;
    std::vector<int> psd;
};

class Program {
public:
    VariableHandle declare_symmetric(int d, std::string name = {});
    VariableHandle declare_rectangular(int rows, int cols, std::string name = {});
    VariableHandle declare_scalar(std::string name = {});

    void add_psd(const AffineExpr& e, Sense sense, double margin = 0.0, std::string label = {});
    void add_equality(const AffineExpr& e, std::string label = {});
    void add_trace_box(const VariableHandle& h, double lo, double hi, std::string label = {});
    void add_scalar_box(const VariableHandle& h, double lo, double hi, std::string label = {});

    const std::vector<VariableHandle>& variables() const { return vars_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<PsdConstraint>& psd_constraints() const { return psd_; }
    const std::vector<EqualityConstraint>& equality_constraints() const { return eq_; }
    const std::vector<BoxConstraint>& box_constraints() const { return box_; }

    int num_scalars() const { return offsets_.empty() ? 0 : offsets_.back(); }
    int offset(int var) const { return offsets_[var]; }

    ConicProblem compile() const;
    /// Inverse of the variable vectorization used by compile().
    std::vector<Mat> unpack(const Vec& x) const;
    Vec pack(const std::vector<Mat>& values) const;

    /// Plain-text dump: one section per constraint, "row col value" lines of the
    /// coefficient matrices (component 0 is the constant term).
    void export_triplets(std::ostream& os) const;

private:
    VariableHandle declare(VarKind kind, int rows, int cols, std::string name);
    void check_expr(const AffineExpr& e) const;

    std::vector<VariableHandle> vars_;
    std::vector<std::string> names_;
    std::vector<int> offsets_{0};
    std::vector<PsdConstraint> psd_;
    std::vector<EqualityConstraint> eq_;
    std::vector<BoxConstraint> box_;
};

enum class Status { Feasible, Infeasible, NumericalFailure };
const char* to_string(Status s);

struct SolverOptions {
    double tol = 1e-7;
    int max_iters = 200000;
    double time_limit_s = 600.0;
    bool verbose = false;
};

struct ConicResult {
    Status status = Status::NumericalFailure;
    Vec x;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    std::string message;
};

/// Pluggable backend contract.
class ConicSolver {
public:
    virtual ~ConicSolver() = default;
    virtual ConicResult solve(const ConicProblem& problem, const SolverOptions& opts) const = 0;
};

struct ConstraintResidual {
    std::string label;
    double value;  // lambda_min of the oriented PSD expression, or -max|.| for equalities
};

struct Solution {
    Status status = Status::NumericalFailure;
    std::vector<Mat> values;
    std::vector<ConstraintResidual> residuals;
    double worst_residual = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    std::string message;

    const Mat& value(const VariableHandle& h) const { return values.at(h.id); }
};

/// Independent re-evaluation of every constraint at the given values.
std::vector<ConstraintResidual> evaluate_constraints(const Program& prog, const std::vector<Mat>& values);
/// True when every PSD constraint has lambda_min >= -tol (margins included) and equalities hold to tol.
bool plug_in_check(const Program& prog, const std::vector<Mat>& values, double tol, std::string* first_failure = nullptr);

Solution solve(const Program& prog, const SolverOptions& opts = {});
Solution solve(const Program& prog, const ConicSolver& backend, const SolverOptions& opts);

}  // namespace lpvet::sdp
