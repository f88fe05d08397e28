#include "lpvet/sdp.hpp"

#include "lpvet/conic_admm.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <ostream>

namespace lpvet::sdp {

int VariableHandle::components() const
{
    switch (kind) {
    case VarKind::Symmetric: return rows * (rows + 1) / 2;
    case VarKind::Rectangular: return rows * cols;
    case VarKind::Scalar: return 1;
    }
    return 0;
}

SpMat selector(int k, int offset, int total)
{
    SpMat S(k, total);
    S.reserve(Eigen::VectorXi::Constant(total, 1));
    for (int i = 0; i < k; ++i) S.insert(i, offset + i) = 1.0;
    S.makeCompressed();
    return S;
}

SpMat sparse_identity(int k)
{
    SpMat I(k, k);
    I.setIdentity();
    return I;
}

// ---------------------------------------------------------------- AffineExpr

AffineExpr::AffineExpr(int rows, int cols)
    : placeholder_(false), rows_(rows), cols_(cols), constant_(Mat::Zero(rows, cols))
{
}

AffineExpr AffineExpr::constant(const Mat& c)
{
    AffineExpr e(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
    e.constant_ = c;
    return e;
}

AffineExpr AffineExpr::var(const VariableHandle& h)
{
    AffineExpr e(h.rows, h.cols);
    e.terms_.push_back({sparse_identity(h.rows), h.id, sparse_identity(h.cols), false});
    return e;
}

AffineExpr AffineExpr::transpose() const
{
    AffineExpr e(cols_, rows_);
    e.constant_ = constant_.transpose();
    for (const auto& t : terms_)
        e.terms_.push_back({SpMat(t.right.transpose()), t.var, SpMat(t.left.transpose()), !t.transpose});
    return e;
}

AffineExpr AffineExpr::operator-() const
{
    AffineExpr e = *this;
    e *= -1.0;
    return e;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o)
{
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("AffineExpr +: shape mismatch");
    constant_ += o.constant_;
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o)
{
    return *this += -o;
}

AffineExpr& AffineExpr::operator*=(double s)
{
    constant_ *= s;
    for (auto& t : terms_) t.left *= s;
    return *this;
}

AffineExpr AffineExpr::lmul(const SpMat& L) const
{
    if (L.cols() != rows_) throw DimensionError("AffineExpr lmul: shape mismatch");
    AffineExpr e(static_cast<int>(L.rows()), cols_);
    e.constant_ = L * constant_;
    for (const auto& t : terms_) e.terms_.push_back({SpMat(L * t.left), t.var, t.right, t.transpose});
    return e;
}

AffineExpr AffineExpr::rmul(const SpMat& R) const
{
    if (R.rows() != cols_) throw DimensionError("AffineExpr rmul: shape mismatch");
    AffineExpr e(rows_, static_cast<int>(R.cols()));
    e.constant_ = constant_ * R;
    for (const auto& t : terms_) e.terms_.push_back({t.left, t.var, SpMat(t.right * R), t.transpose});
    return e;
}

AffineExpr AffineExpr::blocks(const std::vector<int>& heights, const std::vector<int>& widths,
                              const std::vector<std::vector<AffineExpr>>& b)
{
    const size_t nr = heights.size(), nc = widths.size();
    if (b.size() != nr) throw DimensionError("AffineExpr::blocks: block row count mismatch");
    std::vector<int> ro(nr + 1, 0), co(nc + 1, 0);
    for (size_t i = 0; i < nr; ++i) ro[i + 1] = ro[i] + heights[i];
    for (size_t j = 0; j < nc; ++j) co[j + 1] = co[j] + widths[j];
    AffineExpr out(ro[nr], co[nc]);
    for (size_t i = 0; i < nr; ++i) {
        if (b[i].size() != nc) throw DimensionError("AffineExpr::blocks: ragged block rows");
        const SpMat Ei = SpMat(selector(heights[i], ro[i], ro[nr]).transpose());
        for (size_t j = 0; j < nc; ++j) {
            const auto& e = b[i][j];
            if (e.placeholder_) continue;
            if (e.rows_ != heights[i] || e.cols_ != widths[j])
                throw DimensionError("AffineExpr::blocks: block (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") has the wrong shape");
            out.constant_.block(ro[i], co[j], heights[i], widths[j]) = e.constant_;
            const SpMat Ej = selector(widths[j], co[j], co[nc]);
            for (const auto& t : e.terms_)
                out.terms_.push_back({SpMat(Ei * t.left), t.var, SpMat(t.right * Ej), t.transpose});
        }
    }
    return out;
}

AffineExpr AffineExpr::blkdiag(const std::vector<AffineExpr>& b)
{
    std::vector<int> h, w;
    std::vector<std::vector<AffineExpr>> grid(b.size(), std::vector<AffineExpr>(b.size()));
    for (size_t i = 0; i < b.size(); ++i) {
        h.push_back(b[i].rows());
        w.push_back(b[i].cols());
        grid[i][i] = b[i];
    }
    return blocks(h, w, grid);
}

AffineExpr AffineExpr::kron_identity(int k) const
{
    std::vector<AffineExpr> diag(k, *this);
    return blkdiag(diag);
}

Mat AffineExpr::evaluate(const std::vector<Mat>& values) const
{
    Mat out = constant_;
    for (const auto& t : terms_) {
        const Mat& V = values.at(t.var);
        if (t.transpose)
            out += t.left * (V.transpose() * t.right);
        else
            out += t.left * (V * t.right);
    }
    return out;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b)
{
    a += b;
    return a;
}

AffineExpr operator-(AffineExpr a, const AffineExpr& b)
{
    a -= b;
    return a;
}

AffineExpr operator*(double s, AffineExpr a)
{
    a *= s;
    return a;
}

// ---------------------------------------------------------------- Program

VariableHandle Program::declare(VarKind kind, int rows, int cols, std::string name)
{
    VariableHandle h{static_cast<int>(vars_.size()), kind, rows, cols};
    vars_.push_back(h);
    names_.push_back(name.empty() ? "v" + std::to_string(h.id) : std::move(name));
    offsets_.push_back(offsets_.back() + h.components());
    return h;
}

VariableHandle Program::declare_symmetric(int d, std::string name)
{
    return declare(VarKind::Symmetric, d, d, std::move(name));
}

VariableHandle Program::declare_rectangular(int rows, int cols, std::string name)
{
    return declare(VarKind::Rectangular, rows, cols, std::move(name));
}

VariableHandle Program::declare_scalar(std::string name)
{
    return declare(VarKind::Scalar, 1, 1, std::move(name));
}

void Program::check_expr(const AffineExpr& e) const
{
    for (const auto& t : e.terms()) {
        if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
            throw std::invalid_argument("expression references an undeclared variable");
        const auto& h = vars_[t.var];
        const int vr = t.transpose ? h.cols : h.rows;
        const int vc = t.transpose ? h.rows : h.cols;
        if (t.left.cols() != vr || t.right.rows() != vc || t.left.rows() != e.rows() || t.right.cols() != e.cols())
            throw DimensionError("expression term shape mismatch");
    }
}

void Program::add_psd(const AffineExpr& e, Sense sense, double margin, std::string label)
{
    if (e.rows() != e.cols()) throw DimensionError("add_psd: expression is not square");
    check_expr(e);
    if (e.rows() == 0) return;  // empty blocks appear when there is no scheduling
    psd_.push_back({e, sense, margin, label.empty() ? "psd" + std::to_string(psd_.size()) : std::move(label)});
}

void Program::add_equality(const AffineExpr& e, std::string label)
{
    check_expr(e);
    eq_.push_back({e, label.empty() ? "eq" + std::to_string(eq_.size()) : std::move(label)});
}

void Program::add_trace_box(const VariableHandle& h, double lo, double hi, std::string label)
{
    if (h.kind != VarKind::Symmetric) throw std::invalid_argument("add_trace_box: handle must be symmetric");
    if (lo > hi) throw std::invalid_argument("add_trace_box: lo > hi");
    box_.push_back({h.id, true, lo, hi, label.empty() ? "trace(" + names_[h.id] + ")" : std::move(label)});
}

void Program::add_scalar_box(const VariableHandle& h, double lo, double hi, std::string label)
{
    if (h.kind != VarKind::Scalar) throw std::invalid_argument("add_scalar_box: handle must be scalar");
    if (lo > hi) throw std::invalid_argument("add_scalar_box: lo > hi");
    box_.push_back({h.id, false, lo, hi, label.empty() ? names_[h.id] : std::move(label)});
}

std::vector<Mat> Program::unpack(const Vec& x) const
{
    std::vector<Mat> out;
    for (const auto& h : vars_) {
        const int off = offsets_[h.id];
        Mat V(h.rows, h.cols);
        if (h.kind == VarKind::Symmetric) {
            int k = off;
            for (int j = 0; j < h.rows; ++j)
                for (int i = j; i < h.rows; ++i) V(i, j) = V(j, i) = x(k++);
        } else {
            for (int j = 0; j < h.cols; ++j)
                for (int i = 0; i < h.rows; ++i) V(i, j) = x(off + i + j * h.rows);
        }
        out.push_back(std::move(V));
    }
    return out;
}

Vec Program::pack(const std::vector<Mat>& values) const
{
    Vec x(num_scalars());
    for (const auto& h : vars_) {
        const Mat& V = values.at(h.id);
        const int off = offsets_[h.id];
        if (h.kind == VarKind::Symmetric) {
            int k = off;
            for (int j = 0; j < h.rows; ++j)
                for (int i = j; i < h.rows; ++i) x(k++) = 0.5 * (V(i, j) + V(j, i));
        } else {
            for (int j = 0; j < h.cols; ++j)
                for (int i = 0; i < h.rows; ++i) x(off + i + j * h.rows) = V(i, j);
        }
    }
    return x;
}

namespace {

using Triplet = Eigen::Triplet<double>;

/// Coefficients of vec(expr) (column-major) with respect to the scalar components.
SpMat expand(const AffineExpr& e, const std::vector<VariableHandle>& vars, const Program& prog)
{
    const int rows = e.rows();
    std::vector<Triplet> trip;
    for (const auto& t : e.terms()) {
        const auto& h = vars[t.var];
        const int off = prog.offset(t.var);
        const SpMat L = t.left;
        const SpMat Rt = SpMat(t.right.transpose());
        auto outer = [&](int a, int b, int comp) {
            for (SpMat::InnerIterator li(L, a); li; ++li)
                for (SpMat::InnerIterator ri(Rt, b); ri; ++ri)
                    trip.emplace_back(static_cast<int>(li.row() + ri.row() * rows), off + comp,
                                      li.value() * ri.value());
        };
        switch (h.kind) {
        case VarKind::Symmetric: {
            int comp = 0;
            for (int j = 0; j < h.rows; ++j)
                for (int i = j; i < h.rows; ++i, ++comp) {
                    outer(i, j, comp);
                    if (i != j) outer(j, i, comp);
                }
            break;
        }
        case VarKind::Rectangular:
            for (int j = 0; j < h.cols; ++j)
                for (int i = 0; i < h.rows; ++i) {
                    if (t.transpose)
                        outer(j, i, i + j * h.rows);
                    else
                        outer(i, j, i + j * h.rows);
                }
            break;
        case VarKind::Scalar: outer(0, 0, 0); break;
        }
    }
    SpMat M(static_cast<Eigen::Index>(rows) * e.cols(), prog.num_scalars());
    M.setFromTriplets(trip.begin(), trip.end());
    M.prune(0.0);
    return M;
}

int svec_len(int d)
{
    return d * (d + 1) / 2;
}

}  // namespace

ConicProblem Program::compile() const
{
    const int nv = num_scalars();
    std::vector<Triplet> trip;
    std::vector<double> b;
    int row = 0;
    ConicProblem out;

    // zero cone: equalities, s = expr = 0
    for (const auto& c : eq_) {
        const SpMat M = expand(c.expr, vars_, *this);
        const Mat& C = c.expr.constant_term();
        for (int k = 0; k < M.outerSize(); ++k)
            for (SpMat::InnerIterator it(M, k); it; ++it) trip.emplace_back(row + it.row(), k, -it.value());
        for (Eigen::Index j = 0; j < C.cols(); ++j)
            for (Eigen::Index i = 0; i < C.rows(); ++i) b.push_back(C(i, j));
        row += static_cast<int>(C.size());
    }
    out.zero = row;

    // nonnegative cone: boxes
    for (const auto& bx : box_) {
        const auto& h = vars_[bx.var];
        std::vector<int> comps;
        if (bx.trace) {
            int k = offsets_[bx.var];
            for (int j = 0; j < h.rows; ++j)
                for (int i = j; i < h.rows; ++i, ++k)
                    if (i == j) comps.push_back(k);
        } else {
            comps.push_back(offsets_[bx.var]);
        }
        if (std::isfinite(bx.lo)) {  // s = sum - lo
            for (int k : comps) trip.emplace_back(row, k, -1.0);
            b.push_back(-bx.lo);
            ++row;
        }
        if (std::isfinite(bx.hi)) {  // s = hi - sum
            for (int k : comps) trip.emplace_back(row, k, 1.0);
            b.push_back(bx.hi);
            ++row;
        }
    }
    out.nonneg = row - out.zero;

    const double r2 = std::sqrt(0.5);
    for (const auto& c : psd_) {
        const int d = c.expr.rows();
        const double sgn = c.sense == Sense::PSD ? 1.0 : -1.0;
        const SpMat M = expand(c.expr, vars_, *this);
        const Mat& C = c.expr.constant_term();
        auto srow = [&](Eigen::Index i, Eigen::Index j) {
            if (i < j) std::swap(i, j);
            return row + static_cast<int>(j * d - j * (j - 1) / 2 + (i - j));
        };
        for (int k = 0; k < M.outerSize(); ++k)
            for (SpMat::InnerIterator it(M, k); it; ++it) {
                const Eigen::Index i = it.row() % d, j = it.row() / d;
                const double w = i == j ? 1.0 : r2;
                trip.emplace_back(srow(i, j), k, -sgn * w * it.value());
            }
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = j; i < d; ++i) {
                const double v = i == j ? sgn * C(i, i) - c.margin : sgn * r2 * (C(i, j) + C(j, i));
                b.push_back(v);
            }
        out.psd.push_back(d);
        row += svec_len(d);
    }

    out.A.resize(row, nv);
    out.A.setFromTriplets(trip.begin(), trip.end());
    out.A.prune(0.0);
    out.b = Eigen::Map<const Vec>(b.data(), static_cast<Eigen::Index>(b.size()));
    out.c = Vec::Zero(nv);
    return out;
}

void Program::export_triplets(std::ostream& os) const
{
    os.precision(17);
    os << "variables " << vars_.size() << " scalars " << num_scalars() << "\n";
    for (const auto& h : vars_)
        os << "var " << names_[h.id] << " offset " << offsets_[h.id] << " rows " << h.rows << " cols " << h.cols
           << " kind " << (h.kind == VarKind::Symmetric ? "sym" : h.kind == VarKind::Scalar ? "scalar" : "rect")
           << "\n";
    auto dump = [&](const AffineExpr& e, bool symmetric) {
        const Mat& C = e.constant_term();
        os << "block 0\n";
        for (Eigen::Index j = 0; j < C.cols(); ++j)
            for (Eigen::Index i = symmetric ? j : 0; i < C.rows(); ++i)
                if (C(i, j) != 0.0) os << i << " " << j << " " << C(i, j) << "\n";
        const SpMat M = expand(e, vars_, *this);
        for (int k = 0; k < M.outerSize(); ++k) {
            bool header = false;
            for (SpMat::InnerIterator it(M, k); it; ++it) {
                const Eigen::Index i = it.row() % e.rows(), j = it.row() / e.rows();
                if (symmetric && i < j) continue;
                if (!header) {
                    os << "block " << k + 1 << "\n";
                    header = true;
                }
                os << i << " " << j << " " << it.value() << "\n";
            }
        }
    };
    for (const auto& c : psd_) {
        os << "constraint " << c.label << " " << (c.sense == Sense::PSD ? "psd" : "nsd") << " dim " << c.expr.rows()
           << " margin " << c.margin << "\n";
        dump(c.expr, true);
    }
    for (const auto& c : eq_) {
        os << "constraint " << c.label << " eq rows " << c.expr.rows() << " cols " << c.expr.cols() << "\n";
        dump(c.expr, false);
    }
    for (const auto& bx : box_)
        os << "constraint " << bx.label << " box " << (bx.trace ? "trace " : "scalar ") << names_[bx.var] << " "
           << bx.lo << " " << bx.hi << "\n";
}

// ---------------------------------------------------------------- solving

const char* to_string(Status s)
{
    switch (s) {
    case Status::Feasible: return "feasible";
    case Status::Infeasible: return "infeasible";
    case Status::NumericalFailure: return "numerical-failure";
    }
    return "?";
}

std::vector<ConstraintResidual> evaluate_constraints(const Program& prog, const std::vector<Mat>& values)
{
    std::vector<ConstraintResidual> out;
    for (const auto& c : prog.psd_constraints()) {
        Mat E = c.expr.evaluate(values);
        if (c.sense == Sense::NSD) E = -E;
        E.diagonal().array() -= c.margin;
        out.push_back({c.label, lambda_min_sym(E)});
    }
    for (const auto& c : prog.equality_constraints()) {
        const Mat E = c.expr.evaluate(values);
        out.push_back({c.label, E.size() ? -E.cwiseAbs().maxCoeff() : 0.0});
    }
    for (const auto& bx : prog.box_constraints()) {
        const Mat& V = values.at(bx.var);
        const double s = bx.trace ? V.trace() : V(0, 0);
        double slack = std::numeric_limits<double>::infinity();
        if (std::isfinite(bx.lo)) slack = std::min(slack, s - bx.lo);
        if (std::isfinite(bx.hi)) slack = std::min(slack, bx.hi - s);
        out.push_back({bx.label, std::isfinite(slack) ? slack : 0.0});
    }
    return out;
}

bool plug_in_check(const Program& prog, const std::vector<Mat>& values, double tol, std::string* first_failure)
{
    for (const auto& r : evaluate_constraints(prog, values))
        if (!(r.value >= -tol)) {
            if (first_failure) *first_failure = r.label + " residual " + std::to_string(r.value);
            return false;
        }
    return true;
}

Solution solve(const Program& prog, const SolverOptions& opts)
{
    return solve(prog, AdmmSolver{}, opts);
}

Solution solve(const Program& prog, const ConicSolver& backend, const SolverOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    if (prog.num_scalars() == 0) {
        // constant program: feasibility is a direct evaluation
        sol.values = prog.unpack(Vec());
        sol.residuals = evaluate_constraints(prog, sol.values);
        sol.status = plug_in_check(prog, sol.values, opts.tol) ? Status::Feasible : Status::Infeasible;
    } else {
        const ConicProblem cp = prog.compile();
        const ConicResult res = backend.solve(cp, opts);
        sol.status = res.status;
        sol.iterations = res.iterations;
        sol.message = res.message;
        sol.values = prog.unpack(res.x.size() == prog.num_scalars() ? res.x : Vec::Zero(prog.num_scalars()).eval());
        sol.residuals = evaluate_constraints(prog, sol.values);
    }
    sol.worst_residual = 0.0;
    for (const auto& r : sol.residuals) sol.worst_residual = std::min(sol.worst_residual, r.value);
    sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

}  // namespace lpvet::sdp
