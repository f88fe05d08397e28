#include "lpvet/synthesis.hpp"

#include <cmath>

namespace lpvet {

using sdp::AffineExpr;
using sdp::SpMat;

void SynthesisConfig::validate() const
{
    if (!(sigma > 1.0)) throw std::invalid_argument("sigma must exceed 1");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
    if (trace_lo > trace_hi) throw std::invalid_argument("trace box is empty");
    if (!(margin >= 0.0)) throw std::invalid_argument("margin must be nonnegative");
}

Mat eval_F(const Mat& Fscr, int n, int ell, const Vec& p)
{
    if (p.size() != ell) throw DimensionError("eval_F: scheduling length differs from ell");
    if (Fscr.cols() != n * (1 + ell + ell * ell)) throw DimensionError("eval_F: column count mismatch");
    Mat F = Fscr.leftCols(n);
    for (int i = 0; i < ell; ++i) F += p(i) * Fscr.middleCols(n * (1 + i), n);
    for (int i = 0; i < ell; ++i)
        for (int j = 0; j < ell; ++j) F += p(i) * p(j) * Fscr.middleCols(n * (1 + ell + i * ell + j), n);
    return F;
}

AffineExpr fq_expr(const AffineExpr& Fscr, int T, int n, int ell)
{
    const int fc = n * (1 + ell + ell * ell);
    if (Fscr.rows() != T || Fscr.cols() != fc) throw DimensionError("fq_expr: shape mismatch");
    const int qr = (1 + ell) * T, qc = (1 + ell) * n;
    // first block row: [F0, F1..Fl] are the leading n(1+l) columns of Fscr
    SpMat rows0 = SpMat(sdp::selector(T, 0, qr).transpose());
    SpMat cols0 = SpMat(sdp::selector(qc, 0, fc).transpose());
    AffineExpr Q = Fscr.lmul(rows0).rmul(cols0);
    for (int i = 0; i < ell; ++i) {
        SpMat rows_i = SpMat(sdp::selector(T, T * (1 + i), qr).transpose());
        // columns F_i1..F_il of Fscr land in the tail columns of Q
        SpMat pick = SpMat(sdp::selector(ell * n, n * (1 + ell + i * ell), fc).transpose());
        SpMat place = sdp::selector(ell * n, n, qc);
        Q += Fscr.lmul(rows_i).rmul(SpMat(pick * place));
    }
    return Q;
}

Mat build_fq(const Mat& Fscr, int n, int ell)
{
    return fq_expr(AffineExpr::constant(Fscr), static_cast<int>(Fscr.rows()), n, ell).constant_term();
}

AffineMatrixFunction recover_gains(const Mat& P, const Mat& Z0, const Mat& Zbar)
{
    const auto n = P.rows();
    Eigen::FullPivLU<Mat> lu(P);
    if (!lu.isInvertible()) throw std::invalid_argument("recover_gains: P is singular");
    const Mat Pinv = lu.inverse();
    const auto ell = n ? Zbar.cols() / n : 0;
    std::vector<Mat> Ki;
    for (Eigen::Index i = 0; i < ell; ++i) Ki.push_back(Zbar.middleCols(n * i, n) * Pinv);
    return {Z0 * Pinv, Ki};
}

// ---------------------------------------------------------------- full-block S-procedure

namespace fbsp {

int Layout::D() const
{
    int s = 0;
    for (int v : d) s += v;
    return s;
}

SpMat M12(const Layout& L)
{
    std::vector<Eigen::Triplet<double>> t;
    int off = 0;
    for (int dc : L.d) {
        for (int i = 0; i < L.ell; ++i)
            for (int k = 0; k < dc; ++k) t.emplace_back(L.ell * off + i * dc + k, off + k, 1.0);
        off += dc;
    }
    SpMat M(L.ell * L.D(), L.D());
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

SpMat M21(const Layout& L)
{
    std::vector<Eigen::Triplet<double>> t;
    int off = 0;
    for (int dc : L.d) {
        for (int j = 0; j < L.ell * dc; ++j) t.emplace_back((1 + L.ell) * off + dc + j, L.ell * off + j, 1.0);
        off += dc;
    }
    SpMat M(L.phi_dim(), L.ell * L.D());
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

SpMat M22(const Layout& L)
{
    std::vector<Eigen::Triplet<double>> t;
    int off = 0;
    for (int dc : L.d) {
        for (int k = 0; k < dc; ++k) t.emplace_back((1 + L.ell) * off + k, off + k, 1.0);
        off += dc;
    }
    SpMat M(L.phi_dim(), L.D());
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

Mat upsilon(const Layout& L, const Vec& p)
{
    if (p.size() != L.ell) throw DimensionError("upsilon: scheduling length differs from ell");
    Vec diag(L.ell * L.D());
    int off = 0;
    for (int dc : L.d) {
        for (int i = 0; i < L.ell; ++i) diag.segment(L.ell * off + i * dc, dc).setConstant(p(i));
        off += dc;
    }
    return diag.asDiagonal();
}

Mat M_of_p(const Layout& L, const Vec& p)
{
    return Mat(M22(L)) + Mat(M21(L)) * upsilon(L, p) * Mat(M12(L));
}

AffineExpr assemble_phi(const Layout& L, std::vector<std::vector<AffineExpr>> blocks)
{
    const size_t c = L.d.size();
    std::vector<int> sz;
    for (int dc : L.d) sz.push_back((1 + L.ell) * dc);
    if (blocks.size() != c) throw DimensionError("assemble_phi: block count mismatch");
    for (size_t i = 0; i < c; ++i)
        for (size_t j = 0; j < i; ++j)
            if (blocks[i][j].placeholder() && !blocks[j][i].placeholder()) blocks[i][j] = blocks[j][i].transpose();
    return AffineExpr::blocks(sz, sz, blocks);
}

void add_constraints(sdp::Program& prog, const Layout& L, const AffineExpr& Phi, const sdp::VariableHandle& Xi,
                     const std::vector<Vec>& verts, double margin, const std::string& tag)
{
    const int lD = L.ell * L.D();
    const int D = L.D();
    // columns ordered (w, xi)
    std::vector<Eigen::Triplet<double>> t1;
    const SpMat m12 = M12(L);
    for (int k = 0; k < m12.outerSize(); ++k)
        for (SpMat::InnerIterator it(m12, k); it; ++it) t1.emplace_back(it.row(), lD + k, it.value());
    for (int i = 0; i < lD; ++i) t1.emplace_back(lD + i, i, 1.0);
    SpMat R1(2 * lD, lD + D);
    R1.setFromTriplets(t1.begin(), t1.end());

    std::vector<Eigen::Triplet<double>> t2;
    const SpMat m21 = M21(L), m22 = M22(L);
    for (int k = 0; k < m21.outerSize(); ++k)
        for (SpMat::InnerIterator it(m21, k); it; ++it) t2.emplace_back(it.row(), k, it.value());
    for (int k = 0; k < m22.outerSize(); ++k)
        for (SpMat::InnerIterator it(m22, k); it; ++it) t2.emplace_back(it.row(), lD + k, it.value());
    SpMat R2(L.phi_dim(), lD + D);
    R2.setFromTriplets(t2.begin(), t2.end());

    const AffineExpr X = AffineExpr::var(Xi);
    const SpMat R1t = R1.transpose(), R2t = R2.transpose();
    AffineExpr lhs = X.lmul(R1t).rmul(R1) - Phi.lmul(R2t).rmul(R2);
    prog.add_psd(lhs, sdp::Sense::NSD, margin, tag + ":multiplier");

    for (size_t v = 0; v < verts.size(); ++v) {
        Mat IU(2 * lD, lD);
        IU << Mat::Identity(lD, lD), upsilon(L, verts[v]);
        const SpMat S = IU.sparseView();
        prog.add_psd(X.lmul(SpMat(S.transpose())).rmul(S), sdp::Sense::PSD, 0.0, tag + ":vertex" + std::to_string(v));
    }
    const SpMat S22 = SpMat(sdp::selector(lD, lD, 2 * lD).transpose());
    prog.add_psd(X.lmul(SpMat(S22.transpose())).rmul(S22), sdp::Sense::NSD, margin, tag + ":xi22");
}

Mat lifted_blkdiag(const Mat& M, int ell)
{
    return blkdiag({M, kron(Mat::Identity(ell, ell), M)});
}

AffineExpr pad(const AffineExpr& e, int ell)
{
    return AffineExpr::blkdiag({e, AffineExpr::zero(ell * e.rows(), ell * e.cols())});
}

Mat vertex_form(const Layout& L, const Mat& Xi, const Vec& p)
{
    const int lD = L.ell * L.D();
    Mat IU(2 * lD, lD);
    IU << Mat::Identity(lD, lD), upsilon(L, p);
    return IU.transpose() * Xi * IU;
}

}  // namespace fbsp

// ---------------------------------------------------------------- robust synthesis program

SynthesisProgram build_synthesis_program(const ExperimentData& data, const SchedulingBox& box,
                                         const SynthesisConfig& cfg)
{
    cfg.validate();
    const int n = data.n, m = data.m, ell = data.ell, T = data.T;
    if (box.ell() != ell) throw DimensionError("scheduling box dimension differs from the data");
    const auto reg = regressors(data);
    if (numerical_rank(reg.G) < (1 + ell) * (n + m))
        throw RankDeficiencyError("synthesis requires a full-rank regressor matrix");

    SynthesisProgram sp;
    sp.cfg = cfg;
    sp.n = n;
    sp.m = m;
    sp.ell = ell;
    sp.T = T;
    sp.G = reg.G;
    sp.Xp = cfg.w_known ? Mat(data.Xplus - data.W) : data.Xplus;
    sp.Delta = cfg.w_known ? Mat(Mat::Zero(n, n)) : Mat(std::sqrt(double(T)) * cfg.delta * Mat::Identity(n, n));
    sp.verts = vertices(box);
    sp.layout = {{n, n, n, n, T}, ell};

    auto& prog = sp.prog;
    sp.P = prog.declare_symmetric(n, "P");
    sp.Z0 = prog.declare_rectangular(m, n, "Z0");
    sp.Zbar = prog.declare_rectangular(m, ell * n, "Zbar");
    sp.F = prog.declare_rectangular(T, n * (1 + ell + ell * ell), "F");
    sp.Xi = prog.declare_symmetric(sp.layout.xi_dim(), "Xi");

    const AffineExpr P = AffineExpr::var(sp.P);
    const AffineExpr FQ = fq_expr(AffineExpr::var(sp.F), T, n, ell);
    const AffineExpr XF = FQ.lmul(fbsp::lifted_blkdiag(sp.Xp, ell));
    const AffineExpr Y = fbsp::pad(P, ell);
    const AffineExpr Ybar = fbsp::pad(P - AffineExpr::constant(cfg.epsilon * sp.Delta * sp.Delta.transpose()), ell);
    const AffineExpr Ep = fbsp::pad(AffineExpr::constant(cfg.epsilon * Mat::Identity(T, T)), ell);

    const AffineExpr o;
    const AffineExpr Phi = fbsp::assemble_phi(sp.layout, {{Y, o, XF.transpose(), Y, FQ.transpose()},
                                                          {o, cfg.sigma * Y, Y, o, o},
                                                          {o, o, Ybar, o, o},
                                                          {o, o, o, (1.0 / cfg.beta) * Y, o},
                                                          {o, o, o, o, Ep}});
    fbsp::add_constraints(prog, sp.layout, Phi, sp.Xi, sp.verts, cfg.margin, "stab");

    // G F = [[P,0,0],[0,I(x)P,0],[Z0,Zbar,0],[0,I(x)Z0,I(x)Zbar]]
    const AffineExpr Z0 = AffineExpr::var(sp.Z0), Zb = AffineExpr::var(sp.Zbar);
    const AffineExpr rhs = AffineExpr::blocks({n, ell * n, m, ell * m}, {n, ell * n, ell * ell * n},
                                              {{P, o, o},
                                               {o, P.kron_identity(ell), o},
                                               {Z0, Zb, o},
                                               {o, Z0.kron_identity(ell), Zb.kron_identity(ell)}});
    prog.add_equality(AffineExpr::var(sp.F).lmul(sp.G) - rhs, "gain-link");
    prog.add_psd(P, sdp::Sense::PSD, cfg.margin, "P");
    prog.add_trace_box(sp.P, cfg.trace_lo, cfg.trace_hi, "trace(P)");
    return sp;
}

SynthesisSolution solve_synthesis(const SynthesisProgram& sp, const sdp::SolverOptions& opts)
{
    SynthesisSolution s;
    s.raw = sdp::solve(sp.prog, opts);
    s.status = s.raw.status;
    s.P = s.raw.value(sp.P);
    s.Z0 = s.raw.value(sp.Z0);
    s.Zbar = s.raw.value(sp.Zbar);
    s.Fscr = s.raw.value(sp.F);
    s.Xi = s.raw.value(sp.Xi);
    s.FQ = build_fq(s.Fscr, sp.n, sp.ell);
    s.plug_in_ok = sdp::plug_in_check(sp.prog, s.raw.values, 10.0 * opts.tol, &s.plug_in_failure);
    if (s.status == sdp::Status::Feasible) {
        try {
            s.K = recover_gains(s.P, s.Z0, s.Zbar);
        } catch (const std::exception& e) {
            s.status = sdp::Status::NumericalFailure;
            s.plug_in_failure = e.what();
        }
    }
    return s;
}

// ---------------------------------------------------------------- pointwise certificate

Mat certificate_matrix(const Mat& P, const Mat& F, const Mat& Xp, const Mat& Delta, const SynthesisConfig& cfg)
{
    const auto n = P.rows(), T = F.rows();
    Mat M = Mat::Zero(4 * n + T, 4 * n + T);
    const Mat XF = Xp * F;
    M.block(0, 0, n, n) = P;
    M.block(n, n, n, n) = cfg.sigma * P;
    M.block(2 * n, 2 * n, n, n) = P - cfg.epsilon * Delta * Delta.transpose();
    M.block(3 * n, 3 * n, n, n) = P / cfg.beta;
    M.block(4 * n, 4 * n, T, T) = cfg.epsilon * Mat::Identity(T, T);
    M.block(0, 2 * n, n, n) = XF.transpose();
    M.block(2 * n, 0, n, n) = XF;
    M.block(0, 3 * n, n, n) = P;
    M.block(3 * n, 0, n, n) = P;
    M.block(0, 4 * n, n, T) = F.transpose();
    M.block(4 * n, 0, T, n) = F;
    M.block(n, 2 * n, n, n) = P;
    M.block(2 * n, n, n, n) = P;
    return M;
}

CertificateProgram build_certificate_program(const ExperimentData& data, const Mat& Fscr, const SynthesisConfig& cfg,
                                             const std::vector<Vec>& grid)
{
    cfg.validate();
    if (grid.empty()) throw std::invalid_argument("certificate program needs a non-empty grid");
    const int n = data.n, T = data.T, ell = data.ell;
    const Mat Xp = cfg.w_known ? Mat(data.Xplus - data.W) : data.Xplus;
    const Mat Delta = cfg.w_known ? Mat(Mat::Zero(n, n)) : Mat(std::sqrt(double(T)) * cfg.delta * Mat::Identity(n, n));
    CertificateProgram cp;
    cp.P = cp.prog.declare_symmetric(n, "P");
    const AffineExpr P = AffineExpr::var(cp.P);
    const AffineExpr o;
    const std::vector<int> sz{n, n, n, n, T};
    for (size_t g = 0; g < grid.size(); ++g) {
        const Mat F = eval_F(Fscr, n, ell, grid[g]);
        const AffineExpr XF = AffineExpr::constant(Xp * F);
        const AffineExpr Fe = AffineExpr::constant(F);
        const AffineExpr Pb = P - AffineExpr::constant(cfg.epsilon * Delta * Delta.transpose());
        const AffineExpr E = AffineExpr::constant(cfg.epsilon * Mat::Identity(T, T));
        const AffineExpr M = AffineExpr::blocks(sz, sz,
                                                {{P, o, XF.transpose(), P, Fe.transpose()},
                                                 {o, cfg.sigma * P, P, o, o},
                                                 {XF, P, Pb, o, o},
                                                 {P, o, o, (1.0 / cfg.beta) * P, o},
                                                 {Fe, o, o, o, E}});
        cp.prog.add_psd(M, sdp::Sense::PSD, cfg.margin, "t1:grid" + std::to_string(g));
    }
    return cp;
}

// ---------------------------------------------------------------- verification

ClosedLoopReport verify_closed_loop(const LpvSystem& sys, const AffineMatrixFunction& K, const Mat& P,
                                    const SchedulingBox& box, double beta, double sigma, double delta, int trials,
                                    int steps, std::uint64_t seed, double slack)
{
    ClosedLoopReport rep;
    rep.vertices_stable = true;
    for (const auto& v : vertices(box)) {
        const Mat Acl = eval_affine(sys.A, v) + eval_affine(sys.B, v) * eval_affine(K, v);
        rep.vertex_radii.push_back(spectral_radius(Acl));
        if (rep.vertex_radii.back() >= 1.0) rep.vertices_stable = false;
    }
    const Eigen::LDLT<Mat> Pinv(P);
    rep.decrease_ok = true;
    rep.worst_slack = -std::numeric_limits<double>::infinity();
    const FeedbackLaw fb = [&](int, const Vec& x, const Vec& p) { return Vec(eval_affine(K, p) * x); };
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = seed + 7919ULL * static_cast<std::uint64_t>(t);
        const Vec x0 = uniform_law(sys.n, -2.0, 2.0, s)(0);
        const auto tr = simulate(sys, fb, box_law(box, s + 1), ball_noise_law(sys.n, delta, s + 2), x0, steps);
        for (int k = 0; k < steps; ++k) {
            const Vec& x = tr.x[k];
            const Vec& xn = tr.x[k + 1];
            const Vec& w = tr.w[k];
            const double V = x.dot(Pinv.solve(x)), Vn = xn.dot(Pinv.solve(xn));
            const double lhs = Vn - V;
            const double rhs = -beta * V + sigma * w.dot(Pinv.solve(w));
            rep.worst_slack = std::max(rep.worst_slack, lhs - rhs);
            if (lhs > rhs + slack && rep.decrease_ok) {
                rep.decrease_ok = false;
                rep.first_violation_trial = t;
                rep.first_violation_step = k;
            }
        }
    }
    rep.pass = rep.vertices_stable && rep.decrease_ok;
    return rep;
}

IssConstants iss_constants(const Mat& P)
{
    const double lmin_P = lambda_min_sym(P);
    if (!(lmin_P > 0.0)) throw std::invalid_argument("iss_constants: P must be positive definite");
    const double lmax_P = lambda_max_sym(P);
    // eigenvalues of P^{-1} are reciprocals of those of P
    const double lmin_Pinv = 1.0 / lmax_P, lmax_Pinv = 1.0 / lmin_P;
    return {std::sqrt(lmax_Pinv / lmin_Pinv), 1.0 / std::sqrt(lmin_Pinv)};
}

}  // namespace lpvet
