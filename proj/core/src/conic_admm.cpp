#include "lpvet/conic_admm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

namespace lpvet::sdp {

int svec_size(int d)
{
    return d * (d + 1) / 2;
}

int svec_index(int i, int j, int d)
{
    return j * d - j * (j - 1) / 2 + (i - j);
}

Vec svec(const Mat& S)
{
    const int d = static_cast<int>(S.rows());
    Vec v(svec_size(d));
    const double r2 = std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < d; ++j)
        for (int i = j; i < d; ++i) v(k++) = i == j ? S(i, i) : r2 * 0.5 * (S(i, j) + S(j, i));
    return v;
}

Mat smat(const Eigen::Ref<const Vec>& v, int d)
{
    Mat S(d, d);
    const double r2 = std::sqrt(0.5);
    int k = 0;
    for (int j = 0; j < d; ++j)
        for (int i = j; i < d; ++i, ++k) S(i, j) = S(j, i) = i == j ? v(k) : r2 * v(k);
    return S;
}

void project_psd_svec(Eigen::Ref<Vec> v, int d)
{
    if (d == 0) return;
    if (d == 1) {
        v(0) = std::max(v(0), 0.0);
        return;
    }
    const Mat S = smat(v, d);
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const Vec& lam = es.eigenvalues();
    if (lam(0) >= 0.0) return;
    // eigenvalues ascending; rebuild from whichever side has fewer terms
    int neg = 0;
    while (neg < d && lam(neg) < 0.0) ++neg;
    Mat P;
    if (neg <= d - neg) {
        const Mat Vn = es.eigenvectors().leftCols(neg);
        P = S - Vn * lam.head(neg).asDiagonal() * Vn.transpose();
    } else {
        const Mat Vp = es.eigenvectors().rightCols(d - neg);
        P = Vp * lam.tail(d - neg).asDiagonal() * Vp.transpose();
    }
    v = svec(P);
}

namespace {

struct Cones {
    int zero, nonneg;
    std::vector<int> psd;
    std::vector<int> psd_offset;
};

/// Projection onto the dual cone; the zero cone dualizes to the free cone, so those rows pass through.
void project_dual_cone(Eigen::Ref<Vec> y, const Cones& k)
{
    for (int i = 0; i < k.nonneg; ++i) y(k.zero + i) = std::max(y(k.zero + i), 0.0);
    for (size_t c = 0; c < k.psd.size(); ++c) {
        const int d = k.psd[c];
        project_psd_svec(y.segment(k.psd_offset[c], svec_size(d)), d);
    }
}

double block_residual(const Vec& r, const Cones& k)
{
    double worst = 0.0;
    for (int i = 0; i < k.zero + k.nonneg; ++i) worst = std::max(worst, std::abs(r(i)));
    for (size_t c = 0; c < k.psd.size(); ++c)
        worst = std::max(worst, r.segment(k.psd_offset[c], svec_size(k.psd[c])).norm());
    return r.allFinite() ? worst : std::numeric_limits<double>::infinity();
}

}  // namespace

ConicResult AdmmSolver::solve(const ConicProblem& prob, const SolverOptions& opts) const
{
    const auto t0 = std::chrono::steady_clock::now();
    const int m = static_cast<int>(prob.A.rows());
    const int n = static_cast<int>(prob.A.cols());
    ConicResult out;
    out.x = Vec::Zero(n);

    Cones cones{prob.zero, prob.nonneg, prob.psd, {}};
    int off = prob.zero + prob.nonneg;
    for (int d : prob.psd) {
        cones.psd_offset.push_back(off);
        off += svec_size(d);
    }
    if (off != m) {
        out.message = "cone sizes do not match the constraint rows";
        return out;
    }

    // Ruiz equilibration; PSD blocks share one row factor to keep the cone invariant
    SpMat A = prob.A;
    Vec D = Vec::Ones(m), E = Vec::Ones(n);
    for (int pass = 0; pass < settings_.scale_passes; ++pass) {
        Vec rn = Vec::Zero(m), cn = Vec::Zero(n);
        for (int k = 0; k < A.outerSize(); ++k)
            for (SpMat::InnerIterator it(A, k); it; ++it) rn(it.row()) = std::max(rn(it.row()), std::abs(it.value()));
        for (size_t c = 0; c < cones.psd.size(); ++c) {
            auto seg = rn.segment(cones.psd_offset[c], svec_size(cones.psd[c]));
            seg.setConstant(seg.mean());
        }
        Vec d = rn.unaryExpr([](double r) { return r > 1e-8 ? 1.0 / std::sqrt(r) : 1.0; });
        d = d.cwiseMax(1e-4).cwiseMin(1e4);
        A = d.asDiagonal() * A;
        for (int k = 0; k < A.outerSize(); ++k)
            for (SpMat::InnerIterator it(A, k); it; ++it) cn(k) = std::max(cn(k), std::abs(it.value()));
        Vec e = cn.unaryExpr([](double c) { return c > 1e-8 ? 1.0 / std::sqrt(c) : 1.0; });
        e = e.cwiseMax(1e-4).cwiseMin(1e4);
        A = A * e.asDiagonal();
        D = D.cwiseProduct(d);
        E = E.cwiseProduct(e);
    }
    double mean_col = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        double s = 0.0;
        for (SpMat::InnerIterator it(A, k); it; ++it) s += it.value() * it.value();
        mean_col += std::sqrt(s);
    }
    mean_col = n ? mean_col / n : 1.0;
    if (!(mean_col > 0.0)) mean_col = 1.0;
    Vec bh = D.cwiseProduct(prob.b);
    Vec ch = E.cwiseProduct(prob.c);
    const double sc_b = mean_col / std::max(bh.norm(), 1e-6);
    const double sc_c = ch.norm() > 0 ? mean_col / ch.norm() : 1.0;
    bh *= sc_b;
    ch *= sc_c;

    // (I + A'A) factorization for the embedded linear system
    SpMat K = SpMat(A.transpose()) * A;
    for (int i = 0; i < n; ++i) K.coeffRef(i, i) += 1.0;
    K.makeCompressed();
    Eigen::SimplicialLLT<SpMat> llt(K);
    if (llt.info() != Eigen::Success) {
        out.message = "factorization failed";
        return out;
    }
    const SpMat At = A.transpose();
    auto solve_M = [&](const Vec& rx, const Vec& ry, Vec& x, Vec& y) {
        x = llt.solve(rx - At * ry);
        y = ry + A * x;
    };
    Vec gx, gy;
    solve_M(ch, bh, gx, gy);
    const double hg = ch.dot(gx) + bh.dot(gy);

    const int l = n + m + 1;
    const double alpha = settings_.alpha;

    // The iteration is a fixed-point map on q = u - v: u = proj(q), v = u - q.
    auto split = [&](const Vec& q, Vec& u, Vec& v) {
        u = q;
        project_dual_cone(u.segment(n, m), cones);
        u(l - 1) = std::max(u(l - 1), 0.0);
        v = u - q;
    };
    Vec px, py, ut(l), u, v;
    auto fixed_point = [&](const Vec& q) {
        split(q, u, v);
        const Vec w = u + v;
        solve_M(w.head(n), w.segment(n, m), px, py);
        const double tau = (w(l - 1) + ch.dot(px) + bh.dot(py)) / (1.0 + hg);
        ut.head(n) = px - tau * gx;
        ut.segment(n, m) = py - tau * gy;
        ut(l - 1) = tau;
        ut.tail(m + 1) = alpha * ut.tail(m + 1) + (1.0 - alpha) * u.tail(m + 1);
        return Vec(ut - v);
    };

    const int mem = settings_.anderson_memory;
    Mat dG(l, std::max(mem, 1)), dF(l, std::max(mem, 1));
    int cols = 0, head = 0;
    Vec q = Vec::Zero(l);
    q(l - 1) = 1.0;
    Vec q_prev, g_prev, f_prev, plain_backup;
    double res_prev = std::numeric_limits<double>::infinity();
    bool last_was_aa = false;

    for (int it = 1; it <= opts.max_iters; ++it) {
        Vec fq = fixed_point(q);
        Vec g = q - fq;
        const double res = g.norm();
        if (last_was_aa && res > res_prev) {
            // safeguard: fall back to the plain iterate and restart the memory
            q = plain_backup;
            cols = head = 0;
            q_prev.resize(0);
            last_was_aa = false;
            fq = fixed_point(q);
            g = q - fq;
        }
        res_prev = g.norm();
        Vec q_next = fq;
        last_was_aa = false;
        if (mem > 0) {
            if (q_prev.size()) {
                dG.col(head) = g - g_prev;
                dF.col(head) = fq - f_prev;
                head = (head + 1) % mem;
                cols = std::min(cols + 1, mem);
            }
            q_prev = q;
            g_prev = g;
            f_prev = fq;
            if (cols > 0) {
                const auto Gc = dG.leftCols(cols);
                Mat H = Gc.transpose() * Gc;
                H.diagonal().array() += 1e-10 * (H.trace() + 1e-30);
                const Vec gamma = H.ldlt().solve(Gc.transpose() * g);
                if (gamma.allFinite()) {
                    plain_backup = fq;
                    q_next = fq - dF.leftCols(cols) * gamma;
                    last_was_aa = true;
                }
            }
        }

        if (it % settings_.check_every == 0 || it == opts.max_iters) {
            out.iterations = it;
            split(fq, u, v);
            const double ta = u(l - 1), ka = v(l - 1);
            if (ta > 1e-12) {
                const Vec x = E.cwiseProduct(u.head(n)) / (ta * sc_b);
                const Vec s = v.segment(n, m).cwiseQuotient(D) / (ta * sc_b);
                const Vec r = prob.A * x + s - prob.b;
                const double pres = block_residual(r, cones);
                out.primal_residual = pres;
                if (opts.verbose && it % 1000 == 0)
                    std::cerr << "admm it " << it << " pres " << pres << " tau " << ta << " kappa " << ka
                              << " fp " << res_prev << "\n";
                if (pres <= opts.tol) {
                    out.x = x;
                    out.status = Status::Feasible;
                    out.message = "converged";
                    return out;
                }
            }
            Vec y = D.cwiseProduct(u.segment(n, m));
            const double by = prob.b.dot(y);
            if (by < 0.0) {
                y /= -by;
                const double aty = (prob.A.transpose() * y).lpNorm<Eigen::Infinity>();
                out.dual_residual = aty;
                if (aty <= settings_.infeas_tol) {
                    out.status = Status::Infeasible;
                    out.message = "primal infeasibility certificate";
                    return out;
                }
            }
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (elapsed > opts.time_limit_s) {
                out.message = "time limit";
                break;
            }
        }
        q = std::move(q_next);
    }
    if (out.message.empty()) out.message = "iteration cap";
    split(q, u, v);
    if (u(l - 1) > 1e-12) out.x = E.cwiseProduct(u.head(n)) / (u(l - 1) * sc_b);
    return out;
}

}  // namespace lpvet::sdp
