#include "lpvet/trigger.hpp"

#include <cmath>

namespace lpvet {

using sdp::AffineExpr;

void TriggerConfig::validate() const
{
    if (Psi1.rows() != Psi1.cols() || Psi2.rows() != Psi2.cols() || Psi1.rows() != Psi2.rows())
        throw DimensionError("trigger matrices must be square and of equal size");
    if (!(lambda_min_sym(Psi1) > 0.0) || !(lambda_min_sym(Psi2) > 0.0))
        throw std::invalid_argument("trigger matrices must be positive definite");
    if (!(v > 0.0)) throw std::invalid_argument("v must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
}

void TriggerDesign::validate() const
{
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!(eps2 > 0.0)) throw std::invalid_argument("eps2 must be positive");
    if (!(beta2 > 0.0)) throw std::invalid_argument("beta2 must be positive");
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
}

AffineMatrixFunction extract_input_matrix(const ExperimentData& d, bool subtract_w)
{
    return identify(d, subtract_w).B();
}

Vec compute_nu(const AffineMatrixFunction& B, const AffineMatrixFunction& K, const Vec& x, const Vec& p,
               const EtState& et)
{
    if (x.size() != et.x_hat.size() || p.size() != et.p_hat.size()) throw DimensionError("compute_nu: size mismatch");
    const Mat Bp = eval_affine(B, p);
    const Mat Kp = eval_affine(K, p);
    const Mat Kh = eval_affine(K, et.p_hat);
    return Bp * Kp * (et.x_hat - x) + Bp * (Kh - Kp) * et.x_hat;
}

bool trigger_fire(const Vec& nu, const Vec& x, const TriggerConfig& cfg)
{
    return nu.dot(cfg.Psi1 * nu) >= x.dot(cfg.Psi2 * x) + cfg.v;
}

TriggerProgram build_trigger_program(const Mat& P, const Mat& FQ, const ExperimentData& data,
                                     const SchedulingBox& box, const TriggerDesign& design)
{
    design.validate();
    const int n = data.n, ell = data.ell, T = data.T;
    if (P.rows() != n || P.cols() != n) throw DimensionError("trigger program: P must be n x n");
    if (FQ.rows() != (1 + ell) * T || FQ.cols() != (1 + ell) * n) throw DimensionError("trigger program: F_Q shape");
    if (box.ell() != ell) throw DimensionError("scheduling box dimension differs from the data");
    if (!(lambda_min_sym(P) > 0.0)) throw std::invalid_argument("trigger program: P must be positive definite");

    TriggerProgram tp;
    tp.design = design;
    tp.layout = {{n, n, T}, ell};
    auto& prog = tp.prog;
    tp.P = P;
    tp.S1 = prog.declare_symmetric(n, "S1");
    tp.S2 = prog.declare_symmetric(n, "S2");
    tp.Xi = prog.declare_symmetric(tp.layout.xi_dim(), "Xi");

    const Mat Xp = design.w_known ? Mat(data.Xplus - data.W) : data.Xplus;
    const Mat Delta = design.w_known ? Mat(Mat::Zero(n, n)) : Mat(std::sqrt(double(T)) * design.delta * Mat::Identity(n, n));
    const double mu = design.mu, e2 = design.eps2;

    const AffineExpr S1 = AffineExpr::var(tp.S1), S2 = AffineExpr::var(tp.S2);
    const AffineExpr O11 = S2 + AffineExpr::constant(-mu * design.beta2 * P);
    const AffineExpr O22 = -S1 + AffineExpr::constant(e2 * mu * mu * Delta * Delta.transpose());
    const AffineExpr O33 = AffineExpr::constant(-e2 * Mat::Identity(T, T));
    const AffineExpr XF = AffineExpr::constant(mu * fbsp::lifted_blkdiag(Xp, ell) * FQ);
    const AffineExpr Fq = AffineExpr::constant(FQ);

    const AffineExpr o;
    const AffineExpr Phi = -fbsp::assemble_phi(tp.layout, {{fbsp::pad(O11, ell), XF.transpose(), Fq.transpose()},
                                                           {o, fbsp::pad(O22, ell), o},
                                                           {o, o, fbsp::pad(O33, ell)}});
    fbsp::add_constraints(prog, tp.layout, Phi, tp.Xi, vertices(box), design.margin, "trig");
    prog.add_psd(S1, sdp::Sense::PSD, design.margin, "Psi1");
    prog.add_psd(S2, sdp::Sense::PSD, design.margin, "Psi2");
    return tp;
}

TriggerSolution solve_trigger(const TriggerProgram& tp, const sdp::SolverOptions& opts)
{
    TriggerSolution s;
    s.raw = sdp::solve(tp.prog, opts);
    s.status = s.raw.status;
    const Eigen::LDLT<Mat> Pf(tp.P);
    auto unscale = [&](const Mat& S) {
        const Mat M = Pf.solve(Pf.solve(S).transpose());
        return Mat(0.5 * (M + M.transpose()));
    };
    s.Psi1 = unscale(s.raw.value(tp.S1));
    s.Psi2 = unscale(s.raw.value(tp.S2));
    s.Xi = s.raw.value(tp.Xi);
    s.plug_in_ok = sdp::plug_in_check(tp.prog, s.raw.values, 10.0 * opts.tol, &s.plug_in_failure);
    return s;
}

SimulationTrace simulate_event_triggered(const LpvSystem& sys, const AffineMatrixFunction& K,
                                         const TriggerConfig& cfg, const AffineMatrixFunction& B_est,
                                         const SignalLaw& schedule, const SignalLaw& noise, const Vec& x0, int N)
{
    cfg.validate();
    if (N < 1) throw std::invalid_argument("simulate_event_triggered: N must be >= 1");
    if (x0.size() != sys.n) throw DimensionError("simulate_event_triggered: x0 length differs from n");
    SimulationTrace tr;
    tr.N = N;
    tr.x.push_back(x0);
    EtState et;
    for (int k = 0; k < N; ++k) {
        const Vec& x = tr.x.back();
        const Vec p = schedule(k);
        const Vec w = noise(k);
        bool fire = k == 0;
        if (!fire) fire = trigger_fire(compute_nu(B_est, K, x, p, et), x, cfg);
        if (fire) {
            et.x_hat = x;
            et.p_hat = p;
            et.u_held = eval_affine(K, p) * x;
            et.k_hat = k;
        }
        // nu actually injected at this step (zero right after a transmission)
        tr.nu.push_back(compute_nu(B_est, K, x, p, et));
        auto s = step(sys, x, et.u_held, p, w);
        tr.u.push_back(et.u_held);
        tr.p.push_back(p);
        tr.w.push_back(w);
        tr.y.push_back(s.y);
        tr.triggered.push_back(fire);
        tr.x.push_back(std::move(s.x_next));
    }
    return tr;
}

DecreaseReport practical_decrease_check(const SimulationTrace& tr, const Mat& P, const TriggerConfig& cfg,
                                        double sigma, double slack)
{
    DecreaseReport rep;
    rep.worst_slack = -std::numeric_limits<double>::infinity();
    if (tr.nu.size() != static_cast<size_t>(tr.N)) throw std::invalid_argument("decrease check needs nu per step");
    const Eigen::LDLT<Mat> Pinv(P);
    const double lmax_Pinv = 1.0 / lambda_min_sym(P);
    for (int k = 0; k < tr.N; ++k) {
        const Vec& x = tr.x[k];
        const Vec& xn = tr.x[k + 1];
        const double V = x.dot(Pinv.solve(x)), Vn = xn.dot(Pinv.solve(xn));
        const double rhs = -cfg.beta2 * V + sigma * lmax_Pinv * (tr.nu[k] + tr.w[k]).squaredNorm() + cfg.v / cfg.mu;
        const double gap = Vn - V - rhs;
        rep.worst_slack = std::max(rep.worst_slack, gap);
        if (gap > slack && rep.pass) {
            rep.pass = false;
            rep.first_violation = k;
        }
    }
    return rep;
}

std::vector<int> detector_violations(const SimulationTrace& tr, const TriggerConfig& cfg)
{
    std::vector<int> bad;
    for (int k = 0; k < tr.N; ++k)
        if (!tr.triggered[k] && trigger_fire(tr.nu[k], tr.x[k], cfg)) bad.push_back(k);
    return bad;
}

InterEventStats inter_event_stats(const SimulationTrace& tr)
{
    InterEventStats s;
    int last = -1;
    for (int k = 0; k < tr.N; ++k) {
        if (!tr.triggered[k]) continue;
        if (last >= 0) s.max_interval = std::max(s.max_interval, k - last);
        last = k;
        ++s.count;
    }
    if (last >= 0) s.max_interval = std::max(s.max_interval, tr.N - last);
    s.mean_interval = s.count ? double(tr.N) / s.count : 0.0;
    return s;
}

double iss_practical_constant(const Mat& P, double mu, double beta2)
{
    if (!(beta2 > 0.0)) throw std::invalid_argument("beta2 must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    const double c1 = iss_constants(P).c1;
    return c1 / (mu * (1.0 - std::exp(-beta2 / 2.0)));
}

}  // namespace lpvet
