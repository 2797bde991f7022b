// SPDX-License-Identifier: Apache-2.0
#include "remskit/solver.hpp"

#include <cmath>

#include "remskit/errors.hpp"

namespace remskit {

namespace {

// Solves a x = rhs after checking the condition number of a.
CMatrix solve_checked(const CMatrix& a, const CMatrix& rhs, const std::string& loop)
{
    double c = condition_number(a);
    if (!(c <= kMaxCondition))
        throw ConditioningError(loop, c);
    return a.partialPivLu().solve(rhs);
}

CVector or_zeros(const CVector& v, Eigen::Index n, const char* what)
{
    if (v.size() == 0)
        return CVector::Zero(n);
    if (v.size() != n)
        throw InputError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                         std::to_string(v.size()));
    return v;
}

CMatrix diag(const std::vector<Complex>& z)
{
    CMatrix d = CMatrix::Zero(z.size(), z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        d(i, i) = z[i];
    return d;
}

double rel_residual(const CVector& r, double scale) { return r.norm() / std::max(scale, 1e-300); }

}  // namespace

void RemsModel::validate() const
{
    frontend.validate();
    tuning.validate();
    if (!radiating)
        throw InputError("model has no radiating structure");
    radiating->validate();
    if (tuning.n != frontend.n())
        throw InputError("tuning network has " + std::to_string(tuning.n) + " frontend ports, frontend has " +
                         std::to_string(frontend.n()));
    if (tuning.m != radiating->ports())
        throw InputError("tuning network has " + std::to_string(tuning.m) + " radiating ports, structure has " +
                         std::to_string(radiating->ports()));
}

SolveInputs SolveInputs::zeros(const RemsModel& model)
{
    SolveInputs in;
    in.v_tx = CVector::Zero(model.n_tx());
    in.v_gamma = CVector::Zero(model.n_rx());
    in.i_gamma = CVector::Zero(model.n_rx());
    in.v_upsilon = CVector::Zero(model.m());
    in.b_f = FarFieldPattern(model.radiating->grid);
    return in;
}

SolveState solve_direct(const RemsModel& model, const SolveInputs& in)
{
    model.validate();
    const auto& rad = *model.radiating;
    const int n = model.tuning.n, m = model.m(), nt = model.n_tx(), nr = model.n_rx();
    CVector v_tx = or_zeros(in.v_tx, nt, "v_tx");
    CVector v_g = or_zeros(in.v_gamma, nr, "v_gamma");
    CVector i_g = or_zeros(in.i_gamma, nr, "i_gamma");
    CVector v_u = or_zeros(in.v_upsilon, m, "v_upsilon");
    FarFieldPattern b_f = in.b_f.grid() ? in.b_f : FarFieldPattern(rad.grid);
    require_same_grid(*rad.grid, *b_f.grid());
    if (!rad.extrinsic_noise_enabled && v_u.squaredNorm() > 0.0)
        throw InputError("extrinsic noise input given but the structure has it disabled");

    const auto k = assemble_k_matrices(model.frontend);
    const double sr0 = std::sqrt(model.r0());
    const CVector u = v_u / (2.0 * sr0);
    const CVector r = apply_receive(rad, b_f);

    // unknowns: [a_T | b_T | a_R | b_R | a_rt | b_rt]
    const int oa = 0, ob = n, oar = 2 * n, obr = 2 * n + m, oat = 2 * n + 2 * m, obt = 2 * n + 3 * m;
    const int dim = 2 * n + 4 * m;
    CMatrix a = CMatrix::Zero(dim, dim);
    CVector rhs = CVector::Zero(dim);
    const auto& t = model.tuning;
    int row = 0;
    // b_T = S_TT a_T + S_TR b_R
    a.block(row, ob, n, n).setIdentity();
    a.block(row, oa, n, n) -= t.tt();
    a.block(row, obr, n, m) -= t.tr();
    row += n;
    // a_R = S_RT a_T + S_RR b_R
    a.block(row, oar, m, m).setIdentity();
    a.block(row, oa, m, n) -= t.rt();
    a.block(row, obr, m, m) -= t.rr();
    row += m;
    // a_rt = a_R + u
    a.block(row, oat, m, m).setIdentity();
    a.block(row, oar, m, m) -= CMatrix::Identity(m, m);
    rhs.segment(row, m) = u;
    row += m;
    // b_R = b_rt - u
    a.block(row, obr, m, m).setIdentity();
    a.block(row, obt, m, m) -= CMatrix::Identity(m, m);
    rhs.segment(row, m) = -u;
    row += m;
    // b_rt = coupling a_rt + receive(b_F)
    a.block(row, obt, m, m).setIdentity();
    a.block(row, oat, m, m) -= rad.coupling;
    rhs.segment(row, m) = r;
    row += m;
    // a_T = S_RF b_T + K_vtx v_tx + K_igamma i_gamma + K_vgamma v_gamma
    a.block(row, oa, n, n).setIdentity();
    a.block(row, ob, n, n) -= k.s_rf;
    rhs.segment(row, n) = k.k_vtx * v_tx + k.k_igamma * i_g + k.k_vgamma * v_g;

    Eigen::FullPivLU<CMatrix> lu(a);
    if (!lu.isInvertible())
        throw NumericError("direct system is singular");
    CVector x = lu.solve(rhs);

    SolveState s;
    s.a_t = x.segment(oa, n);
    s.b_t = x.segment(ob, n);
    s.a_r = x.segment(oar, m);
    s.b_r = x.segment(obr, m);
    s.a_rt = x.segment(oat, m);
    s.b_rt = x.segment(obt, m);
    s.b_f = b_f;
    s.a_f = apply_transmit(rad, s.a_rt);
    s.a_f.values() += apply_scatter(rad, b_f).values();
    s.v_rx = k.k_vrx * (s.b_t - s.a_t) + diag(model.frontend.z_rx) * i_g;

    const double scale = x.norm() + rhs.norm();
    CVector res = a * x - rhs;
    row = 0;
    for (int len : {n, m, m, m, m, n}) {
        s.residuals.push_back(rel_residual(res.segment(row, len), scale));
        row += len;
    }
    return s;
}

CMatrix transmit_port_map(const RemsModel& model)
{
    model.validate();
    const auto& t = model.tuning;
    const auto& c = model.radiating->coupling;
    const int n = t.n, m = t.m;
    const auto k = assemble_k_matrices(model.frontend);
    const CMatrix in = CMatrix::Identity(n, n), im = CMatrix::Identity(m, m);
    CMatrix l1 = k.s_rf * t.tt();
    CMatrix l2 = t.rr() * c;
    CMatrix i_l2_rt = solve_checked(im - l2, t.rt(), "(I - L2)");
    CMatrix l3 = k.s_rf * t.tr() * c * i_l2_rt;
    CMatrix a_t = solve_checked(in - l1 - l3, k.k_vtx, "(I - L1 - L3)");
    return i_l2_rt * a_t;
}

GainOperators build_gain_operators(const RemsModel& model)
{
    model.validate();
    const auto& rad = *model.radiating;
    const auto& t = model.tuning;
    const auto& c = rad.coupling;
    const int n = t.n, m = t.m;
    const auto k = assemble_k_matrices(model.frontend);
    const CMatrix in = CMatrix::Identity(n, n), im = CMatrix::Identity(m, m);

    GainOperators g;
    g.radiating = model.radiating;
    g.n_tx = model.n_tx();
    g.n_rx = model.n_rx();
    g.m = m;

    // transmit side: loops L1, L2, L3
    CMatrix l1 = k.s_rf * t.tt();
    CMatrix l2 = t.rr() * c;
    CMatrix i_l2_rt = solve_checked(im - l2, t.rt(), "(I - L2)");
    CMatrix l3 = k.s_rf * t.tr() * c * i_l2_rt;
    CMatrix tx_loop = in - l1 - l3;
    double cond13 = condition_number(tx_loop);
    if (!(cond13 <= kMaxCondition))
        throw ConditioningError("(I - L1 - L3)", cond13);
    Eigen::PartialPivLU<CMatrix> lu13(tx_loop);
    // b_T - a_T per unit a_T
    CMatrix reflect = t.tr() * c * i_l2_rt + t.tt() - in;

    CMatrix port_map = i_l2_rt * lu13.solve(k.k_vtx);
    g.g_vtx_af = rad.tx * port_map;
    g.g_vtx_vrx = k.k_vrx * reflect * lu13.solve(k.k_vtx);
    g.g_vgamma_vrx = k.k_vrx * reflect * lu13.solve(k.k_vgamma);
    g.g_igamma_vrx = k.k_vrx * reflect * lu13.solve(k.k_igamma) + diag(model.frontend.z_rx);

    // receive side: loops L5, L6, L7
    CMatrix l5 = t.tt() * k.s_rf;
    CMatrix i_l5_tr = solve_checked(in - l5, t.tr(), "(I - L5)");
    CMatrix l6 = c * t.rr();
    CMatrix l7 = c * t.rt() * k.s_rf * i_l5_tr;
    CMatrix rx_loop = im - l6 - l7;
    double cond67 = condition_number(rx_loop);
    if (!(cond67 <= kMaxCondition))
        throw ConditioningError("(I - L6 - L7)", cond67);
    Eigen::PartialPivLU<CMatrix> lu67(rx_loop);
    CMatrix q = t.rt() * k.s_rf * i_l5_tr + t.rr();
    CMatrix inv67 = lu67.solve(im);
    g.bf_af_left = rad.tx * (q * inv67);
    CMatrix rx_chain = k.k_vrx * (in - k.s_rf) * i_l5_tr * inv67;
    g.bf_vrx_left = rx_chain;
    if (rad.extrinsic_noise_enabled)
        g.g_vupsilon_vrx = rx_chain * (c - im) / (2.0 * std::sqrt(model.r0()));
    else
        g.g_vupsilon_vrx = CMatrix::Zero(g.n_rx, m);
    return g;
}

FarFieldPattern GainOperators::apply_vtx_af(const CVector& v_tx) const
{
    if (v_tx.size() != n_tx)
        throw InputError("v_tx length mismatch");
    return FarFieldPattern(radiating->grid, g_vtx_af * v_tx);
}

FarFieldPattern GainOperators::apply_bf_af(const FarFieldPattern& b, Backend backend) const
{
    FarFieldPattern out = apply_scatter(*radiating, b, backend);
    out.values() += bf_af_left * apply_receive(*radiating, b);
    return out;
}

CVector GainOperators::apply_bf_vrx(const FarFieldPattern& b) const { return bf_vrx_left * apply_receive(*radiating, b); }

Outputs evaluate(const GainOperators& g, const SolveInputs& in)
{
    const CVector v_tx = or_zeros(in.v_tx, g.n_tx, "v_tx");
    const CVector v_g = or_zeros(in.v_gamma, g.n_rx, "v_gamma");
    const CVector i_g = or_zeros(in.i_gamma, g.n_rx, "i_gamma");
    const CVector v_u = or_zeros(in.v_upsilon, g.m, "v_upsilon");
    Outputs o;
    o.v_rx = g.g_vtx_vrx * v_tx + g.g_vgamma_vrx * v_g + g.g_igamma_vrx * i_g + g.g_vupsilon_vrx * v_u;
    o.a_f = g.apply_vtx_af(v_tx);
    if (in.b_f.grid()) {
        o.v_rx += g.apply_bf_vrx(in.b_f);
        o.a_f.values() += g.apply_bf_af(in.b_f).values();
    }
    return o;
}

PowerMetrics power_metrics(const SolveState& s)
{
    PowerMetrics p;
    p.p_t = s.a_t.squaredNorm() - s.b_t.squaredNorm();
    p.p_r = s.a_r.squaredNorm() - s.b_r.squaredNorm();
    p.p_f = (s.a_f.grid() ? total_power(s.a_f) : 0.0) - (s.b_f.grid() ? total_power(s.b_f) : 0.0);
    return p;
}

double available_power(const CVector& v_tx, const std::vector<Complex>& z_tx)
{
    if (std::size_t(v_tx.size()) != z_tx.size())
        throw InputError("available_power: v_tx and Z_Tx sizes differ");
    double p = 0.0;
    for (std::size_t i = 0; i < z_tx.size(); ++i) {
        if (!(z_tx[i].real() > 0.0))
            throw InputError("PA impedance needs a strictly positive real part");
        p += std::norm(v_tx[i]) / z_tx[i].real();
    }
    return 0.25 * p;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

static double gain_denominator(const RemsModel& model, const CVector& v_tx)
{
    double den = 4.0 * available_power(v_tx, model.frontend.z_tx);
    if (!(den > 0.0))
        throw InputError("rems_gain needs a nonzero drive");
    return den;
}

double rems_gain(const RemsModel& model, const CVector& v_tx, Direction d)
{
    const double den = gain_denominator(model, v_tx);
    CVector ports = transmit_port_map(model) * v_tx;
    Vec2c a = model.radiating->tx_at(d) * ports;
    return 16.0 * kPi * a.squaredNorm() / den;
}

std::vector<double> rems_gain_slice(const RemsModel& model, const CVector& v_tx, const std::vector<Direction>& dirs,
                                    Backend backend)
{
    const double den = gain_denominator(model, v_tx);
    CVector ports = transmit_port_map(model) * v_tx;
    CMatrix rows = interpolate_rows(*model.radiating->grid, model.radiating->tx, dirs);
    auto out = kernels::block_intensities(rows, ports, backend);
    for (auto& v : out)
        v *= 16.0 * kPi / den;
    return out;
}

Efficiencies efficiencies(const RemsModel& model, const CVector& v_tx, Direction d)
{
    Efficiencies e;
    e.p_a = available_power(v_tx, model.frontend.z_tx);
    if (!(e.p_a > 0.0))
        throw NumericError("undefined stage: available power is zero");
    SolveInputs in = SolveInputs::zeros(model);
    in.v_tx = v_tx;
    SolveState s = solve_direct(model, in);
    auto p = power_metrics(s);
    e.p_t = p.p_t;
    e.p_r = p.p_r;
    e.p_f = p.p_f;
    const double tiny = 1e-14 * e.p_a;
    if (!(e.p_t > tiny))
        throw NumericError("undefined stage: tuning efficiency (accepted power P_T is ~0)");
    if (!(e.p_r > tiny))
        throw NumericError("undefined stage: radiating efficiency (power into the structure P_R is ~0)");
    if (!(e.p_f > tiny))
        throw NumericError("undefined stage: directivity (radiated power P_F is ~0)");
    e.eta_matching = e.p_t / e.p_a;
    e.eta_tuning = e.p_r / e.p_t;
    e.eta_radiating = e.p_f / e.p_r;
    e.directivity = 4.0 * kPi * intensity(s.a_f, d) / e.p_f;
    return e;
}

static void require_psd(const CMatrix& c, const char* what)
{
    if (c.size() == 0)
        return;
    if (c.rows() != c.cols())
        throw InputError(std::string(what) + " covariance must be square");
    const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
    if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InputError(std::string(what) + " covariance is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12 * scale)
        throw InputError(std::string(what) + " covariance is not positive semidefinite");
}

static CMatrix sized(const CMatrix& c, Eigen::Index n, const char* what)
{
    if (c.size() == 0)
        return CMatrix::Zero(n, n);
    if (c.rows() != n || c.cols() != n)
        throw InputError(std::string(what) + " covariance has the wrong size");
    return c;
}

CMatrix noise_covariance(const GainOperators& g, const NoiseCovariances& cov)
{
    CMatrix sv = sized(cov.v_gamma, g.n_rx, "v_gamma");
    CMatrix si = sized(cov.i_gamma, g.n_rx, "i_gamma");
    CMatrix su = sized(cov.v_upsilon, g.m, "v_upsilon");
    CMatrix cr = sized(cov.vi_cross, g.n_rx, "cross");
    CMatrix joint(2 * g.n_rx, 2 * g.n_rx);
    joint << sv, cr, cr.adjoint(), si;
    require_psd(joint, "LNA noise");
    require_psd(su, "extrinsic noise");
    const auto& gv = g.g_vgamma_vrx;
    const auto& gi = g.g_igamma_vrx;
    const auto& gu = g.g_vupsilon_vrx;
    CMatrix out = gv * sv * gv.adjoint() + gi * si * gi.adjoint() + gv * cr * gi.adjoint() +
                  gi * cr.adjoint() * gv.adjoint() + gu * su * gu.adjoint();
    return 0.5 * (out + out.adjoint());
}

}  // namespace remskit
