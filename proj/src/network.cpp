// SPDX-License-Identifier: Apache-2.0
#include "remskit/network.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "remskit/errors.hpp"
#include "remskit/numio.hpp"

namespace remskit {

PassivityReport passivity_check(const CMatrix& s)
{
    if (s.rows() != s.cols())
        throw InputError("passivity check needs a square matrix");
    PassivityReport r;
    if (s.size() == 0) {
        r.passive = true;
        return r;
    }
    Eigen::JacobiSVD<CMatrix> svd(s);
    r.sigma_max = svd.singularValues()[0];
    r.passive = r.sigma_max <= 1.0 + 1e-9;
    return r;
}

Complex impedance_to_reflection(Complex z, double r0)
{
    if (!(r0 > 0.0))
        throw InputError("reference resistance must be positive");
    if (std::isinf(z.real()) || std::isinf(z.imag()))
        return 1.0;
    if (std::isnan(z.real()) || std::isnan(z.imag()))
        throw InputError("impedance is NaN");
    if (z.real() < 0.0)
        throw InputError("impedance with negative real part");
    Complex den = z + r0;
    if (std::abs(den) <= 1e-15 * r0)
        throw InputError("impedance equals -r0; reflection undefined");
    return (z - r0) / den;
}

double condition_number(const CMatrix& a)
{
    if (a.size() == 0)
        return 1.0;
    Eigen::BDCSVD<CMatrix> svd(a);
    const auto& sv = svd.singularValues();
    double lo = sv[sv.size() - 1];
    if (!(lo > 0.0))
        return std::numeric_limits<double>::infinity();
    return sv[0] / lo;
}

void TuningNetwork::validate() const
{
    if (n < 0 || m < 1)
        throw InputError("tuning network needs N >= 0 and M >= 1");
    if (s.rows() != n + m || s.cols() != n + m)
        throw InputError("tuning network matrix must be (N+M) x (N+M)");
}

TuningNetwork TuningNetwork::through(int ports)
{
    TuningNetwork t;
    t.n = ports;
    t.m = ports;
    t.s = CMatrix::Zero(2 * ports, 2 * ports);
    t.s.topRightCorner(ports, ports).setIdentity();
    t.s.bottomLeftCorner(ports, ports).setIdentity();
    return t;
}

void ReconfigurableNetwork::validate() const
{
    const int k = n + m + r;
    if (n < 0 || m < 1 || r < 0)
        throw InputError("reconfigurable network needs N >= 0, M >= 1, R >= 0");
    if (fixed.rows() != k || fixed.cols() != k)
        throw InputError("fixed network matrix must be (N+M+R) square");
    for (auto z : z_set)
        if (z.real() < 0.0)
            throw InputError("allowed impedances need a nonnegative real part");
}

ReconfigurableNetwork ReconfigurableNetwork::feeds_and_loads(int n, int r, std::vector<Complex> z_set, double r0)
{
    ReconfigurableNetwork net;
    net.n = n;
    net.m = n + r;
    net.r = r;
    net.r0 = r0;
    net.z_set = std::move(z_set);
    const int k = n + net.m + r;
    net.fixed = CMatrix::Zero(k, k);
    for (int i = 0; i < n; ++i) {
        net.fixed(i, n + i) = 1.0;
        net.fixed(n + i, i) = 1.0;
    }
    for (int j = 0; j < r; ++j) {
        int rad = n + n + j;
        int term = n + net.m + j;
        net.fixed(rad, term) = 1.0;
        net.fixed(term, rad) = 1.0;
    }
    return net;
}

TuningNetwork reduce_reconfigurable(const ReconfigurableNetwork& net, const std::vector<Complex>& z_tuple)
{
    net.validate();
    if (int(z_tuple.size()) != net.r)
        throw InputError("expected " + std::to_string(net.r) + " termination impedances");
    const int a = net.n + net.m;
    TuningNetwork t;
    t.n = net.n;
    t.m = net.m;
    if (net.r == 0) {
        t.s = net.fixed;
        return t;
    }
    Eigen::VectorXcd gamma(net.r);
    for (int j = 0; j < net.r; ++j)
        gamma[j] = impedance_to_reflection(z_tuple[j], net.r0);
    CMatrix sbb_g = net.fixed.bottomRightCorner(net.r, net.r) * gamma.asDiagonal();
    CMatrix loop = CMatrix::Identity(net.r, net.r) - sbb_g;
    double c = condition_number(loop);
    if (!(c <= kMaxCondition))
        throw ConditioningError("termination (I - S_BB Gamma)", c);
    CMatrix x = loop.partialPivLu().solve(net.fixed.bottomLeftCorner(net.r, a));
    t.s = net.fixed.topLeftCorner(a, a) + net.fixed.topRightCorner(a, net.r) * gamma.asDiagonal() * x;
    return t;
}

void RfFrontend::validate() const
{
    if (!(r0 > 0.0) || !std::isfinite(r0))
        throw InputError("reference resistance must be positive");
    auto check = [](Complex z, const char* what) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw InputError(std::string(what) + " impedance must be finite (infinite impedances are unsupported)");
        if (!(z.real() > 0.0))
            throw InputError(std::string(what) + " impedance needs a strictly positive real part");
    };
    for (auto z : z_tx)
        check(z, "PA");
    for (auto z : z_rx)
        check(z, "LNA");
}

PaBlocks pa_blocks(const RfFrontend& f)
{
    f.validate();
    const int n = f.n_tx();
    PaBlocks b{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
    const double sr = std::sqrt(f.r0);
    for (int i = 0; i < n; ++i) {
        Complex z = f.z_tx[i];
        b.s_rf_tx(i, i) = (z - f.r0) / (z + f.r0);
        b.k_vtx(i, i) = sr / (z + f.r0);
    }
    return b;
}

LnaBlocks lna_blocks(const RfFrontend& f)
{
    f.validate();
    const int n = f.n_rx();
    LnaBlocks b{CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
    const double sr = std::sqrt(f.r0);
    for (int i = 0; i < n; ++i) {
        Complex z = f.z_rx[i];
        b.s_rf_rx(i, i) = (z - f.r0) / (z + f.r0);
        b.k_igamma(i, i) = sr * z / (z + f.r0);
        b.k_vgamma(i, i) = sr / (z + f.r0);
        b.k_vrx(i, i) = z / sr;
    }
    return b;
}

KMatrices assemble_k_matrices(const RfFrontend& f)
{
    const int nt = f.n_tx(), nr = f.n_rx(), n = f.n();
    auto pa = pa_blocks(f);
    auto lna = lna_blocks(f);
    KMatrices k;
    k.k_vtx = CMatrix::Zero(n, nt);
    k.k_vtx.topRows(nt) = pa.k_vtx;
    k.k_vgamma = CMatrix::Zero(n, nr);
    k.k_vgamma.bottomRows(nr) = lna.k_vgamma;
    k.k_igamma = CMatrix::Zero(n, nr);
    k.k_igamma.bottomRows(nr) = lna.k_igamma;
    k.k_vrx = CMatrix::Zero(nr, n);
    k.k_vrx.rightCols(nr) = lna.k_vrx;
    k.s_rf = CMatrix::Zero(n, n);
    k.s_rf.topLeftCorner(nt, nt) = pa.s_rf_tx;
    k.s_rf.bottomRightCorner(nr, nr) = lna.s_rf_rx;
    return k;
}

void write_reflection_table(std::ostream& os, const std::vector<Complex>& z_set, double r0)
{
    os << "index,re_gamma,im_gamma\n";
    for (std::size_t i = 0; i < z_set.size(); ++i) {
        Complex g = impedance_to_reflection(z_set[i], r0);
        os << i << ',' << format_double(g.real()) << ',' << format_double(g.imag()) << '\n';
    }
}

}  // namespace remskit
