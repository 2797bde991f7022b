// SPDX-License-Identifier: Apache-2.0
#include "remskit/radiating.hpp"

#include <cmath>

#include <Eigen/Sparse>

#include "remskit/errors.hpp"

namespace remskit {

void RadiatingStructure::validate() const
{
    if (!grid)
        throw InputError("radiating structure has no grid");
    if (!(frequency_hz > 0.0))
        throw InputError("radiating structure frequency must be positive");
    if (!grid->antipodally_closed())
        throw InputError("radiating structure grid must be antipodally closed (even n_phi)");
    const Eigen::Index m = coupling.rows();
    const Eigen::Index g2 = Eigen::Index(2 * grid->size());
    if (m < 1 || coupling.cols() != m)
        throw InputError("coupling matrix must be square with M >= 1");
    if (tx.rows() != g2 || tx.cols() != m)
        throw InputError("transmit kernel shape does not match grid and port count");
    if (rx.rows() != g2 || rx.cols() != m)
        throw InputError("receive kernel shape does not match grid and port count");
    if (has_scatter() && (scatter.rows() != g2 || scatter.cols() != g2))
        throw InputError("scatter kernel shape does not match grid");
}

Mat2c RadiatingStructure::scatter_block(std::size_t i, std::size_t j) const
{
    if (!has_scatter())
        return Mat2c::Zero();
    return scatter.block<2, 2>(2 * i, 2 * j);
}

static Eigen::Matrix<Complex, 2, Eigen::Dynamic> rows_at(const DirectionGrid& g, const CMatrix& k, Direction d)
{
    Eigen::Matrix<Complex, 2, Eigen::Dynamic> out = Eigen::Matrix<Complex, 2, Eigen::Dynamic>::Zero(2, k.cols());
    for (const auto& [i, w] : g.stencil(d).terms)
        if (w != 0.0)
            out += w * k.middleRows<2>(2 * i);
    return out;
}

Eigen::Matrix<Complex, 2, Eigen::Dynamic> RadiatingStructure::tx_at(Direction d) const { return rows_at(*grid, tx, d); }
Eigen::Matrix<Complex, 2, Eigen::Dynamic> RadiatingStructure::rx_at(Direction d) const { return rows_at(*grid, rx, d); }

Mat2c RadiatingStructure::scatter_at(Direction d, Direction d_in) const
{
    Mat2c out = Mat2c::Zero();
    if (!has_scatter())
        return out;
    auto so = grid->stencil(d);
    auto si = grid->stencil(d_in);
    for (const auto& [i, wi] : so.terms) {
        if (wi == 0.0)
            continue;
        for (const auto& [j, wj] : si.terms)
            if (wj != 0.0)
                out += (wi * wj) * scatter_block(i, j);
    }
    return out;
}

CMatrix interpolate_rows(const DirectionGrid& grid, const CMatrix& kernel, const std::vector<Direction>& dirs)
{
    CMatrix out(2 * dirs.size(), kernel.cols());
    for (std::size_t k = 0; k < dirs.size(); ++k)
        out.middleRows<2>(2 * k) = rows_at(grid, kernel, dirs[k]);
    return out;
}

FarFieldPattern apply_transmit(const RadiatingStructure& s, const CVector& a)
{
    if (a.size() != s.ports())
        throw InputError("apply_transmit: expected " + std::to_string(s.ports()) + " port waves");
    return FarFieldPattern(s.grid, s.tx * a);
}

CVector apply_receive(const RadiatingStructure& s, const FarFieldPattern& b)
{
    require_same_grid(*s.grid, *b.grid());
    CVector wb = b.values().cwiseProduct(s.grid->component_weights().cast<Complex>());
    return s.rx.transpose() * wb;
}

FarFieldPattern apply_scatter(const RadiatingStructure& s, const FarFieldPattern& b, Backend backend)
{
    require_same_grid(*s.grid, *b.grid());
    CVector out = antipodal_mirror(*s.grid, b.values());
    if (s.has_scatter())
        out += kernels::weighted_matvec(s.scatter, s.grid->component_weights(), b.values(), backend);
    return FarFieldPattern(s.grid, std::move(out));
}

FullResponse apply_full(const RadiatingStructure& s, const CVector& a, const FarFieldPattern& b)
{
    if (a.size() != s.ports())
        throw InputError("apply_full: expected " + std::to_string(s.ports()) + " port waves");
    FullResponse r;
    r.b_out = s.coupling * a + apply_receive(s, b);
    r.a_out = apply_transmit(s, a);
    r.a_out.values() += apply_scatter(s, b).values();
    return r;
}

PowerBalance power_balance(const RadiatingStructure& s, const CVector& a, const FarFieldPattern& b)
{
    auto r = apply_full(s, a, b);
    return {a.squaredNorm() + total_power(b), r.b_out.squaredNorm() + total_power(r.a_out)};
}

ReciprocityReport check_reciprocity(const RadiatingStructure& s, double tol)
{
    ReciprocityReport rep;
    rep.coupling_deviation = (s.coupling - s.coupling.transpose()).cwiseAbs().maxCoeff();
    double kd = 0.0;
    for (Eigen::Index m = 0; m < s.tx.cols(); ++m)
        for (Eigen::Index i = 0; i + 1 < s.tx.rows(); i += 2)
            kd = std::max(kd, (s.rx.block<2, 1>(i, m) - s.tx.block<2, 1>(i, m)).norm());
    rep.kernel_deviation = kd;
    if (s.has_scatter()) {
        double sd = 0.0;
        const Eigen::Index n = s.scatter.rows();
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = r + 1; c < n; ++c)
                sd = std::max(sd, std::abs(s.scatter(r, c) - s.scatter(c, r)));
        rep.scatter_deviation = sd;
    }
    rep.coupling_ok = rep.coupling_deviation <= tol;
    rep.kernel_ok = rep.kernel_deviation <= tol;
    rep.scatter_ok = rep.scatter_deviation <= tol;
    return rep;
}

void PlaneWaveResponseSet::resize(GridPtr g, int m, bool with_scatter)
{
    grid = std::move(g);
    ports = m;
    const Eigen::Index g2 = Eigen::Index(2 * grid->size());
    port_waves = CMatrix::Zero(m, g2);
    port_present.assign(g2, 0);
    if (with_scatter) {
        scattered = CMatrix::Zero(g2, g2);
        scatter_present.assign(g2, 0);
    } else {
        scattered.resize(0, 0);
        scatter_present.clear();
    }
}

Complex receive_extraction_factor(double frequency_hz)
{
    return kJ * wavenumber(frequency_hz) * std::sqrt(kZ0) / (2.0 * kPi);
}

Complex scatter_extraction_factor(double frequency_hz) { return kJ * wavenumber(frequency_hz) / (2.0 * kPi); }

static std::string incidence_label(const DirectionGrid& g, std::size_t col)
{
    const auto& d = g.direction(col / 2);
    return "(theta " + std::to_string(d.theta * 180.0 / kPi) + " deg, phi " + std::to_string(d.phi * 180.0 / kPi) +
           " deg, pol " + (col % 2 == 0 ? "theta" : "phi") + ")";
}

CMatrix extract_rx_kernel(const PlaneWaveResponseSet& resp)
{
    if (!resp.grid)
        throw InputError("response set has no grid");
    for (std::size_t c = 0; c < resp.port_present.size(); ++c)
        if (!resp.port_present[c])
            throw InputError("missing port response for incidence " + incidence_label(*resp.grid, c));
    if (resp.port_present.size() != 2 * resp.grid->size())
        throw InputError("port response set does not cover the grid");
    return receive_extraction_factor(resp.frequency_hz) * resp.port_waves.transpose();
}

CMatrixRM extract_scatter_kernel(const PlaneWaveResponseSet& resp)
{
    if (!resp.grid || resp.scattered.size() == 0)
        throw InputError("response set has no scattered fields");
    for (std::size_t c = 0; c < resp.scatter_present.size(); ++c)
        if (!resp.scatter_present[c])
            throw InputError("missing scattered field for incidence " + incidence_label(*resp.grid, c));
    return CMatrixRM(scatter_extraction_factor(resp.frequency_hz) * resp.scattered);
}

RadiatingStructure structure_from_responses(const PlaneWaveResponseSet& resp)
{
    RadiatingStructure s;
    s.grid = resp.grid;
    s.frequency_hz = resp.frequency_hz;
    s.rx = extract_rx_kernel(resp);
    s.tx = resp.tx.size() ? resp.tx : s.rx;
    s.coupling = resp.coupling.size() ? resp.coupling : CMatrix::Zero(resp.ports, resp.ports);
    if (resp.scattered.size())
        s.scatter = extract_scatter_kernel(resp);
    s.validate();
    return s;
}

PlaneWaveResponseSet responses_of(const RadiatingStructure& s, bool with_scatter)
{
    PlaneWaveResponseSet r;
    r.frequency_hz = s.frequency_hz;
    r.resize(s.grid, s.ports(), with_scatter);
    r.port_waves = (s.rx / receive_extraction_factor(s.frequency_hz)).transpose();
    std::fill(r.port_present.begin(), r.port_present.end(), 1);
    if (with_scatter) {
        if (s.has_scatter())
            r.scattered = CMatrix(s.scatter) / scatter_extraction_factor(s.frequency_hz);
        std::fill(r.scatter_present.begin(), r.scatter_present.end(), 1);
    }
    r.tx = s.tx;
    r.coupling = s.coupling;
    return r;
}

Mat3 rotation_matrix(const Vec3& axis, double angle_rad)
{
    if (!(axis.norm() > 0.0))
        throw InputError("rotation axis must be nonzero");
    return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

RadiatingStructure rotate_structure(const RadiatingStructure& s, const Mat3& q)
{
    s.validate();
    const auto& g = *s.grid;
    const Eigen::Index g2 = Eigen::Index(2 * g.size());
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(8 * g2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Direction d = g.direction(i);
        Direction d0 = direction_from_vector(q.transpose() * unit_vector(d));
        Eigen::Matrix2d rot = polarization_basis(d).transpose() * q * polarization_basis(d0);
        for (const auto& [k, w] : g.stencil(d0).terms) {
            if (w == 0.0)
                continue;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    trip.emplace_back(Eigen::Index(2 * i + a), Eigen::Index(2 * k + b), w * rot(a, b));
        }
    }
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> p(g2, g2);
    p.setFromTriplets(trip.begin(), trip.end());

    RadiatingStructure out = s;
    out.tx = p * s.tx;
    out.rx = p * s.rx;
    if (s.has_scatter()) {
        CMatrix left = p * CMatrix(s.scatter);
        out.scatter = CMatrixRM((p * left.transpose()).transpose());
    }
    return out;
}

}  // namespace remskit
