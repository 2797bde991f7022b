// SPDX-License-Identifier: Apache-2.0
// Hertzian dipoles and the minimum-scattering completion.
#include <cmath>

#include "remskit/errors.hpp"
#include "remskit/radiating.hpp"

namespace remskit {

CMatrix dipole_patterns(const std::vector<DipoleElement>& elements, const DirectionGrid& grid, double frequency_hz)
{
    if (elements.empty())
        throw InputError("dipole array needs at least one element");
    const double k = wavenumber(frequency_hz);
    const double amp = std::sqrt(3.0 / (8.0 * kPi));
    CMatrix t(2 * grid.size(), elements.size());
    for (std::size_t m = 0; m < elements.size(); ++m) {
        const auto& e = elements[m];
        if (std::abs(e.orientation.norm() - 1.0) > 1e-9)
            throw InputError("dipole orientation must be a unit vector");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Direction d = grid.direction(i);
            Complex phase = std::exp(kJ * (k * unit_vector(d).dot(e.position_m)));
            t(2 * i, m) = amp * e.orientation.dot(theta_hat(d)) * phase;
            t(2 * i + 1, m) = amp * e.orientation.dot(phi_hat(d)) * phase;
        }
    }
    return t;
}

CMatrix dipole_mutual_impedance(const std::vector<DipoleElement>& elements, double frequency_hz)
{
    const double k = wavenumber(frequency_hz);
    const double tiny = 1e-12 * wavelength(frequency_hz);
    const std::size_t m = elements.size();
    CMatrix z(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            const auto& u1 = elements[a].orientation;
            const auto& u2 = elements[b].orientation;
            Vec3 r = elements[b].position_m - elements[a].position_m;
            double dist = r.norm();
            if (dist < tiny) {
                z(a, b) = u1.dot(u2);
                continue;
            }
            Vec3 n = r / dist;
            double x = k * dist;
            Complex e = std::exp(-kJ * x);
            double par = n.dot(u1) * n.dot(u2);
            double tr = u1.dot(u2) - par;
            z(a, b) = 1.5 * (kJ / x) * (1.0 - kJ / x - 1.0 / (x * x)) * e * tr -
                      (3.0 / (x * x)) * (1.0 - kJ / x) * e * par;
        }
    return z;
}

CMatrix pattern_gram(const DirectionGrid& grid, const CMatrix& patterns)
{
    CMatrix wt = grid.component_weights().cast<Complex>().asDiagonal() * patterns;
    return patterns.adjoint() * wt;
}

RadiatingStructure minimum_scattering_structure(GridPtr grid, double frequency_hz, const CMatrix& patterns,
                                                const Eigen::MatrixXd& reactance,
                                                const Eigen::MatrixXd& extra_resistance, Backend backend)
{
    const Eigen::Index m = patterns.cols();
    if (patterns.rows() != Eigen::Index(2 * grid->size()))
        throw InputError("pattern matrix does not match grid");
    if (reactance.rows() != m || reactance.cols() != m)
        throw InputError("reactance matrix must be M x M");
    CMatrix z = pattern_gram(*grid, patterns) + kJ * reactance.cast<Complex>();
    if (extra_resistance.size()) {
        if (extra_resistance.rows() != m || extra_resistance.cols() != m)
            throw InputError("loss matrix must be M x M");
        z += extra_resistance.cast<Complex>();
    }
    const CMatrix id = CMatrix::Identity(m, m);
    CMatrix y = 2.0 * (z + id).partialPivLu().solve(id);

    RadiatingStructure s;
    s.grid = std::move(grid);
    s.frequency_hz = frequency_hz;
    s.coupling = y - id;
    s.tx = patterns * y;
    s.rx = s.tx;
    s.scatter = kernels::low_rank_product(patterns, y, patterns, backend);
    s.validate();
    return s;
}

RadiatingStructure dipole_array(const std::vector<DipoleElement>& elements, GridPtr grid, double frequency_hz,
                                DipoleCoupling mode)
{
    CMatrix t = dipole_patterns(elements, *grid, frequency_hz);
    const Eigen::Index m = t.cols();
    if (mode == DipoleCoupling::minimum_scattering) {
        Eigen::MatrixXd x = dipole_mutual_impedance(elements, frequency_hz).imag();
        x.diagonal().setZero();
        // keep the coupling exactly symmetric
        Eigen::MatrixXd xs = 0.5 * (x + x.transpose());
        return minimum_scattering_structure(std::move(grid), frequency_hz, t, xs);
    }
    RadiatingStructure s;
    s.grid = std::move(grid);
    s.frequency_hz = frequency_hz;
    s.coupling = CMatrix::Zero(m, m);
    s.tx = t;
    s.rx = t;
    s.validate();
    return s;
}

RadiatingStructure hertzian_dipole(const Vec3& orientation, const Vec3& position_m, GridPtr grid, double frequency_hz,
                                   DipoleCoupling mode)
{
    return dipole_array({{orientation, position_m}}, std::move(grid), frequency_hz, mode);
}

RadiatingStructure isotropic_radiator(GridPtr grid, double frequency_hz, const Vec2c& pol)
{
    if (std::abs(pol.norm() - 1.0) > 1e-9)
        throw InputError("isotropic radiator polarization must have unit norm");
    RadiatingStructure s;
    s.grid = std::move(grid);
    s.frequency_hz = frequency_hz;
    s.coupling = CMatrix::Zero(1, 1);
    s.tx = CMatrix(2 * s.grid->size(), 1);
    const double a = 1.0 / std::sqrt(4.0 * kPi);
    for (std::size_t i = 0; i < s.grid->size(); ++i)
        s.tx.block<2, 1>(2 * i, 0) = a * pol;
    s.rx = s.tx;
    s.validate();
    return s;
}

}  // namespace remskit
