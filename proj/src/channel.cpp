// SPDX-License-Identifier: Apache-2.0
#include "remskit/channel.hpp"

#include <cmath>
#include <limits>

#include "remskit/errors.hpp"

namespace remskit {

void Placement::validate() const
{
    if (!(distance_m > 0.0) || !std::isfinite(distance_m))
        throw InputError("placement distance must be positive");
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        throw InputError("placement direction must be a unit vector");
}

Mat2c propagation_matrix_c(double distance_m, double k)
{
    if (!(distance_m > 0.0) || !(k > 0.0))
        throw InputError("propagation matrix needs d > 0 and k > 0");
    Complex c = (2.0 * kPi / (kJ * k)) * std::exp(-kJ * (k * distance_m)) / distance_m;
    Mat2c m = Mat2c::Zero();
    m(0, 0) = c;
    m(1, 1) = -c;
    return m;
}

static void require_same_frequency(const RadiatingStructure& a, const RadiatingStructure& b)
{
    if (std::abs(a.frequency_hz - b.frequency_hz) > 1e-9 * a.frequency_hz)
        throw InputError("structures are defined at different frequencies");
}

Mat2c bounce_matrix(const RadiatingStructure& r1, const RadiatingStructure& r2, const Placement& p)
{
    p.validate();
    const Direction fwd = direction_from_vector(p.direction);
    const Direction back = direction_from_vector(-p.direction);
    const Mat2c c = propagation_matrix_c(p.distance_m, r1.wavenumber());
    return r1.scatter_at(fwd, fwd) * c * r2.scatter_at(back, back) * c;
}

ChannelMatrix far_channel(const RadiatingStructure& r1, const RadiatingStructure& r2, const Placement& p)
{
    r1.validate();
    r2.validate();
    p.validate();
    require_same_frequency(r1, r2);
    const Direction fwd = direction_from_vector(p.direction);
    const Direction back = direction_from_vector(-p.direction);
    const Mat2c c = propagation_matrix_c(p.distance_m, r1.wavenumber());
    const Mat2c mm = bounce_matrix(r1, r2, p);
    const Mat2c loop = Mat2c::Identity() - mm;
    Eigen::JacobiSVD<Mat2c> svd(loop);
    const auto& sv = svd.singularValues();
    if (!(sv[1] > 0.0) || sv[0] / sv[1] > kMaxCondition)
        throw ConditioningError("(I - M) between the two structures", sv[1] > 0.0 ? sv[0] / sv[1] : std::numeric_limits<double>::infinity());
    ChannelMatrix out;
    out.s21 = r2.rx_at(back).transpose() * c * loop.inverse() * r1.tx_at(fwd);
    out.distance_wavelengths = p.distance_m / wavelength(r1.frequency_hz);
    return out;
}

CMatrix cascade_unilateral(const std::vector<const RadiatingStructure*>& structures,
                           const std::vector<Placement>& links)
{
    if (structures.size() < 3)
        throw InputError("a cascade needs at least one intermediate scatterer");
    if (links.size() + 1 != structures.size())
        throw InputError("a cascade of n structures needs n - 1 placements");
    for (auto* s : structures) {
        s->validate();
        require_same_frequency(*structures.front(), *s);
    }
    const double k = structures.front()->wavenumber();
    for (const auto& l : links)
        l.validate();

    // field carried along the chain, 2 x M_first
    Eigen::Matrix<Complex, 2, Eigen::Dynamic> field = structures.front()->tx_at(direction_from_vector(links[0].direction));
    for (std::size_t i = 1; i + 1 < structures.size(); ++i) {
        const Direction in = direction_from_vector(-links[i - 1].direction);
        const Direction out = direction_from_vector(links[i].direction);
        field = structures[i]->scatter_at(out, in) * propagation_matrix_c(links[i - 1].distance_m, k) * field;
    }
    const auto& last = *structures.back();
    const Direction in = direction_from_vector(-links.back().direction);
    return last.rx_at(in).transpose() * propagation_matrix_c(links.back().distance_m, k) * field;
}

}  // namespace remskit
