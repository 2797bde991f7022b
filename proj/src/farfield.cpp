// SPDX-License-Identifier: Apache-2.0
#include "remskit/farfield.hpp"

#include <cmath>
#include <ostream>

#include "remskit/errors.hpp"
#include "remskit/numio.hpp"

namespace remskit {

Direction canonicalize(Direction d)
{
    if (!std::isfinite(d.theta) || !std::isfinite(d.phi))
        throw InputError("non-finite direction");
    double t = d.theta;
    double p = d.phi;
    if (t < 0.0 || t > kPi) {
        t = std::fmod(t, 2.0 * kPi);
        if (t < 0.0)
            t += 2.0 * kPi;
        if (t > kPi) {
            t = 2.0 * kPi - t;
            p += kPi;
        }
    }
    if (p < 0.0 || p >= 2.0 * kPi) {
        p = std::fmod(p, 2.0 * kPi);
        if (p < 0.0)
            p += 2.0 * kPi;
        if (p >= 2.0 * kPi)
            p = 0.0;
    }
    return {t, p};
}

Direction direction_from_degrees(double theta_deg, double phi_deg)
{
    return canonicalize({theta_deg * kPi / 180.0, phi_deg * kPi / 180.0});
}

Direction direction_from_vector(const Vec3& v)
{
    double n = v.norm();
    if (!(n > 0.0))
        throw InputError("zero direction vector");
    double z = std::clamp(v.z() / n, -1.0, 1.0);
    return canonicalize({std::acos(z), std::atan2(v.y(), v.x())});
}

Direction antipode(Direction d) { return canonicalize({kPi - d.theta, d.phi + kPi}); }

Vec3 unit_vector(Direction d)
{
    double st = std::sin(d.theta);
    return {st * std::cos(d.phi), st * std::sin(d.phi), std::cos(d.theta)};
}

Vec3 theta_hat(Direction d)
{
    double ct = std::cos(d.theta);
    return {ct * std::cos(d.phi), ct * std::sin(d.phi), -std::sin(d.theta)};
}

Vec3 phi_hat(Direction d) { return {-std::sin(d.phi), std::cos(d.phi), 0.0}; }

Eigen::Matrix<double, 3, 2> polarization_basis(Direction d)
{
    Eigen::Matrix<double, 3, 2> b;
    b.col(0) = theta_hat(d);
    b.col(1) = phi_hat(d);
    return b;
}

DirectionGrid::DirectionGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi)
{
    const double dt = kPi / n_theta;
    const double dp = 2.0 * kPi / n_phi;
    std::vector<double> ring(n_theta);
    for (int i = 0; i < (n_theta + 1) / 2; ++i) {
        // cos(lo) - cos(hi) written without cancellation
        double w = dp * 2.0 * std::sin((i + 0.5) * dt) * std::sin(0.5 * dt);
        ring[i] = w;
        ring[n_theta - 1 - i] = w;
    }
    directions_.reserve(std::size_t(n_theta) * n_phi);
    weights_.reserve(std::size_t(n_theta) * n_phi);
    for (int i = 0; i < n_theta; ++i)
        for (int j = 0; j < n_phi; ++j) {
            directions_.push_back({(i + 0.5) * dt, j * dp});
            weights_.push_back(ring[i]);
        }
    component_weights_.resize(2 * weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i)
        component_weights_[2 * i] = component_weights_[2 * i + 1] = weights_[i];
}

std::shared_ptr<const DirectionGrid> DirectionGrid::latlon(int n_theta, int n_phi)
{
    if (n_theta < 2 || n_phi < 2)
        throw InputError("lat-lon grid needs n_theta >= 2 and n_phi >= 2");
    return std::shared_ptr<const DirectionGrid>(new DirectionGrid(n_theta, n_phi));
}

GridPtr make_latlon_grid(int n_theta, int n_phi) { return DirectionGrid::latlon(n_theta, n_phi); }

std::size_t DirectionGrid::antipode_index(std::size_t k) const
{
    if (!antipodally_closed())
        throw InputError("grid is not closed under the antipodal map (n_phi must be even)");
    int i = int(k / n_phi_);
    int j = int(k % n_phi_);
    return index(n_theta_ - 1 - i, (j + n_phi_ / 2) % n_phi_);
}

std::size_t DirectionGrid::find(Direction d, double tol_rad) const
{
    d = canonicalize(d);
    const double dt = kPi / n_theta_;
    const double dp = 2.0 * kPi / n_phi_;
    long i = std::lround(d.theta / dt - 0.5);
    long j = std::lround(d.phi / dp);
    if (i < 0 || i >= n_theta_)
        return size();
    j = ((j % n_phi_) + n_phi_) % n_phi_;
    const auto& g = directions_[index(int(i), int(j))];
    double dphi = std::remainder(g.phi - d.phi, 2.0 * kPi);
    if (std::abs(g.theta - d.theta) > tol_rad || std::abs(dphi) > tol_rad)
        return size();
    return index(int(i), int(j));
}

Stencil DirectionGrid::stencil(Direction d) const
{
    d = canonicalize(d);
    const double u = d.theta / (kPi / n_theta_) - 0.5;
    int i0, i1;
    double t;
    if (u <= 0.0) {
        i0 = i1 = 0;
        t = 0.0;
    } else if (u >= n_theta_ - 1) {
        i0 = i1 = n_theta_ - 1;
        t = 0.0;
    } else {
        i0 = int(std::floor(u));
        i1 = i0 + 1;
        t = u - i0;
    }
    const double v = d.phi / (2.0 * kPi / n_phi_);
    const double fv = std::floor(v);
    double s = v - fv;
    int j0 = int(fv) % n_phi_;
    int j1 = (j0 + 1) % n_phi_;
    Stencil st;
    st.terms[0] = {index(i0, j0), (1.0 - t) * (1.0 - s)};
    st.terms[1] = {index(i0, j1), (1.0 - t) * s};
    st.terms[2] = {index(i1, j0), t * (1.0 - s)};
    st.terms[3] = {index(i1, j1), t * s};
    return st;
}

void require_same_grid(const DirectionGrid& a, const DirectionGrid& b)
{
    if (!a.same_as(b))
        throw InputError("grid mismatch: " + std::to_string(a.n_theta()) + "x" + std::to_string(a.n_phi()) +
                         " vs " + std::to_string(b.n_theta()) + "x" + std::to_string(b.n_phi()));
}

FarFieldPattern::FarFieldPattern(GridPtr grid) : grid_(std::move(grid))
{
    values_ = CVector::Zero(2 * grid_->size());
}

FarFieldPattern::FarFieldPattern(GridPtr grid, CVector values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (std::size_t(values_.size()) != 2 * grid_->size())
        throw InputError("pattern length does not match grid");
}

Vec2c FarFieldPattern::at(Direction d) const
{
    Vec2c out = Vec2c::Zero();
    for (const auto& [k, w] : grid_->stencil(d).terms)
        if (w != 0.0)
            out += w * value(k);
    return out;
}

FarFieldPattern FarFieldPattern::impulse(GridPtr grid, std::size_t i, const Vec2c& c)
{
    FarFieldPattern p(grid);
    p.set_value(i, c / grid->weight(i));
    return p;
}

Complex inner_product(const FarFieldPattern& p, const FarFieldPattern& q)
{
    require_same_grid(*p.grid(), *q.grid());
    const auto& w = p.grid()->component_weights();
    Complex s = 0.0;
    for (Eigen::Index k = 0; k < p.values().size(); ++k)
        s += std::conj(q.values()[k]) * p.values()[k] * w[k];
    return s;
}

double total_power(const FarFieldPattern& p)
{
    const auto& w = p.grid()->component_weights();
    double s = 0.0;
    for (Eigen::Index k = 0; k < p.values().size(); ++k)
        s += std::norm(p.values()[k]) * w[k];
    return s;
}

double intensity(const FarFieldPattern& p, Direction d) { return p.at(d).squaredNorm(); }

CVector antipodal_mirror(const DirectionGrid& grid, const CVector& values)
{
    CVector out(values.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::size_t a = grid.antipode_index(i);
        out[2 * i] = -values[2 * a];
        out[2 * i + 1] = values[2 * a + 1];
    }
    return out;
}

FarFieldPattern antipodal_mirror(const FarFieldPattern& p)
{
    return FarFieldPattern(p.grid(), antipodal_mirror(*p.grid(), p.values()));
}

void write_pattern_csv(std::ostream& os, const FarFieldPattern& p)
{
    os << "theta_deg,phi_deg,re_a_theta,im_a_theta,re_a_phi,im_a_phi,intensity_W_per_sr\n";
    const auto& g = *p.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& d = g.direction(i);
        Vec2c v = p.value(i);
        os << format_double(d.theta * 180.0 / kPi) << ',' << format_double(d.phi * 180.0 / kPi) << ','
           << format_double(v[0].real()) << ',' << format_double(v[0].imag()) << ','
           << format_double(v[1].real()) << ',' << format_double(v[1].imag()) << ','
           << format_double(v.squaredNorm()) << '\n';
    }
}

}  // namespace remskit
