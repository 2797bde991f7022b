// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "remskit/types.hpp"

namespace remskit {

// Physicist's convention: theta is the polar angle from +z, phi the azimuth.
struct Direction {
    double theta = 0.0;
    double phi = 0.0;
};

// Maps any (theta, phi) into theta in [0, pi], phi in [0, 2pi).
// Negative theta continues through the pole: (-t, p) -> (t, p + pi).
Direction canonicalize(Direction d);
Direction direction_from_degrees(double theta_deg, double phi_deg);
Direction direction_from_vector(const Vec3& v);
Direction antipode(Direction d);

Vec3 unit_vector(Direction d);
Vec3 theta_hat(Direction d);
Vec3 phi_hat(Direction d);

// Local polarization basis as columns [theta_hat, phi_hat].
Eigen::Matrix<double, 3, 2> polarization_basis(Direction d);

// Bilinear interpolation weights over grid samples.
struct Stencil {
    std::array<std::pair<std::size_t, double>, 4> terms{};
};

class DirectionGrid {
public:
    static std::shared_ptr<const DirectionGrid> latlon(int n_theta, int n_phi);

    int n_theta() const { return n_theta_; }
    int n_phi() const { return n_phi_; }
    std::size_t size() const { return directions_.size(); }

    const Direction& direction(std::size_t i) const { return directions_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<Direction>& directions() const { return directions_; }
    const std::vector<double>& weights() const { return weights_; }

    // Weights repeated per polarization component, length 2G.
    const Eigen::VectorXd& component_weights() const { return component_weights_; }

    bool antipodally_closed() const { return n_phi_ % 2 == 0; }
    std::size_t antipode_index(std::size_t i) const;

    std::size_t index(int i_theta, int i_phi) const { return std::size_t(i_theta) * n_phi_ + i_phi; }
    // Grid index whose direction matches d to within tol_rad, or size() if none.
    std::size_t find(Direction d, double tol_rad = 1e-9) const;

    Stencil stencil(Direction d) const;

    bool same_as(const DirectionGrid& other) const
    {
        return n_theta_ == other.n_theta_ && n_phi_ == other.n_phi_;
    }

private:
    DirectionGrid(int n_theta, int n_phi);

    int n_theta_;
    int n_phi_;
    std::vector<Direction> directions_;
    std::vector<double> weights_;
    Eigen::VectorXd component_weights_;
};

using GridPtr = std::shared_ptr<const DirectionGrid>;

GridPtr make_latlon_grid(int n_theta, int n_phi);

// Far-field power-wave pattern; values are stored as [a_theta(0), a_phi(0), a_theta(1), ...].
class FarFieldPattern {
public:
    FarFieldPattern() = default;
    explicit FarFieldPattern(GridPtr grid);
    FarFieldPattern(GridPtr grid, CVector values);

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return grid_ ? grid_->size() : 0; }

    Vec2c value(std::size_t i) const { return values_.segment<2>(2 * i); }
    void set_value(std::size_t i, const Vec2c& v) { values_.segment<2>(2 * i) = v; }

    const CVector& values() const { return values_; }
    CVector& values() { return values_; }

    // Interpolated value at an arbitrary direction.
    Vec2c at(Direction d) const;

    // Focused incoming wave with coefficient c from grid direction i.
    static FarFieldPattern impulse(GridPtr grid, std::size_t i, const Vec2c& c);

private:
    GridPtr grid_;
    CVector values_;
};

Complex inner_product(const FarFieldPattern& p, const FarFieldPattern& q);
double total_power(const FarFieldPattern& p);
double intensity(const FarFieldPattern& p, Direction d);
FarFieldPattern antipodal_mirror(const FarFieldPattern& p);

// Same mirror on a raw 2G-vector.
CVector antipodal_mirror(const DirectionGrid& grid, const CVector& values);

void require_same_grid(const DirectionGrid& a, const DirectionGrid& b);

void write_pattern_csv(std::ostream& os, const FarFieldPattern& p);

}  // namespace remskit
