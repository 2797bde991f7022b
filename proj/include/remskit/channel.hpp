// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "remskit/radiating.hpp"

namespace remskit {

// Structure 2 sits at distance_m along `direction` as seen from structure 1.
struct Placement {
    double distance_m = 1.0;
    Vec3 direction = Vec3::UnitX();

    void validate() const;
};

struct ChannelMatrix {
    CMatrix s21;  // M2 x M1
    double distance_wavelengths = 0.0;

    // Far-field formulas are asymptotic; below 10 wavelengths they are only indicative.
    bool near_field_warning() const { return distance_wavelengths < 10.0; }
};

// (2 pi / jk) (e^{-jkd} / d) diag(1, -1)
Mat2c propagation_matrix_c(double distance_m, double k);

ChannelMatrix far_channel(const RadiatingStructure& r1, const RadiatingStructure& r2, const Placement& p);

// The single-bounce matrix M = S~1(d;d) C S~2(-d;-d) C of the two-structure channel.
Mat2c bounce_matrix(const RadiatingStructure& r1, const RadiatingStructure& r2, const Placement& p);

// Chain structures[0] -> structures[1] -> ... -> structures.back(), links[i] placing i+1 relative to i.
// Back-action between hops is neglected; needs at least one intermediate scatterer.
CMatrix cascade_unilateral(const std::vector<const RadiatingStructure*>& structures,
                           const std::vector<Placement>& links);

}  // namespace remskit
