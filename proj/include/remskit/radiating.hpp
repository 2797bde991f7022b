// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "remskit/farfield.hpp"
#include "remskit/kernels.hpp"

namespace remskit {

// Sampled radiating-structure operator.
// tx and rx are 2G x M (column m is the kernel of port m, same layout as FarFieldPattern values).
// scatter is the reduced kernel, 2G x 2G with block (i, j) = S~(d_i; d_j); an empty matrix means zero.
struct RadiatingStructure {
    GridPtr grid;
    double frequency_hz = 0.0;
    CMatrix coupling;
    CMatrix tx;
    CMatrix rx;
    CMatrixRM scatter;
    bool extrinsic_noise_enabled = true;

    int ports() const { return int(coupling.rows()); }
    bool has_scatter() const { return scatter.size() != 0; }
    double wavenumber() const { return remskit::wavenumber(frequency_hz); }

    // Throws InputError on inconsistent shapes.
    void validate() const;

    FarFieldPattern tx_pattern(int m) const { return FarFieldPattern(grid, tx.col(m)); }
    FarFieldPattern rx_pattern(int m) const { return FarFieldPattern(grid, rx.col(m)); }
    Mat2c scatter_block(std::size_t i, std::size_t j) const;

    // Kernels interpolated at arbitrary directions (2 x M and 2 x 2).
    Eigen::Matrix<Complex, 2, Eigen::Dynamic> tx_at(Direction d) const;
    Eigen::Matrix<Complex, 2, Eigen::Dynamic> rx_at(Direction d) const;
    Mat2c scatter_at(Direction d, Direction d_in) const;
};

using StructurePtr = std::shared_ptr<const RadiatingStructure>;

// Interpolation rows of a 2G x N kernel at the given directions, stacked as (2D x N).
CMatrix interpolate_rows(const DirectionGrid& grid, const CMatrix& kernel, const std::vector<Direction>& dirs);

FarFieldPattern apply_transmit(const RadiatingStructure& s, const CVector& a);
CVector apply_receive(const RadiatingStructure& s, const FarFieldPattern& b);
FarFieldPattern apply_scatter(const RadiatingStructure& s, const FarFieldPattern& b,
                              Backend backend = Backend::openmp);

struct FullResponse {
    CVector b_out;
    FarFieldPattern a_out;
};
FullResponse apply_full(const RadiatingStructure& s, const CVector& a, const FarFieldPattern& b);

struct PowerBalance {
    double input = 0.0;
    double output = 0.0;
};
// Discrete wave powers entering and leaving the structure for inputs (a, b).
PowerBalance power_balance(const RadiatingStructure& s, const CVector& a, const FarFieldPattern& b);

struct ReciprocityReport {
    bool coupling_ok = false;
    bool kernel_ok = false;
    bool scatter_ok = false;
    double coupling_deviation = 0.0;
    double kernel_deviation = 0.0;
    double scatter_deviation = 0.0;
    bool ok() const { return coupling_ok && kernel_ok && scatter_ok; }
};
ReciprocityReport check_reciprocity(const RadiatingStructure& s, double tol);

// Port waves and scattered fields under unit-RMS plane-wave illumination.
// Column 2i+p corresponds to incidence from grid direction i with polarization p (0 = theta, 1 = phi).
struct PlaneWaveResponseSet {
    double frequency_hz = 0.0;
    GridPtr grid;
    int ports = 0;
    CMatrix port_waves;              // M x 2G
    std::vector<char> port_present;  // 2G flags
    CMatrix scattered;               // 2G x 2G, empty if absent
    std::vector<char> scatter_present;
    CMatrix tx;        // optional 2G x M transmit kernel, empty if absent
    CMatrix coupling;  // optional M x M, empty if absent

    void resize(GridPtr g, int m, bool with_scatter);
};

// jk sqrt(Z0) / (2 pi) at the given frequency.
Complex receive_extraction_factor(double frequency_hz);
// jk / (2 pi)
Complex scatter_extraction_factor(double frequency_hz);

CMatrix extract_rx_kernel(const PlaneWaveResponseSet& resp);
CMatrixRM extract_scatter_kernel(const PlaneWaveResponseSet& resp);
// Full structure: tx from transmit records if present, else tx = rx.
RadiatingStructure structure_from_responses(const PlaneWaveResponseSet& resp);
// Responses a structure produces under the extraction conventions (inverse of the formulas above).
PlaneWaveResponseSet responses_of(const RadiatingStructure& s, bool with_scatter);

// Analytic library.
struct DipoleElement {
    Vec3 orientation = Vec3::UnitZ();
    Vec3 position_m = Vec3::Zero();
};

enum class DipoleCoupling {
    none,                // coupling 0, reduced scatter kernel 0
    minimum_scattering,  // lossless reciprocal completion from the pattern Gram matrix
};

RadiatingStructure hertzian_dipole(const Vec3& orientation, const Vec3& position_m, GridPtr grid, double frequency_hz,
                                   DipoleCoupling mode = DipoleCoupling::none);
RadiatingStructure dipole_array(const std::vector<DipoleElement>& elements, GridPtr grid, double frequency_hz,
                                DipoleCoupling mode = DipoleCoupling::none);

// Ideal matched isotropic radiator: constant pattern of polarization pol (unit norm) carrying 1 W per unit drive.
// Like the uncoupled dipole it has no scatter kernel, so it is a transmit/receive reference, not a passive scatterer.
RadiatingStructure isotropic_radiator(GridPtr grid, double frequency_hz, const Vec2c& pol = Vec2c(1.0, 0.0));

// Isolated element patterns, 2G x M.
CMatrix dipole_patterns(const std::vector<DipoleElement>& elements, const DirectionGrid& grid, double frequency_hz);
// Normalized mutual impedance of Hertzian dipoles (self terms 1).
CMatrix dipole_mutual_impedance(const std::vector<DipoleElement>& elements, double frequency_hz);

// Lossless (or lossy, with extra_resistance) reciprocal structure whose isolated patterns are `patterns`.
// Z = Gram + extra_resistance + j reactance; Y = 2 (Z + I)^-1; coupling = Y - I; tx = rx = patterns Y.
// patterns must satisfy mirror(t) = -conj(t) for the result to be reciprocal.
RadiatingStructure minimum_scattering_structure(GridPtr grid, double frequency_hz, const CMatrix& patterns,
                                                const Eigen::MatrixXd& reactance,
                                                const Eigen::MatrixXd& extra_resistance = Eigen::MatrixXd(),
                                                Backend backend = Backend::openmp);

// Weighted Gram matrix Gram(m, n) = <t_n, t_m>.
CMatrix pattern_gram(const DirectionGrid& grid, const CMatrix& patterns);

Mat3 rotation_matrix(const Vec3& axis, double angle_rad);
// Resamples all kernels for the structure rotated by q (fields E'(r) = q E(q^T r)).
RadiatingStructure rotate_structure(const RadiatingStructure& s, const Mat3& q);

}  // namespace remskit
