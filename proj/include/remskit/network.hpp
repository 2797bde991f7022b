// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include "remskit/types.hpp"

namespace remskit {

struct PassivityReport {
    bool passive = false;
    double sigma_max = 0.0;
};
PassivityReport passivity_check(const CMatrix& s);

// (z - r0) / (z + r0); an infinite real part means an open circuit.
Complex impedance_to_reflection(Complex z, double r0);

// 2-norm condition number; infinity for singular matrices.
double condition_number(const CMatrix& a);

// Scattering matrix over [N frontend ports | M radiating ports].
struct TuningNetwork {
    int n = 0;
    int m = 0;
    CMatrix s;

    auto tt() const { return s.topLeftCorner(n, n); }
    auto tr() const { return s.topRightCorner(n, m); }
    auto rt() const { return s.bottomLeftCorner(m, n); }
    auto rr() const { return s.bottomRightCorner(m, m); }

    void validate() const;

    // N = M, frontend port k wired straight to radiating port k.
    static TuningNetwork through(int ports);
};

// Fixed network over [N | M | R] ports, the last R terminated by selectable impedances.
struct ReconfigurableNetwork {
    int n = 0;
    int m = 0;
    int r = 0;
    CMatrix fixed;
    std::vector<Complex> z_set;
    double r0 = 50.0;

    void validate() const;

    // Frontend port k to radiating port k for k < n, radiating port n + j to termination j.
    // Requires m = n + r; this is the reflectarray topology (feeds plus loaded reflector elements).
    static ReconfigurableNetwork feeds_and_loads(int n, int r, std::vector<Complex> z_set, double r0);
};

TuningNetwork reduce_reconfigurable(const ReconfigurableNetwork& net, const std::vector<Complex>& z_tuple);

struct RfFrontend {
    std::vector<Complex> z_tx;
    std::vector<Complex> z_rx;
    double r0 = 50.0;

    int n_tx() const { return int(z_tx.size()); }
    int n_rx() const { return int(z_rx.size()); }
    int n() const { return n_tx() + n_rx(); }
    void validate() const;
};

struct PaBlocks {
    CMatrix s_rf_tx;
    CMatrix k_vtx;
};
PaBlocks pa_blocks(const RfFrontend& f);

struct LnaBlocks {
    CMatrix s_rf_rx;
    CMatrix k_igamma;
    CMatrix k_vgamma;
    CMatrix k_vrx;
};
LnaBlocks lna_blocks(const RfFrontend& f);

struct KMatrices {
    CMatrix k_vtx;     // N x N_Tx
    CMatrix k_vgamma;  // N x N_Rx
    CMatrix k_igamma;  // N x N_Rx
    CMatrix k_vrx;     // N_Rx x N
    CMatrix s_rf;      // N x N
};
KMatrices assemble_k_matrices(const RfFrontend& f);

void write_reflection_table(std::ostream& os, const std::vector<Complex>& z_set, double r0);

}  // namespace remskit
