// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "remskit/network.hpp"
#include "remskit/radiating.hpp"

namespace remskit {

struct RemsModel {
    RfFrontend frontend;
    TuningNetwork tuning;
    StructurePtr radiating;

    double r0() const { return frontend.r0; }
    double frequency_hz() const { return radiating->frequency_hz; }
    int n_tx() const { return frontend.n_tx(); }
    int n_rx() const { return frontend.n_rx(); }
    int m() const { return radiating->ports(); }
    void validate() const;
};

struct SolveInputs {
    CVector v_tx;       // N_Tx, V
    CVector v_gamma;    // N_Rx, V
    CVector i_gamma;    // N_Rx, A
    CVector v_upsilon;  // M, V
    FarFieldPattern b_f;

    static SolveInputs zeros(const RemsModel& model);
};

struct SolveState {
    CVector a_t, b_t, a_r, b_r, a_rt, b_rt;  // a_rt, b_rt: waves at the radiating ports (after noise injection)
    CVector v_rx;
    FarFieldPattern a_f, b_f;
    std::vector<double> residuals;  // relative residual of each equation group
};

SolveState solve_direct(const RemsModel& model, const SolveInputs& in);

// Radiating-port waves per unit PA voltage, M x N_Tx; a_F = tx * transmit_port_map * v_tx.
CMatrix transmit_port_map(const RemsModel& model);

struct GainOperators {
    StructurePtr radiating;
    int n_tx = 0, n_rx = 0, m = 0;

    CMatrix g_vtx_af;        // 2G x N_Tx
    CMatrix bf_af_left;      // 2G x M; g_bf_af(b) = bf_af_left * receive(b) + scatter(b)
    CMatrix g_vtx_vrx;       // N_Rx x N_Tx
    CMatrix g_vgamma_vrx;    // N_Rx x N_Rx
    CMatrix g_igamma_vrx;    // N_Rx x N_Rx
    CMatrix bf_vrx_left;     // N_Rx x M; g_bf_vrx(b) = bf_vrx_left * receive(b)
    CMatrix g_vupsilon_vrx;  // N_Rx x M

    FarFieldPattern apply_vtx_af(const CVector& v_tx) const;
    FarFieldPattern apply_bf_af(const FarFieldPattern& b, Backend backend = Backend::openmp) const;
    CVector apply_bf_vrx(const FarFieldPattern& b) const;
};

GainOperators build_gain_operators(const RemsModel& model);

struct Outputs {
    CVector v_rx;
    FarFieldPattern a_f;
};
// Superposition of all operators; noise contributions to a_F are not modeled.
Outputs evaluate(const GainOperators& g, const SolveInputs& in);

struct PowerMetrics {
    double p_t = 0.0, p_r = 0.0, p_f = 0.0;
};
PowerMetrics power_metrics(const SolveState& state);

double available_power(const CVector& v_tx, const std::vector<Complex>& z_tx);

double rems_gain(const RemsModel& model, const CVector& v_tx, Direction d);
double to_db(double linear);
// Gains along many directions, computed independently per direction.
std::vector<double> rems_gain_slice(const RemsModel& model, const CVector& v_tx, const std::vector<Direction>& dirs,
                                    Backend backend = Backend::openmp);

struct Efficiencies {
    double p_a = 0.0, p_t = 0.0, p_r = 0.0, p_f = 0.0;
    double eta_matching = 0.0, eta_tuning = 0.0, eta_radiating = 0.0;
    double directivity = 0.0;  // at the requested direction
    double product() const { return eta_matching * eta_tuning * eta_radiating * directivity; }
};
Efficiencies efficiencies(const RemsModel& model, const CVector& v_tx, Direction d);

struct NoiseCovariances {
    CMatrix v_gamma;    // N_Rx x N_Rx
    CMatrix i_gamma;    // N_Rx x N_Rx
    CMatrix v_upsilon;  // M x M
    CMatrix vi_cross;   // E[v_gamma i_gamma^H], N_Rx x N_Rx
};
// Covariance of v_Rx. Empty input matrices count as zero.
CMatrix noise_covariance(const GainOperators& g, const NoiseCovariances& cov);

}  // namespace remskit
