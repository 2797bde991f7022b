// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "remskit/solver.hpp"

namespace remskit {

using PolarizationFn = std::function<Vec2c(Direction)>;

// (cos phi, -sin phi): co-polarization of a linearly polarized field in the x-z plane.
Vec2c case_study_co_polarization(Direction d);

struct BeamformProblem {
    std::vector<Direction> primary;    // U users, U <= N_Tx
    std::vector<Direction> secondary;  // I directions to suppress
    std::vector<Complex> z_set;
    Complex z_init;
    int r = 0;  // number of reconfigurable impedances
    int i_max = 1;
    std::vector<double> sigma_schedule;  // one value per iteration
    PolarizationFn q_co = case_study_co_polarization;
    std::uint64_t rng_seed = 0;

    void validate(int n_tx) const;
    std::size_t z_init_index() const;
};

// Builds the model for a given R-tuple of impedances; must be safe to call concurrently.
using ModelBuilder = std::function<RemsModel(const std::vector<Complex>& z_tuple)>;

// Fixed frontend and radiating structure behind a reconfigurable network; z_tuple selects the terminations.
ModelBuilder reconfigurable_builder(RfFrontend frontend, ReconfigurableNetwork network, StructurePtr radiating);

// f = p_signal / denominator, denominator = p_interf + p_second + sigma.
struct ObjectiveValue {
    double f = 0.0;
    double p_signal = 0.0;
    double denominator = 1.0;
};
// Strict improvement; zero denominators fall back to lexicographic (p_signal, -denominator).
bool improves(const ObjectiveValue& candidate, const ObjectiveValue& incumbent);

struct QuasiPowers {
    double p_signal = 0.0;
    double p_interf = 0.0;
    double p_second = 0.0;
};

// U x N_Tx: row u = q_co(d_u)^T G(d_u).
CMatrix h_co(const RemsModel& model, const std::vector<Direction>& dirs, const PolarizationFn& q_co);
CMatrix zf_precoder(const CMatrix& h);
QuasiPowers quasi_powers(const RemsModel& model, const CMatrix& t, const BeamformProblem& problem);
ObjectiveValue objective(const RemsModel& model, double sigma, const CMatrix& t, const BeamformProblem& problem);

struct BeamformResult {
    std::vector<std::size_t> z_indices;  // into z_set
    std::vector<Complex> z_r;
    CMatrix t;                        // N_Tx x U
    std::vector<double> f_trace;      // accepted objective values, strictly increasing
    std::vector<ObjectiveValue> trace;
    std::size_t evaluations = 0;
    std::vector<std::string> skipped;  // trials rejected for numerical reasons
};

BeamformResult coordinate_ascent(const BeamformProblem& problem, const ModelBuilder& builder,
                                 Backend backend = Backend::openmp);

// Unbiased integer in [0, n) by rejection, independent of the standard library's distributions.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);
std::vector<std::size_t> fisher_yates_permutation(std::size_t n, std::mt19937_64& rng);

// sigma_i = scale * ratio^i for i = 1..count
std::vector<double> geometric_sigma_schedule(double scale, double ratio, int count);
// resistance + jX, X uniformly spaced over [x_min, x_max] inclusive
std::vector<Complex> uniform_reactance_set(double resistance, double x_min, double x_max, int count);

}  // namespace remskit
