// SPDX-License-Identifier: Apache-2.0
#include "remskit/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "remskit/errors.hpp"

namespace remskit {

Vec2c case_study_co_polarization(Direction d) { return {std::cos(d.phi), -std::sin(d.phi)}; }

void BeamformProblem::validate(int n_tx) const
{
    if (primary.empty())
        throw InputError("beamforming needs at least one primary user");
    if (int(primary.size()) > n_tx)
        throw InputError("more primary users than transmit chains");
    if (z_set.empty())
        throw InputError("impedance set is empty");
    for (auto z : z_set)
        if (!(z.real() >= 0.0))
            throw InputError("impedance set entries need a nonnegative real part");
    if (r < 0)
        throw InputError("negative number of reconfigurable elements");
    if (i_max < 1)
        throw InputError("i_max must be at least 1");
    if (int(sigma_schedule.size()) != i_max)
        throw InputError("sigma schedule needs one value per iteration");
    for (double s : sigma_schedule)
        if (!(s >= 0.0))
            throw InputError("sigma values must be nonnegative");
    if (!q_co)
        throw InputError("no co-polarization function");
    z_init_index();
}

std::size_t BeamformProblem::z_init_index() const
{
    for (std::size_t i = 0; i < z_set.size(); ++i)
        if (z_set[i] == z_init)
            return i;
    throw InputError("z_init is not an element of the impedance set");
}

ModelBuilder reconfigurable_builder(RfFrontend frontend, ReconfigurableNetwork network, StructurePtr radiating)
{
    frontend.validate();
    network.validate();
    if (!radiating)
        throw InputError("no radiating structure");
    if (network.n != frontend.n() || network.m != radiating->ports())
        throw InputError("reconfigurable network does not match the frontend and structure port counts");
    return [frontend = std::move(frontend), network = std::move(network),
            radiating = std::move(radiating)](const std::vector<Complex>& z) {
        RemsModel m;
        m.frontend = frontend;
        m.tuning = reduce_reconfigurable(network, z);
        m.radiating = radiating;
        return m;
    };
}

bool improves(const ObjectiveValue& c, const ObjectiveValue& inc)
{
    if (c.denominator > 0.0 && inc.denominator > 0.0)
        return c.f > inc.f;
    if (c.p_signal != inc.p_signal)
        return c.p_signal > inc.p_signal;
    return -c.denominator > -inc.denominator;
}

namespace {

// Transmit operator evaluated at a list of directions: block k is 2 x N_Tx.
CMatrix directional_operator(const RemsModel& model, const std::vector<Direction>& dirs)
{
    CMatrix rows = interpolate_rows(*model.radiating->grid, model.radiating->tx, dirs);
    return rows * transmit_port_map(model);
}

double gain_of(const CMatrix& g, std::size_t k, const CVector& v, const RfFrontend& fe)
{
    Vec2c a = g.middleRows<2>(2 * k) * v;
    return 16.0 * kPi * a.squaredNorm() / (4.0 * available_power(v, fe.z_tx));
}

CMatrix h_from(const CMatrix& g, const std::vector<Direction>& dirs, const PolarizationFn& q_co)
{
    CMatrix h(dirs.size(), g.cols());
    for (std::size_t u = 0; u < dirs.size(); ++u)
        h.row(u) = q_co(dirs[u]).transpose() * g.middleRows<2>(2 * u);
    return h;
}

QuasiPowers quasi_from(const CMatrix& g, const RfFrontend& fe, const CMatrix& t, std::size_t n_primary,
                       std::size_t n_secondary)
{
    QuasiPowers q;
    q.p_signal = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n_primary; ++u) {
        CVector tu = t.col(u);
        q.p_signal = std::min(q.p_signal, gain_of(g, u, tu, fe));
        for (std::size_t v = 0; v < n_primary; ++v)
            if (v != u)
                q.p_interf = std::max(q.p_interf, gain_of(g, v, tu, fe));
        for (std::size_t s = 0; s < n_secondary; ++s)
            q.p_second = std::max(q.p_second, gain_of(g, n_primary + s, tu, fe));
    }
    return q;
}

ObjectiveValue objective_from(const QuasiPowers& q, double sigma)
{
    ObjectiveValue o;
    o.p_signal = q.p_signal;
    o.denominator = q.p_interf + q.p_second + sigma;
    o.f = o.denominator > 0.0 ? q.p_signal / o.denominator : std::numeric_limits<double>::infinity();
    return o;
}

std::vector<Direction> all_directions(const BeamformProblem& p)
{
    std::vector<Direction> d = p.primary;
    d.insert(d.end(), p.secondary.begin(), p.secondary.end());
    return d;
}

struct Trial {
    ObjectiveValue value;
    CMatrix t;
    std::string error;
};

Trial run_trial(const ModelBuilder& builder, const std::vector<Complex>& z, const BeamformProblem& p,
                const std::vector<Direction>& dirs, double sigma)
{
    Trial tr;
    try {
        RemsModel model = builder(z);
        CMatrix g = directional_operator(model, dirs);
        tr.t = zf_precoder(h_from(g, p.primary, p.q_co));
        tr.value = objective_from(quasi_from(g, model.frontend, tr.t, p.primary.size(), p.secondary.size()), sigma);
    } catch (const NumericError& e) {
        tr.error = e.what();
    }
    return tr;
}

}  // namespace

CMatrix h_co(const RemsModel& model, const std::vector<Direction>& dirs, const PolarizationFn& q_co)
{
    return h_from(directional_operator(model, dirs), dirs, q_co);
}

CMatrix zf_precoder(const CMatrix& h)
{
    if (h.rows() == 0 || h.rows() > h.cols())
        throw NumericError("zero-forcing needs a wide channel matrix with at least one row");
    CMatrix hh = h * h.adjoint();
    double c = condition_number(hh);
    if (!(c <= kMaxCondition))
        throw NumericError("channel matrix is rank deficient (cond(H H^H) = " + std::to_string(c) + ")");
    return h.adjoint() * hh.partialPivLu().solve(CMatrix::Identity(h.rows(), h.rows()));
}

QuasiPowers quasi_powers(const RemsModel& model, const CMatrix& t, const BeamformProblem& p)
{
    if (t.rows() != model.n_tx() || std::size_t(t.cols()) != p.primary.size())
        throw InputError("precoder must be N_Tx x U");
    CMatrix g = directional_operator(model, all_directions(p));
    return quasi_from(g, model.frontend, t, p.primary.size(), p.secondary.size());
}

ObjectiveValue objective(const RemsModel& model, double sigma, const CMatrix& t, const BeamformProblem& p)
{
    return objective_from(quasi_powers(model, t, p), sigma);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n)
{
    if (n == 0)
        throw InputError("uniform_below(0)");
    // accept only draws below the largest multiple of n
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do
        x = rng();
    while (x >= limit);
    return x % n;
}

std::vector<std::size_t> fisher_yates_permutation(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i)
        p[i] = i;
    for (std::size_t i = n; i > 1; --i)
        std::swap(p[i - 1], p[uniform_below(rng, i)]);
    return p;
}

std::vector<double> geometric_sigma_schedule(double scale, double ratio, int count)
{
    std::vector<double> s(count);
    for (int i = 0; i < count; ++i)
        s[i] = scale * std::pow(ratio, i + 1);
    return s;
}

std::vector<Complex> uniform_reactance_set(double resistance, double x_min, double x_max, int count)
{
    if (count < 1)
        throw InputError("impedance set needs at least one entry");
    std::vector<Complex> z(count);
    for (int i = 0; i < count; ++i) {
        double x = count == 1 ? x_min : x_min + (x_max - x_min) * i / (count - 1);
        z[i] = {resistance, x};
    }
    return z;
}

BeamformResult coordinate_ascent(const BeamformProblem& p, const ModelBuilder& builder, Backend backend)
{
    const std::size_t i0 = p.z_init_index();
    const std::vector<Direction> dirs = all_directions(p);

    std::vector<std::size_t> best_idx(p.r, i0);
    auto tuple_of = [&](const std::vector<std::size_t>& idx) {
        std::vector<Complex> z(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            z[i] = p.z_set[idx[i]];
        return z;
    };

    RemsModel m0 = builder(tuple_of(best_idx));
    p.validate(m0.n_tx());
    const std::size_t u = p.primary.size();

    BeamformResult res;
    res.t = CMatrix::Identity(m0.n_tx(), u);
    ObjectiveValue best{0.0, 0.0, 1.0};

    if (p.r == 0) {
        auto v = objective(m0, p.sigma_schedule.front(), res.t, p);
        res.evaluations = 1;
        res.trace.push_back(v);
        res.f_trace.push_back(v.f);
        res.z_indices = best_idx;
        return res;
    }

    std::mt19937_64 rng(p.rng_seed);
    const std::size_t nz = p.z_set.size();
    std::vector<Trial> trials(nz);
    for (int it = 0; it < p.i_max; ++it) {
        const double sigma = p.sigma_schedule[it];
        for (std::size_t coord : fisher_yates_permutation(std::size_t(p.r), rng)) {
            auto eval = [&](std::size_t k) {
                std::vector<std::size_t> idx = best_idx;
                idx[coord] = k;
                trials[k] = run_trial(builder, tuple_of(idx), p, dirs, sigma);
            };
            if (backend == Backend::openmp) {
#pragma omp parallel for schedule(dynamic)
                for (std::size_t k = 0; k < nz; ++k)
                    eval(k);
            } else {
                for (std::size_t k = 0; k < nz; ++k)
                    eval(k);
            }
            res.evaluations += nz;
            // acceptance in z_set order
            for (std::size_t k = 0; k < nz; ++k) {
                auto& tr = trials[k];
                if (!tr.error.empty()) {
                    res.skipped.push_back("iteration " + std::to_string(it + 1) + ", element " + std::to_string(coord) +
                                          ", z index " + std::to_string(k) + ": " + tr.error);
                    continue;
                }
                if (improves(tr.value, best)) {
                    best = tr.value;
                    best_idx[coord] = k;
                    res.t = tr.t;
                    res.trace.push_back(tr.value);
                    res.f_trace.push_back(tr.value.f);
                }
            }
        }
    }
    res.z_indices = best_idx;
    res.z_r = tuple_of(best_idx);
    return res;
}

}  // namespace remskit
