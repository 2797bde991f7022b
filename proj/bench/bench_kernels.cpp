// Serial vs OpenMP variants of the hot loops.
#include <benchmark/benchmark.h>

#include <random>

#include "remskit/beamform.hpp"
#include "remskit/kernels.hpp"

using namespace remskit;

namespace {

CMatrix random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    CMatrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
            m(i, j) = Complex(n(rng), n(rng));
    return m;
}

Backend backend_of(const benchmark::State& st) { return st.range(1) ? Backend::openmp : Backend::serial; }

void BM_weighted_matvec(benchmark::State& st)
{
    auto g = make_latlon_grid(int(st.range(0)), 2 * int(st.range(0)));
    Eigen::Index n = Eigen::Index(2 * g->size());
    CMatrixRM k = random_matrix(n, n, 1);
    CVector x = random_matrix(n, 1, 2);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::weighted_matvec(k, g->component_weights(), x, backend_of(st)));
}

void BM_low_rank_product(benchmark::State& st)
{
    auto g = make_latlon_grid(int(st.range(0)), 2 * int(st.range(0)));
    Eigen::Index n = Eigen::Index(2 * g->size());
    CMatrix l = random_matrix(n, 18, 3), c = random_matrix(18, 18, 4);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::low_rank_product(l, c, l, backend_of(st)));
}

void BM_block_intensities(benchmark::State& st)
{
    CMatrix rows = random_matrix(2 * st.range(0) * st.range(0), 4, 5);
    CVector x = random_matrix(4, 1, 6);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::block_intensities(rows, x, backend_of(st)));
}

// Small reflectarray: one feed, a row of loaded dipoles.
void BM_coordinate_ascent(benchmark::State& st)
{
    auto g = make_latlon_grid(12, 24);
    const double f = 5.4e9, lam = wavelength(f);
    std::vector<DipoleElement> el = {{Vec3::UnitZ(), Vec3(0.4 * lam, 0.0, 0.0)}};
    const int r = int(st.range(0));
    for (int i = 0; i < r; ++i)
        el.push_back({Vec3::UnitZ(), Vec3(0.0, (i - 0.5 * (r - 1)) * 0.5 * lam, 0.0)});
    auto s = std::make_shared<const RadiatingStructure>(dipole_array(el, g, f, DipoleCoupling::minimum_scattering));
    RfFrontend fe;
    fe.z_tx = {50.0};
    auto z_set = uniform_reactance_set(1.2, -196.0, -14.0, 8);
    auto builder = reconfigurable_builder(fe, ReconfigurableNetwork::feeds_and_loads(1, r, z_set, 50.0), s);
    BeamformProblem p;
    p.primary = {direction_from_degrees(90.0, 0.0)};
    p.secondary = {direction_from_degrees(90.0, 30.0)};
    p.z_set = z_set;
    p.z_init = z_set[0];
    p.r = r;
    p.i_max = 2;
    p.sigma_schedule = geometric_sigma_schedule(20.0, 0.5, 2);
    p.rng_seed = 1;
    for (auto _ : st)
        benchmark::DoNotOptimize(coordinate_ascent(p, builder, backend_of(st)));
}

}  // namespace

BENCHMARK(BM_weighted_matvec)->ArgsProduct({{18, 36}, {0, 1}});
BENCHMARK(BM_low_rank_product)->ArgsProduct({{18, 36}, {0, 1}});
BENCHMARK(BM_block_intensities)->ArgsProduct({{64, 256}, {0, 1}});
BENCHMARK(BM_coordinate_ascent)->ArgsProduct({{4, 8}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
