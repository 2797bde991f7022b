#include <omp.h>

#include "doctest.h"
#include "test_util.hpp"

using namespace remskit;
using namespace testutil;

TEST_CASE("weighted matvec")
{
    omp_set_num_threads(4);
    std::mt19937_64 rng(1);
    CMatrixRM k = crandn(rng, 301, 257);
    Eigen::VectorXd w(257);
    for (auto& v : w)
        v = uniform(rng, 0.0, 1.0);
    CVector x = crandv(rng, 257);
    CVector a = kernels::weighted_matvec(k, w, x, Backend::serial);
    CVector b = kernels::weighted_matvec(k, w, x, Backend::openmp);
    CHECK(a == b);
    CVector ref = k * w.cast<Complex>().cwiseProduct(x);
    CHECK(rel_err(a, ref) < 1e-14);
    CHECK_THROWS_AS(kernels::weighted_matvec(k, w, crandv(rng, 3)), InputError);
}

TEST_CASE("low-rank product")
{
    omp_set_num_threads(4);
    std::mt19937_64 rng(2);
    CMatrix l = crandn(rng, 200, 5), c = crandn(rng, 5, 5), r = crandn(rng, 150, 5);
    CMatrixRM a = kernels::low_rank_product(l, c, r, Backend::serial);
    CMatrixRM b = kernels::low_rank_product(l, c, r, Backend::openmp);
    CHECK(a == b);
    CHECK(rel_err(CMatrix(a), l * c * r.transpose()) < 1e-14);
    CHECK_THROWS_AS(kernels::low_rank_product(l, crandn(rng, 4, 5), r), InputError);
}

TEST_CASE("block intensities")
{
    omp_set_num_threads(4);
    std::mt19937_64 rng(3);
    CMatrix rows = crandn(rng, 2 * 97, 6);
    CVector x = crandv(rng, 6);
    auto a = kernels::block_intensities(rows, x, Backend::serial);
    auto b = kernels::block_intensities(rows, x, Backend::openmp);
    CHECK(a == b);
    CVector y = rows * x;
    for (std::size_t d = 0; d < a.size(); ++d)
        CHECK(a[d] == doctest::Approx(y.segment<2>(2 * d).squaredNorm()).epsilon(1e-13));
    CHECK_THROWS_AS(kernels::block_intensities(crandn(rng, 3, 6), x), InputError);
}

TEST_CASE("library entry points give identical results on both backends")
{
    omp_set_num_threads(3);
    auto g = make_latlon_grid(10, 20);
    std::mt19937_64 rng(4);
    auto model = random_passive_model(g, rng, 2, 0, 3);
    auto b = random_pattern(g, rng);
    CHECK(apply_scatter(*model.radiating, b, Backend::serial).values() ==
          apply_scatter(*model.radiating, b, Backend::openmp).values());
    std::vector<Direction> dirs;
    for (int i = 0; i < 40; ++i)
        dirs.push_back({uniform(rng, 0.0, kPi), uniform(rng, 0.0, 2 * kPi)});
    CVector v = crandv(rng, 2);
    CHECK(rems_gain_slice(model, v, dirs, Backend::serial) == rems_gain_slice(model, v, dirs, Backend::openmp));
    CMatrix t = random_reciprocal_patterns(g, 3, rng);
    Eigen::MatrixXd x = random_symmetric(rng, 3, 1.0);
    auto s1 = minimum_scattering_structure(g, kF, t, x, {}, Backend::serial);
    auto s2 = minimum_scattering_structure(g, kF, t, x, {}, Backend::openmp);
    CHECK(s1.scatter == s2.scatter);
}
