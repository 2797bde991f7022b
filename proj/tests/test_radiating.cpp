#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace remskit;
using namespace testutil;

TEST_CASE("minimum-scattering structure is lossless")
{
    auto g = make_latlon_grid(8, 16);
    std::mt19937_64 rng(21);
    auto s = random_passive_structure(g, 3, rng, false);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        CVector a = crandv(rng, 3);
        auto b = random_pattern(g, rng);
        auto pb = power_balance(s, a, b);
        worst = std::max(worst, std::abs(pb.output - pb.input) / pb.input);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("lossy structure dissipates")
{
    auto g = make_latlon_grid(8, 16);
    std::mt19937_64 rng(22);
    auto s = random_passive_structure(g, 4, rng, true);
    double ratio = 0.0;
    for (int k = 0; k < 1000; ++k) {
        auto pb = power_balance(s, crandv(rng, 4), random_pattern(g, rng));
        ratio = std::max(ratio, pb.output / pb.input);
    }
    CHECK(ratio <= 1.0 + 1e-12);
    CHECK(ratio < 1.0);
}

TEST_CASE("dipole array with coupling completion is passive")
{
    auto g = make_latlon_grid(18, 36);
    double lam = wavelength(kF);
    std::vector<DipoleElement> el;
    for (int i = 0; i < 3; ++i)
        el.push_back({Vec3::UnitZ(), Vec3(0.5 * lam * i, 0.1 * lam, 0.0)});
    el.push_back({Vec3::UnitX(), Vec3(0.0, 0.0, 0.3 * lam)});
    auto s = dipole_array(el, g, kF, DipoleCoupling::minimum_scattering);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        auto pb = power_balance(s, crandv(rng, 4), random_pattern(g, rng));
        CHECK(std::abs(pb.output - pb.input) <= 1e-10 * pb.input);
    }
    auto rep = check_reciprocity(s, 1e-12);
    CHECK(rep.ok());
}

TEST_CASE("uncoupled dipole model is not passive")
{
    // the zero-scatter idealisation violates the power bound for a suitable input
    auto g = make_latlon_grid(18, 36);
    auto s = hertzian_dipole(Vec3::UnitZ(), Vec3::Zero(), g, kF);
    FarFieldPattern b(g, s.rx.col(0).conjugate());
    CVector a = -apply_receive(s, b);
    auto pb = power_balance(s, a, b);
    CHECK(pb.output > pb.input * 1.5);
}

TEST_CASE("single element completion reduces to a matched radiator")
{
    auto g = make_latlon_grid(18, 36);
    auto s = hertzian_dipole(Vec3::UnitZ(), Vec3::Zero(), g, kF, DipoleCoupling::minimum_scattering);
    auto plain = hertzian_dipole(Vec3::UnitZ(), Vec3::Zero(), g, kF);
    double gram = total_power(plain.tx_pattern(0));
    CHECK(std::abs(s.coupling(0, 0) - (1.0 - gram) / (1.0 + gram)) < 1e-14);
    Complex y = 2.0 / (1.0 + gram);
    CHECK(rel_err(s.tx, plain.tx * y) < 1e-14);
    for (std::size_t i = 0; i < g->size(); i += 37)
        for (std::size_t j = 0; j < g->size(); j += 41) {
            Mat2c expect = plain.tx.middleRows<2>(2 * i) * y * plain.tx.middleRows<2>(2 * j).transpose();
            CHECK((s.scatter_block(i, j) - expect).norm() <= 1e-13);
        }
}

TEST_CASE("reciprocity check flags asymmetric data")
{
    auto g = make_latlon_grid(6, 12);
    std::mt19937_64 rng(8);
    auto s = random_passive_structure(g, 2, rng, true);
    auto rep = check_reciprocity(s, 1e-12);
    CHECK(rep.ok());

    auto bad = s;
    bad.rx = 2.0 * s.tx;
    rep = check_reciprocity(bad, 1e-6);
    CHECK_FALSE(rep.kernel_ok);
    CHECK(rep.coupling_ok);
    CHECK(rep.scatter_ok);

    bad = s;
    bad.coupling(0, 1) += 0.1;
    rep = check_reciprocity(bad, 1e-6);
    CHECK_FALSE(rep.coupling_ok);
    CHECK(rep.coupling_deviation == doctest::Approx(0.1).epsilon(1e-9));

    bad = s;
    bad.scatter(0, 5) += Complex(0.0, 0.01);
    CHECK_FALSE(check_reciprocity(bad, 1e-6).scatter_ok);
}

TEST_CASE("two-element array factor")
{
    auto g = make_latlon_grid(37, 72);
    double lam = wavelength(kF);
    std::size_t i_end = g->find(direction_from_degrees(90.0, 0.0));
    std::size_t i_side = g->find(direction_from_degrees(90.0, 90.0));
    REQUIRE(i_end < g->size());
    REQUIRE(i_side < g->size());
    Vec3 axis = unit_vector(g->direction(i_end));
    auto s = dipole_array({{Vec3::UnitZ(), 0.25 * lam * axis}, {Vec3::UnitZ(), -0.25 * lam * axis}}, g, kF);
    auto p = apply_transmit(s, CVector::Ones(2));
    double amp = std::sqrt(3.0 / (8.0 * kPi));
    CHECK(p.value(i_end).norm() < 1e-12);
    CHECK(p.value(i_side).norm() == doctest::Approx(2.0 * amp).epsilon(1e-12));
    // z-oriented elements radiate only theta polarization
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(std::abs(p.value(i)[1]) < 1e-15);
}

TEST_CASE("mutual impedance real part equals pattern overlap")
{
    auto g = make_latlon_grid(90, 180);
    double lam = wavelength(kF);
    std::vector<DipoleElement> el = {{Vec3::UnitZ(), Vec3::Zero()},
                                     {Vec3::UnitZ(), Vec3(0.37 * lam, 0.0, 0.0)},
                                     {Vec3::UnitZ(), Vec3(0.0, 0.0, 0.8 * lam)},
                                     {Vec3(1, 0, 1).normalized(), Vec3(0.2 * lam, 0.5 * lam, 0.1 * lam)}};
    CMatrix z = dipole_mutual_impedance(el, kF);
    CMatrix gram = pattern_gram(*g, dipole_patterns(el, *g, kF));
    CHECK(rel_err(z, z.transpose()) < 1e-14);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(z(i, i) - 1.0) < 1e-15);
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(z(i, j).real() - gram(i, j).real()) < 2e-3);
    }
    // broadside pair at large spacing decays like 1/kR
    double x = 40.0;
    CMatrix far = dipole_mutual_impedance({{Vec3::UnitZ(), Vec3::Zero()}, {Vec3::UnitZ(), Vec3(x / wavenumber(kF), 0, 0)}}, kF);
    CHECK(std::abs(far(0, 1)) == doctest::Approx(1.5 / x).epsilon(2e-2));
}

TEST_CASE("extraction factors")
{
    Complex f = receive_extraction_factor(kF);
    CHECK(std::abs(f.real()) < 1e-12);
    CHECK(f.imag() == doctest::Approx(349.61).epsilon(1e-4));
    Complex h = scatter_extraction_factor(kF);
    CHECK(h.imag() == doctest::Approx(wavenumber(kF) / (2.0 * kPi)).epsilon(1e-15));
    CHECK(wavenumber(kF) == doctest::Approx(113.1756).epsilon(1e-6));
}

TEST_CASE("response set round trip")
{
    auto g = make_latlon_grid(6, 12);
    std::mt19937_64 rng(31);
    auto s = random_passive_structure(g, 3, rng, true);
    auto back = structure_from_responses(responses_of(s, true));
    CHECK(rel_err(back.rx, s.rx) < 1e-14);
    CHECK(rel_err(back.tx, s.tx) < 1e-14);
    CHECK(rel_err(back.coupling, s.coupling) < 1e-14);
    CHECK(rel_err(CMatrix(back.scatter), CMatrix(s.scatter)) < 1e-14);

    auto resp = responses_of(s, true);
    resp.port_present[5] = 0;
    CHECK_THROWS_WITH_AS(structure_from_responses(resp), doctest::Contains("missing port response"), InputError);
    resp = responses_of(s, true);
    resp.scatter_present[0] = 0;
    CHECK_THROWS_AS(structure_from_responses(resp), InputError);
}

TEST_CASE("scatter operator without kernel is the mirror")
{
    auto g = make_latlon_grid(6, 12);
    std::mt19937_64 rng(4);
    auto s = hertzian_dipole(Vec3::UnitY(), Vec3::Zero(), g, kF);
    auto b = random_pattern(g, rng);
    CHECK(apply_scatter(s, b).values() == antipodal_mirror(b).values());
}

TEST_CASE("structure validation")
{
    auto g = make_latlon_grid(6, 12);
    auto s = hertzian_dipole(Vec3::UnitZ(), Vec3::Zero(), g, kF);
    auto bad = s;
    bad.tx.resize(10, 1);
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = s;
    bad.scatter = CMatrixRM::Zero(3, 3);
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = s;
    bad.frequency_hz = 0.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_THROWS_AS(apply_transmit(s, CVector::Ones(2)), InputError);
    CHECK_THROWS_AS(hertzian_dipole(Vec3(1, 1, 0), Vec3::Zero(), g, kF), InputError);
}

TEST_CASE("rotation about z by a grid step is exact")
{
    auto g = make_latlon_grid(12, 24);
    double step = 2.0 * kPi / 24;
    auto s = hertzian_dipole(Vec3::UnitX(), Vec3::Zero(), g, kF);
    auto r = rotate_structure(s, rotation_matrix(Vec3::UnitZ(), 3 * step));
    auto ref = hertzian_dipole(Vec3(std::cos(3 * step), std::sin(3 * step), 0.0), Vec3::Zero(), g, kF);
    CHECK(rel_err(r.tx, ref.tx) < 1e-12);
}

TEST_CASE("general rotation converges with grid density")
{
    double prev = 1.0;
    for (int nt : {18, 36, 72}) {
        auto g = make_latlon_grid(nt, 2 * nt);
        auto s = hertzian_dipole(Vec3::UnitZ(), Vec3::Zero(), g, kF);
        auto r = rotate_structure(s, rotation_matrix(Vec3::UnitY(), kPi / 2));
        auto ref = hertzian_dipole(Vec3::UnitX(), Vec3::Zero(), g, kF);
        double e = rel_err(r.tx, ref.tx);
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < 5e-3);
}

TEST_CASE("isotropic radiator")
{
    auto g = make_latlon_grid(9, 18);
    auto s = isotropic_radiator(g, kF);
    CHECK(s.tx == isotropic_structure(g).tx);
    CHECK(total_power(s.tx_pattern(0)) == doctest::Approx(1.0).epsilon(1e-14));
    auto c = isotropic_radiator(g, kF, Vec2c(Complex(0.6, 0.0), Complex(0.0, 0.8)));
    CHECK(total_power(c.tx_pattern(0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(c.tx(1, 0) - Complex(0.0, 0.8 / std::sqrt(4.0 * kPi))) < 1e-15);
    CHECK_THROWS_AS(isotropic_radiator(g, kF, Vec2c(1.0, 1.0)), InputError);
}
