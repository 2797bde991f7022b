#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "scene.hpp"
#include "remskit/response_io.hpp"
#include "test_util.hpp"

using namespace remskit;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

fs::path source_dir()
{
    const char* s = std::getenv("REMSKIT_SOURCE_DIR");
    return s ? fs::path(s) : fs::current_path();
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("remskit_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args, const fs::path& log = {})
{
    const char* bin = std::getenv("REMSKIT_BINARY");
    REQUIRE_MESSAGE(bin != nullptr, "REMSKIT_BINARY is not set");
    std::string cmd = std::string("\"") + bin + "\" " + args;
    cmd += log.empty() ? " > /dev/null 2>&1" : " > \"" + log.string() + "\" 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string& header)
{
    std::ifstream in(p);
    REQUIRE(in.good());
    std::getline(in, header);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        for (auto f : split_fields(line)) {
            double v;
            REQUIRE(parse_double(f, v));
            row.push_back(v);
        }
        rows.push_back(row);
    }
    return rows;
}

void write(const fs::path& p, const std::string& s)
{
    std::ofstream(p, std::ios::binary) << s;
}

const char* kSmallRraScene = R"({
  // one feed and three loaded dipoles
  "frequency_hz": 5.4e9,
  "grid": { "n_theta": 12, "n_phi": 24 },
  "structures": [ {
    "name": "array", "kind": "dipole_array", "coupling": "minimum_scattering",
    "elements": [ { "position_wl": [0.4, 0, 0] } ],
    "planar": { "rows": 1, "cols": 3, "plane": "xy" }
  }, {
    "name": "single", "kind": "dipole", "coupling": "minimum_scattering"
  } ],
  "frontends": [ { "name": "pa", "z_tx": [50] } ],
  "tuning": [
    { "name": "loads", "kind": "reconfigurable", "n": 1, "r": 3,
      "z_set": { "resistance": 1.2, "x_min": -196, "x_max": -14, "count": 6 } },
    { "name": "none", "kind": "reconfigurable", "n": 1, "r": 0, "z_set": [[1.2, -100]] }
  ],
  "models": [
    { "name": "rra", "frontend": "pa", "tuning": "loads", "structure": "array" },
    { "name": "plain", "frontend": "pa", "tuning": "none", "structure": "single" }
  ],
  "problems": [
    { "name": "null", "model": "rra", "primary_deg": [[90, 0]], "secondary_deg": [[90, 30]],
      "i_max": 3, "sigma": { "scale": 20, "ratio": 0.5 }, "seed": 42 },
    { "name": "trivial", "model": "plain", "primary_deg": [[90, 0]], "i_max": 2, "sigma": [1, 0.5] }
  ]
})";

}  // namespace

TEST_CASE("friis example scene parses")
{
    auto sc = cli::load_scene(source_dir() / "scenes" / "friis.jsonc");
    CHECK(sc.frequency_hz == 5.4e9);
    CHECK(sc.grid->n_theta() == 37);
    CHECK(sc.structures.size() == 3);
    const auto& d = sc.channels.at("distance");
    CHECK(d.sweep.kind == cli::SweepSpec::Kind::distance_m);
    REQUIRE(d.sweep.values.size() == 21);
    CHECK(d.sweep.values.front() == 1.0);
    CHECK(d.sweep.values.back() == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(d.sweep.values[10] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(sc.channels.at("empty").sweep.values.empty());
    auto m = sc.model("tx");
    CHECK(m.n_tx() == 1);
    CHECK(sc.drive("tx") == CVector::Ones(1));
}

TEST_CASE("case-study scene carries the reflectarray constants")
{
    auto sc = cli::load_scene(source_dir() / "scenes" / "rra_case_study.jsonc");
    const auto& p = sc.problems.at("one_user").problem;
    CHECK(p.r == 100);
    CHECK(sc.structures.at("reflectarray")->ports() == 102);
    REQUIRE(p.z_set.size() == 32);
    CHECK(p.z_set.front() == Complex(1.2, -196.0));
    CHECK(p.z_set.back() == Complex(1.2, -14.0));
    CHECK(p.i_max == 10);
    REQUIRE(p.sigma_schedule.size() == 10);
    CHECK(p.sigma_schedule[0] == doctest::Approx(10.0));
    CHECK(p.sigma_schedule[9] == doctest::Approx(20.0 * std::pow(0.5, 10)));
    CHECK(p.q_co(direction_from_degrees(90.0, 30.0))[1].real() == doctest::Approx(-0.5));
    CHECK(sc.problems.at("two_users").problem.primary.size() == 2);
}

TEST_CASE("scene errors name the offending entry")
{
    fs::path base = scratch("errors");
    auto bad = [&](const std::string& text, const std::string& fragment) {
        CHECK_THROWS_WITH_AS(cli::parse_scene(text, base), doctest::Contains(fragment.c_str()), InputError);
    };
    bad("{", "scene");
    bad(R"({"grid": {"n_theta": 4, "n_phi": 8}})", "frequency_hz");
    bad(R"({"frequency_hz": 1e9, "grid": {"n_theta": 4, "n_phi": 8},
            "structures": [{"name": "a", "kind": "dipole"}, {"name": "a", "kind": "dipole"}]})",
        "duplicate name");
    bad(R"({"frequency_hz": 1e9, "grid": {"n_theta": 4, "n_phi": 8},
            "structures": [{"name": "a", "kind": "horn"}]})",
        "structures.a.kind");
    bad(R"({"frequency_hz": 1e9, "grid": {"n_theta": 4, "n_phi": 8},
            "structures": [{"name": "a", "kind": "from_files", "kernel_file": "nope.txt"}]})",
        "file not found");
    bad(R"({"frequency_hz": 1e9, "grid": {"n_theta": 4, "n_phi": 8},
            "structures": [{"name": "a", "kind": "dipole"}],
            "channels": [{"name": "c", "from": "a", "to": "b"}]})",
        "unknown structure \"b\"");
    bad(R"({"frequency_hz": 1e9, "grid": {"n_theta": 4, "n_phi": 8},
            "frontends": [{"name": "f", "z_tx": [[0, 1]]}]})",
        "strictly positive");
    bad(R"({"frequency_hz": 1e9, "grid": {"n_theta": 4, "n_phi": 8},
            "tuning": [{"name": "t", "kind": "inline", "n": 1, "m": 1, "s": [[2, 0], [0, 0]]}]})",
        "passive");
}

TEST_CASE("structures from files and rotation")
{
    fs::path base = scratch("files");
    auto g = make_latlon_grid(6, 12);
    auto d = hertzian_dipole(Vec3::UnitX(), Vec3(0.01, 0, 0), g, kF, DipoleCoupling::minimum_scattering);
    write(base / "d.kernels", format_kernel_bundle(d));
    write(base / "d.resp", format_response_file(responses_of(d, true)));
    auto sc = cli::parse_scene(R"({"frequency_hz": 5.4e9, "grid": {"n_theta": 6, "n_phi": 12},
        "structures": [{"name": "k", "kind": "from_files", "kernel_file": "d.kernels"},
                       {"name": "r", "kind": "from_files", "response_file": "d.resp"},
                       {"name": "z", "kind": "dipole", "orientation": [0, 0, 1],
                        "rotation": {"axis": [0, 0, 1], "angle_deg": 30}}]})",
                               base);
    CHECK(sc.structures.at("k")->tx == d.tx);
    CHECK(rel_err(sc.structures.at("r")->tx, d.tx) < 1e-14);
    CHECK(rel_err(CMatrix(sc.structures.at("r")->scatter), CMatrix(d.scatter)) < 1e-14);
    // a z-dipole is invariant under rotation about z
    auto z = hertzian_dipole(Vec3::UnitZ(), Vec3::Zero(), sc.grid, kF);
    CHECK(rel_err(sc.structures.at("z")->tx, z.tx) < 1e-12);

    CHECK_THROWS_WITH_AS(cli::parse_scene(R"({"frequency_hz": 5e9, "grid": {"n_theta": 6, "n_phi": 12},
        "structures": [{"name": "k", "kind": "from_files", "kernel_file": "d.kernels"}]})",
                                          base),
                         doctest::Contains("differs from the scene frequency"), InputError);
}

TEST_CASE("channel command reproduces Friis")
{
    fs::path out = scratch("friis");
    fs::path scene = source_dir() / "scenes" / "friis.jsonc";
    REQUIRE(run("channel --scene \"" + scene.string() + "\" --channel link_5m --out \"" + out.string() + "\"") == 0);
    std::string header;
    auto rows = read_csv(out / "link_5m.csv", header);
    CHECK(header == "distance_m,re_s,im_s");
    REQUIRE(rows.size() == 1);
    double lam = wavelength(kF);
    double mag = std::hypot(rows[0][1], rows[0][2]);
    CHECK(std::abs(mag - 3.0 * lam / (8.0 * kPi * 5.0)) <= 1e-6 * mag);

    REQUIRE(run("channel --scene \"" + scene.string() + "\" --channel distance --out \"" + out.string() + "\"") == 0);
    rows = read_csv(out / "distance.csv", header);
    REQUIRE(rows.size() == 21);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        double slope = std::log(std::hypot(rows[k][1], rows[k][2]) / std::hypot(rows[k - 1][1], rows[k - 1][2])) /
                       std::log(rows[k][0] / rows[k - 1][0]);
        CHECK(std::abs(slope + 1.0) < 1e-6);
    }

    REQUIRE(run("channel --scene \"" + scene.string() + "\" --channel rotation --out \"" + out.string() + "\"") == 0);
    rows = read_csv(out / "rotation.csv", header);
    CHECK(header == "alpha_deg,re_s,im_s");
    REQUIRE(rows.size() == 19);
    double s0 = std::hypot(rows[0][1], rows[0][2]);
    for (const auto& r : rows) {
        double s = std::hypot(r[1], r[2]);
        CHECK(s <= s0 * (1.0 + 1e-12));
        // rotation resamples the pattern, so the projection law holds to interpolation accuracy
        CHECK(std::abs(s - s0 * std::cos(r[0] * kPi / 180.0)) < 2e-2 * s0);
    }
    CHECK(std::hypot(rows.back()[1], rows.back()[2]) < 2e-2 * s0);

    REQUIRE(run("channel --scene \"" + scene.string() + "\" --channel empty --out \"" + out.string() + "\"") == 0);
    rows = read_csv(out / "empty.csv", header);
    CHECK(header == "alpha_deg,re_s,im_s");
    CHECK(rows.empty());
}

TEST_CASE("gain-pattern command")
{
    fs::path out = scratch("gain");
    fs::path scene = source_dir() / "scenes" / "friis.jsonc";
    REQUIRE(run("gain-pattern --scene \"" + scene.string() + "\" --model reference --step 5 --out \"" + out.string() +
                "\"") == 0);
    std::string header;
    auto rows = read_csv(out / "reference_gain_phi0.csv", header);
    CHECK(header == "theta_deg,gain_db");
    REQUIRE(rows.size() == 73);
    CHECK(rows.front()[0] == -180.0);
    CHECK(rows.back()[0] == 180.0);
    for (const auto& r : rows)
        CHECK(std::abs(r[1]) < 1e-12);

    REQUIRE(run("gain-pattern --scene \"" + scene.string() + "\" --model tx --step 5 --out \"" + out.string() + "\"") ==
            0);
    rows = read_csv(out / "tx_gain_phi0.csv", header);
    double best = -1e9;
    for (const auto& r : rows)
        if (r[1] > best)
            best = r[1];
    CHECK(std::abs(best - 10.0 * std::log10(1.5)) < 1e-9);
    for (const auto& r : rows)
        if (std::abs(std::abs(r[0]) - 90.0) < 1e-9)
            CHECK(std::abs(r[1] - best) < 1e-12);

    // negative theta remaps to (-theta, phi + 180): check on an asymmetric two-element array
    fs::path dir = scratch("remap");
    write(dir / "s.jsonc", R"({"frequency_hz": 5.4e9, "grid": {"n_theta": 18, "n_phi": 36},
        "structures": [{"name": "a", "kind": "dipole_array",
                        "elements": [{"orientation": [0, 1, 0]}, {"orientation": [0, 1, 0], "position_wl": [0.3, 0, 0.1]}]}],
        "frontends": [{"name": "f", "z_tx": [50, 50]}],
        "tuning": [{"name": "t", "kind": "through", "ports": 2}],
        "models": [{"name": "m", "frontend": "f", "tuning": "t", "structure": "a", "drive_v": [1, [0, 1]]}]})");
    REQUIRE(run("gain-pattern --scene \"" + (dir / "s.jsonc").string() + "\" --model m --phi 20 --step 10 --out \"" +
                dir.string() + "\"") == 0);
    rows = read_csv(dir / "m_gain_phi20.csv", header);
    auto sc = cli::load_scene(dir / "s.jsonc");
    auto model = sc.model("m");
    CVector v = sc.drive("m");
    for (const auto& r : rows) {
        double expect = r[0] < 0.0 ? to_db(rems_gain(model, v, direction_from_degrees(-r[0], 200.0)))
                                   : to_db(rems_gain(model, v, direction_from_degrees(r[0], 20.0)));
        CHECK(r[1] == doctest::Approx(expect).epsilon(1e-12));
    }
    // the slice is not symmetric in theta
    CHECK(std::abs(rows[12][1] - rows[6][1]) > 1e-3);
}

TEST_CASE("extract command")
{
    fs::path dir = scratch("extract");
    auto g = make_latlon_grid(6, 12);
    auto d = dipole_array({{Vec3::UnitZ(), Vec3::Zero()}, {Vec3::UnitX(), Vec3(0.0, 0.02, 0.0)}}, g, kF,
                          DipoleCoupling::minimum_scattering);
    write(dir / "resp.txt", format_response_file(responses_of(d, true)));
    REQUIRE(run("extract \"" + (dir / "resp.txt").string() + "\" --out \"" + dir.string() + "\"") == 0);
    std::string first = read_text_file(dir / "resp.kernels");
    auto k = parse_kernel_bundle(first);
    CHECK(rel_err(k.tx, d.tx) < 1e-10);
    CHECK(rel_err(k.rx, d.rx) < 1e-10);
    CHECK(rel_err(CMatrix(k.scatter), CMatrix(d.scatter)) < 1e-10);
    REQUIRE(run("extract \"" + (dir / "resp.txt").string() + "\" -o \"" + (dir / "again.kernels").string() + "\"") == 0);
    CHECK(read_text_file(dir / "again.kernels") == first);

    write(dir / "empty.txt", "# nothing\nfrequency_hz,5.4e9\ngrid,latlon,6,12\nports,1\n");
    CHECK(run("extract \"" + (dir / "empty.txt").string() + "\" --out \"" + dir.string() + "\"", dir / "log.txt") == 1);
    CHECK(read_text_file(dir / "log.txt").find("no records") != std::string::npos);
    write(dir / "broken.txt", "frequency_hz,5.4e9\ngrid,latlon,6,12\nports,1\nport,10,0,theta,1,abc,0\n");
    CHECK(run("extract \"" + (dir / "broken.txt").string() + "\" --out \"" + dir.string() + "\"", dir / "log.txt") == 1);
    CHECK(read_text_file(dir / "log.txt").find("line 4") != std::string::npos);
}

TEST_CASE("optimize command is deterministic and monotone")
{
    fs::path a = scratch("opt_a"), b = scratch("opt_b");
    fs::path scene = a / "rra.jsonc";
    write(scene, kSmallRraScene);
    REQUIRE(run("optimize --scene \"" + scene.string() + "\" --problem null --step 15 --out \"" + a.string() + "\"") ==
            0);
    REQUIRE(run("optimize --scene \"" + scene.string() + "\" --problem null --step 15 --out \"" + b.string() + "\"") ==
            0);
    for (const char* f : {"null_impedances.csv", "null_precoder.csv", "null_trace.csv", "null_users.csv",
                          "null_summary.txt", "null_gain_u1_phi0.csv", "null_gain_initial_u1_phi0.csv"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(read_text_file(a / f) == read_text_file(b / f));
    }
    std::string header;
    auto trace = read_csv(a / "null_trace.csv", header);
    CHECK(header == "step,f,p_signal,denominator");
    REQUIRE(trace.size() >= 2);
    for (std::size_t k = 1; k < trace.size(); ++k)
        CHECK(trace[k][1] > trace[k - 1][1]);

    // the library run with the same inputs gives the same configuration
    auto sc = cli::load_scene(scene);
    auto res = coordinate_ascent(sc.problems.at("null").problem, sc.builder("rra"));
    auto z = read_csv(a / "null_impedances.csv", header);
    REQUIRE(z.size() == res.z_indices.size());
    for (std::size_t r = 0; r < z.size(); ++r)
        CHECK(std::size_t(z[r][1]) == res.z_indices[r]);

    // a different seed is honoured
    fs::path c = scratch("opt_c");
    REQUIRE(run("optimize --scene \"" + scene.string() + "\" --problem null --seed 7 --step 15 --out \"" + c.string() +
                "\"") == 0);
    auto p7 = sc.problems.at("null").problem;
    p7.rng_seed = 7;
    auto res7 = coordinate_ascent(p7, sc.builder("rra"));
    CHECK(read_csv(c / "null_trace.csv", header).size() == res7.trace.size());

    REQUIRE(run("optimize --scene \"" + scene.string() + "\" --problem trivial --step 15 --out \"" + a.string() +
                "\"") == 0);
    CHECK(read_csv(a / "trivial_trace.csv", header).size() == 1);
    CHECK(read_text_file(a / "trivial_summary.txt") == "evaluations,1\n");
}

TEST_CASE("output directory from the environment")
{
    fs::path dir = scratch("env");
    fs::path scene = source_dir() / "scenes" / "friis.jsonc";
    ::setenv("REMSKIT_OUT_DIR", dir.string().c_str(), 1);
    int rc = run("grid --scene \"" + scene.string() + "\"");
    ::unsetenv("REMSKIT_OUT_DIR");
    REQUIRE(rc == 0);
    std::string header;
    auto rows = read_csv(dir / "grid.csv", header);
    CHECK(header == "index,theta_deg,phi_deg,weight_sr");
    CHECK(rows.size() == 37 * 72);
    double sum = 0.0;
    for (const auto& r : rows)
        sum += r[3];
    CHECK(sum == doctest::Approx(4.0 * kPi).epsilon(1e-12));
}

TEST_CASE("exit codes")
{
    fs::path dir = scratch("codes");
    fs::path scene = source_dir() / "scenes" / "friis.jsonc";
    auto s = "--scene \"" + scene.string() + "\" --out \"" + dir.string() + "\"";
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("--help") == 0);
    CHECK(run("solve --model tx --out \"" + dir.string() + "\"") == 1);
    CHECK(run("solve " + s + " --model nope") == 1);
    CHECK(run("channel " + s + " --channel nope") == 1);
    CHECK(run("optimize " + s + " --problem nope") == 1);
    CHECK(run("solve --scene \"" + (dir / "missing.jsonc").string() + "\" --model tx") == 1);
    write(dir / "bad.jsonc", "{ \"frequency_hz\": 5.4e9, ");
    CHECK(run("grid --scene \"" + (dir / "bad.jsonc").string() + "\"", dir / "log.txt") == 1);

    REQUIRE(run("solve " + s + " --model tx") == 0);
    std::string powers = read_text_file(dir / "tx_powers.csv");
    CHECK(powers.rfind("quantity,value\np_a,", 0) == 0);
    CHECK(read_text_file(dir / "tx_af.csv").rfind("theta_deg,phi_deg,re_a_theta", 0) == 0);

    // a shorted PA port facing a perfect reflector leaves the transmit loop singular
    write(dir / "singular.jsonc", R"({"frequency_hz": 5.4e9, "grid": {"n_theta": 6, "n_phi": 12},
        "structures": [{"name": "d", "kind": "dipole"}],
        "frontends": [{"name": "f", "z_tx": [1e-13, 50]}],
        "tuning": [{"name": "t", "kind": "inline", "n": 2, "m": 1,
                    "s": [[-1, 0, 0], [0, 0, 1], [0, 1, 0]]}],
        "models": [{"name": "m", "frontend": "f", "tuning": "t", "structure": "d"}]})");
    CHECK(run("solve --scene \"" + (dir / "singular.jsonc").string() + "\" --model m --out \"" + dir.string() + "\"",
              dir / "log.txt") == 2);
    CHECK(read_text_file(dir / "log.txt").find("(I - L1 - L3)") != std::string::npos);
}

TEST_CASE("solve command with an incident plane wave")
{
    fs::path dir = scratch("solve");
    write(dir / "s.jsonc", R"({"frequency_hz": 5.4e9, "grid": {"n_theta": 19, "n_phi": 36},
        "structures": [{"name": "d", "kind": "dipole"}],
        "frontends": [{"name": "lna", "z_rx": [50]}],
        "tuning": [{"name": "t", "kind": "through", "ports": 1}],
        "models": [{"name": "m", "frontend": "lna", "tuning": "t", "structure": "d",
                    "incident": {"direction_deg": [90, 0], "polarization": [1, 0]}}]})");
    REQUIRE(run("solve --scene \"" + (dir / "s.jsonc").string() + "\" --model m --out \"" + dir.string() + "\"") == 0);
    auto sc = cli::load_scene(dir / "s.jsonc");
    auto model = sc.model("m");
    auto in = SolveInputs::zeros(model);
    std::size_t i = sc.grid->find(direction_from_degrees(90.0, 0.0));
    REQUIRE(i < sc.grid->size());
    in.b_f = FarFieldPattern::impulse(sc.grid, i, Vec2c(1.0, 0.0) / receive_extraction_factor(kF));
    auto st = solve_direct(model, in);
    CHECK(std::abs(st.v_rx[0]) > 0.0);
    std::string text = read_text_file(dir / "m_solve.csv");
    CHECK(text.find("v_rx,1," + format_double(st.v_rx[0].real()) + "," + format_double(st.v_rx[0].imag())) !=
          std::string::npos);
}
