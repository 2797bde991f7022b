#include "commands.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "remskit/errors.hpp"
#include "remskit/numio.hpp"
#include "remskit/response_io.hpp"
#include "scene.hpp"

namespace remskit::cli {

namespace {

constexpr double kDeg = 180.0 / kPi;

std::string fmt(double v) { return format_double(v); }

std::filesystem::path out_file(const Options& opt, const std::string& name)
{
    auto dir = output_dir(opt);
    std::filesystem::create_directories(dir);
    return dir / name;
}

void emit(const Options& opt, const std::string& name, const std::string& contents)
{
    auto p = out_file(opt, name);
    write_file_atomic(p, contents);
    std::cout << "wrote " << p.string() << "\n";
}

Scene scene_of(const Options& opt)
{
    if (opt.scene.empty())
        throw InputError("--scene is required");
    return load_scene(opt.scene);
}

// phi slice over theta in [-180, 180]; theta < 0 stands for (-theta, phi + 180).
std::vector<double> slice_thetas(double step_deg)
{
    if (!(step_deg > 0.0) || step_deg > 180.0)
        throw InputError("--step must be in (0, 180]");
    int n = int(std::floor(180.0 / step_deg + 1e-9));
    std::vector<double> out;
    for (int k = -n; k <= n; ++k)
        out.push_back(k * step_deg);
    return out;
}

std::string gain_csv(const RemsModel& model, const CVector& v_tx, double phi_deg, double step_deg)
{
    auto thetas = slice_thetas(step_deg);
    std::vector<Direction> dirs;
    for (double t : thetas)
        dirs.push_back(t < 0.0 ? direction_from_degrees(-t, phi_deg + 180.0) : direction_from_degrees(t, phi_deg));
    auto g = rems_gain_slice(model, v_tx, dirs);
    std::ostringstream os;
    os << "theta_deg,gain_db\n";
    for (std::size_t k = 0; k < thetas.size(); ++k)
        os << fmt(thetas[k]) << "," << fmt(to_db(g[k])) << "\n";
    return os.str();
}

void add_vector(std::ostringstream& os, const char* name, const CVector& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        os << name << "," << i + 1 << "," << fmt(v[i].real()) << "," << fmt(v[i].imag()) << "\n";
}

std::string slug(double v)
{
    std::string s = fmt(v);
    for (char& c : s)
        if (c == '-')
            c = 'm';
        else if (c == '.')
            c = 'p';
    return s;
}

}  // namespace

std::filesystem::path output_dir(const Options& opt)
{
    if (!opt.out_dir.empty())
        return opt.out_dir;
    if (const char* env = std::getenv("REMSKIT_OUT_DIR"); env && *env)
        return env;
    return ".";
}

void cmd_grid(const Options& opt)
{
    Scene sc = scene_of(opt);
    const auto& g = *sc.grid;
    std::ostringstream os;
    os << "index,theta_deg,phi_deg,weight_sr\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        Direction d = g.direction(i);
        os << i << "," << fmt(d.theta * kDeg) << "," << fmt(d.phi * kDeg) << "," << fmt(g.weight(i)) << "\n";
    }
    emit(opt, "grid.csv", os.str());
    if (!g.antipodally_closed())
        std::cerr << "warning: odd n_phi, the grid is not closed under the antipodal map\n";
}

void cmd_extract(const Options& opt)
{
    if (opt.input.empty())
        throw InputError("extract needs a response file");
    auto resp = parse_response_file(read_text_file(opt.input));
    auto s = structure_from_responses(resp);
    auto rep = check_reciprocity(s, opt.tol);
    if (!rep.ok())
        std::cerr << "warning: extracted kernels are not reciprocal to " << fmt(opt.tol) << " (coupling "
                  << fmt(rep.coupling_deviation) << ", kernel " << fmt(rep.kernel_deviation) << ", scatter "
                  << fmt(rep.scatter_deviation) << ")\n";
    std::string text = format_kernel_bundle(s);
    if (!opt.output.empty()) {
        if (opt.output.has_parent_path())
            std::filesystem::create_directories(opt.output.parent_path());
        write_file_atomic(opt.output, text);
        std::cout << "wrote " << opt.output.string() << "\n";
    } else {
        emit(opt, opt.input.stem().string() + ".kernels", text);
    }
}

void cmd_solve(const Options& opt)
{
    Scene sc = scene_of(opt);
    if (!sc.models.count(opt.name))
        throw InputError("unknown model \"" + opt.name + "\"");
    const ModelSpec& spec = sc.models.at(opt.name);
    RemsModel model = sc.model(opt.name);
    SolveInputs in = SolveInputs::zeros(model);
    in.v_tx = sc.drive(opt.name);
    if (spec.incident) {
        std::size_t i = sc.grid->find(*spec.incident);
        if (i == sc.grid->size())
            throw InputError("incident direction is not a grid node");
        // plane wave of RMS field E (V/m) from direction d
        in.b_f = FarFieldPattern::impulse(sc.grid, i, spec.incident_pol / receive_extraction_factor(sc.frequency_hz));
    }
    // the operator path checks every loop's conditioning and cross-checks the direct solve
    Outputs ops = evaluate(build_gain_operators(model), in);
    SolveState st = solve_direct(model, in);
    double worst = 0.0;
    for (double r : st.residuals)
        worst = std::max(worst, r);
    auto rel = [](const CVector& a, const CVector& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); };
    worst = std::max({worst, rel(ops.v_rx, st.v_rx), rel(ops.a_f.values(), st.a_f.values())});
    if (worst > opt.tol)
        throw NumericError("solve residual " + fmt(worst) + " exceeds tolerance " + fmt(opt.tol));

    std::ostringstream os;
    os << "quantity,index,re,im\n";
    add_vector(os, "a_t", st.a_t);
    add_vector(os, "b_t", st.b_t);
    add_vector(os, "a_r", st.a_r);
    add_vector(os, "b_r", st.b_r);
    add_vector(os, "v_rx", st.v_rx);
    emit(opt, opt.name + "_solve.csv", os.str());

    auto pm = power_metrics(st);
    std::ostringstream ps;
    ps << "quantity,value\n";
    ps << "p_a," << fmt(model.n_tx() ? available_power(in.v_tx, model.frontend.z_tx) : 0.0) << "\n";
    ps << "p_t," << fmt(pm.p_t) << "\np_r," << fmt(pm.p_r) << "\np_f," << fmt(pm.p_f) << "\n";
    ps << "max_residual," << fmt(worst) << "\n";
    emit(opt, opt.name + "_powers.csv", ps.str());

    std::ostringstream af;
    write_pattern_csv(af, st.a_f);
    emit(opt, opt.name + "_af.csv", af.str());
}

void cmd_channel(const Options& opt)
{
    Scene sc = scene_of(opt);
    auto it = sc.channels.find(opt.name);
    if (it == sc.channels.end())
        throw InputError("unknown channel \"" + opt.name + "\"");
    const ChannelSpec& c = it->second;
    const RadiatingStructure& r1 = *sc.structures.at(c.from);
    const RadiatingStructure& r2 = *sc.structures.at(c.to);

    std::vector<double> xs = c.sweep.values;
    bool alpha = c.sweep.kind == SweepSpec::Kind::alpha_deg;
    if (c.sweep.kind == SweepSpec::Kind::none)
        xs = {c.placement.distance_m};
    std::vector<Complex> s(xs.size());
    std::vector<std::string> errors(xs.size());
    bool near = false;
#pragma omp parallel for schedule(dynamic) reduction(|| : near)
    for (std::size_t k = 0; k < xs.size(); ++k) {
        try {
            Placement p = c.placement;
            ChannelMatrix ch;
            if (alpha) {
                auto rot = rotate_structure(r2, rotation_matrix(c.sweep.axis, xs[k] / kDeg));
                ch = far_channel(r1, rot, p);
            } else {
                p.distance_m = xs[k];
                ch = far_channel(r1, r2, p);
            }
            s[k] = ch.s21(c.port_out, c.port_in);
            near = near || ch.near_field_warning();
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty())
            throw InputError(e);
    if (near)
        std::cerr << "warning: some points are closer than 10 wavelengths; far-field formulas are indicative only\n";

    std::ostringstream os;
    os << (alpha ? "alpha_deg" : "distance_m") << ",re_s,im_s\n";
    for (std::size_t k = 0; k < xs.size(); ++k)
        os << fmt(xs[k]) << "," << fmt(s[k].real()) << "," << fmt(s[k].imag()) << "\n";
    emit(opt, opt.name + ".csv", os.str());
}

void cmd_gain_pattern(const Options& opt)
{
    Scene sc = scene_of(opt);
    RemsModel model = sc.model(opt.name);
    emit(opt, opt.name + "_gain_phi" + slug(opt.phi_deg) + ".csv",
         gain_csv(model, sc.drive(opt.name), opt.phi_deg, opt.step_deg));
}

void cmd_optimize(const Options& opt)
{
    Scene sc = scene_of(opt);
    auto it = sc.problems.find(opt.name);
    if (it == sc.problems.end())
        throw InputError("unknown problem \"" + opt.name + "\"");
    BeamformProblem problem = it->second.problem;
    if (opt.seed)
        problem.rng_seed = *opt.seed;
    ModelBuilder builder = sc.builder(it->second.model);

    // reference: zero-forcing precoder at the all-z_init configuration
    RemsModel initial = builder(std::vector<Complex>(problem.r, problem.z_init));
    CMatrix t0 = zf_precoder(h_co(initial, problem.primary, problem.q_co));

    BeamformResult res = coordinate_ascent(problem, builder);
    RemsModel best = builder(res.z_r);
    const std::string& p = opt.name;

    std::ostringstream zs;
    zs << "element,index,re_z,im_z\n";
    for (std::size_t r = 0; r < res.z_r.size(); ++r)
        zs << r + 1 << "," << res.z_indices[r] << "," << fmt(res.z_r[r].real()) << "," << fmt(res.z_r[r].imag())
           << "\n";
    emit(opt, p + "_impedances.csv", zs.str());

    std::ostringstream ts;
    ts << "tx,user,re_t,im_t\n";
    for (Eigen::Index n = 0; n < res.t.rows(); ++n)
        for (Eigen::Index u = 0; u < res.t.cols(); ++u)
            ts << n + 1 << "," << u + 1 << "," << fmt(res.t(n, u).real()) << "," << fmt(res.t(n, u).imag()) << "\n";
    emit(opt, p + "_precoder.csv", ts.str());

    std::ostringstream fs;
    fs << "step,f,p_signal,denominator\n";
    for (std::size_t k = 0; k < res.trace.size(); ++k)
        fs << k << "," << fmt(res.trace[k].f) << "," << fmt(res.trace[k].p_signal) << ","
           << fmt(res.trace[k].denominator) << "\n";
    emit(opt, p + "_trace.csv", fs.str());

    std::ostringstream us;
    us << "kind,user,theta_deg,phi_deg,gain_initial_db,gain_optimized_db\n";
    auto user_rows = [&](const char* kind, const std::vector<Direction>& dirs, Eigen::Index u) {
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            double g0 = to_db(rems_gain(initial, t0.col(u), dirs[k]));
            double g1 = to_db(rems_gain(best, res.t.col(u), dirs[k]));
            us << kind << "," << u + 1 << "," << fmt(dirs[k].theta * kDeg) << "," << fmt(dirs[k].phi * kDeg) << ","
               << fmt(g0) << "," << fmt(g1) << "\n";
        }
    };
    for (Eigen::Index u = 0; u < res.t.cols(); ++u) {
        user_rows("primary", {problem.primary[u]}, u);
        user_rows("secondary", problem.secondary, u);
    }
    emit(opt, p + "_users.csv", us.str());

    std::ostringstream ss;
    ss << "evaluations," << res.evaluations << "\n";
    for (const auto& s : res.skipped)
        ss << "skipped," << s << "\n";
    emit(opt, p + "_summary.txt", ss.str());

    for (Eigen::Index u = 0; u < res.t.cols(); ++u) {
        std::string suffix = "_u" + std::to_string(u + 1) + "_phi" + slug(opt.phi_deg) + ".csv";
        emit(opt, p + "_gain" + suffix, gain_csv(best, res.t.col(u), opt.phi_deg, opt.step_deg));
        emit(opt, p + "_gain_initial" + suffix, gain_csv(initial, t0.col(u), opt.phi_deg, opt.step_deg));
    }
    std::cout << "f = " << fmt(res.f_trace.back()) << " after " << res.evaluations << " evaluations, "
              << res.skipped.size() << " skipped\n";
}

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"Radiating-structure network modelling and beamforming"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App* c) {
        c->add_option("--out", opt.out_dir, "Output directory (default $REMSKIT_OUT_DIR, then .)");
        c->add_option("--seed", opt.seed, "Override the random seed");
        c->add_option("--tol", opt.tol, "Numerical tolerance")->check(CLI::PositiveNumber);
    };
    auto with_scene = [&](CLI::App* c) {
        common(c);
        c->add_option("--scene", opt.scene, "Scene file")->required()->check(CLI::ExistingFile);
    };
    auto slice = [&](CLI::App* c) {
        c->add_option("--phi", opt.phi_deg, "Slice azimuth in degrees");
        c->add_option("--step", opt.step_deg, "Theta step in degrees");
    };

    auto* grid = app.add_subcommand("grid", "Write the direction grid");
    with_scene(grid);
    auto* extract = app.add_subcommand("extract", "Plane-wave response file to kernel bundle");
    common(extract);
    extract->add_option("responses", opt.input, "Response file")->required()->check(CLI::ExistingFile);
    extract->add_option("-o,--output", opt.output, "Kernel bundle path");
    auto* solve = app.add_subcommand("solve", "Solve a model for its drive and incident field");
    with_scene(solve);
    solve->add_option("--model", opt.name)->required();
    auto* channel = app.add_subcommand("channel", "Far-field channel between two structures");
    with_scene(channel);
    channel->add_option("--channel", opt.name)->required();
    auto* gain = app.add_subcommand("gain-pattern", "Gain along a phi slice");
    with_scene(gain);
    gain->add_option("--model", opt.name)->required();
    slice(gain);
    auto* optimize = app.add_subcommand("optimize", "Beam- and nullforming by coordinate ascent");
    with_scene(optimize);
    optimize->add_option("--problem", opt.name)->required();
    slice(optimize);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*grid)
            cmd_grid(opt);
        else if (*extract)
            cmd_extract(opt);
        else if (*solve)
            cmd_solve(opt);
        else if (*channel)
            cmd_channel(opt);
        else if (*gain)
            cmd_gain_pattern(opt);
        else if (*optimize)
            cmd_optimize(opt);
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConditioningError& e) {
        std::cerr << "numeric failure in loop " << e.loop() << " (condition " << fmt(e.condition())
                  << "): " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace remskit::cli
