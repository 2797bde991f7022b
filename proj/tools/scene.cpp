#include "scene.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "remskit/errors.hpp"
#include "remskit/numio.hpp"
#include "remskit/response_io.hpp"
#include "remskit/touchstone.hpp"

namespace remskit::cli {

namespace {

using json = nlohmann::json;

// Every accessor takes the path of the value so errors point into the file.
[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw InputError(where + ": " + what);
}

const json& need(const json& j, const std::string& key, const std::string& where)
{
    if (!j.is_object())
        fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        fail(where, "missing \"" + key + "\"");
    return *it;
}

double num(const json& j, const std::string& where)
{
    if (!j.is_number())
        fail(where, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v))
        fail(where, "not finite");
    return v;
}

double num_or(const json& j, const std::string& key, double def, const std::string& where)
{
    return j.contains(key) ? num(j[key], where + "." + key) : def;
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer())
        fail(where, "expected an integer");
    return j.get<int>();
}

std::string str(const json& j, const std::string& where)
{
    if (!j.is_string())
        fail(where, "expected a string");
    return j.get<std::string>();
}

// A number or [re, im].
Complex cplx(const json& j, const std::string& where)
{
    if (j.is_number())
        return {num(j, where), 0.0};
    if (j.is_array() && j.size() == 2)
        return {num(j[0], where + "[0]"), num(j[1], where + "[1]")};
    fail(where, "expected a number or [re, im]");
}

std::vector<Complex> cplx_list(const json& j, const std::string& where)
{
    if (!j.is_array())
        fail(where, "expected a list");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(cplx(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Vec3 vec3(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 3)
        fail(where, "expected [x, y, z]");
    return {num(j[0], where), num(j[1], where), num(j[2], where)};
}

Vec3 vec3_or(const json& j, const std::string& key, const Vec3& def, const std::string& where)
{
    return j.contains(key) ? vec3(j[key], where + "." + key) : def;
}

// position_m, or position_wl in wavelengths
Vec3 position(const json& j, double lam, const std::string& where)
{
    if (j.contains("position_m") && j.contains("position_wl"))
        fail(where, "give position_m or position_wl, not both");
    if (j.contains("position_wl"))
        return lam * vec3(j["position_wl"], where + ".position_wl");
    return vec3_or(j, "position_m", Vec3::Zero(), where);
}

Direction direction_deg(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 2)
        fail(where, "expected [theta_deg, phi_deg]");
    return direction_from_degrees(num(j[0], where), num(j[1], where));
}

std::vector<Direction> direction_list(const json& j, const std::string& where)
{
    if (!j.is_array())
        fail(where, "expected a list of [theta_deg, phi_deg]");
    std::vector<Direction> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(direction_deg(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

CMatrix cplx_matrix(const json& j, int rows, int cols, const std::string& where)
{
    if (!j.is_array() || int(j.size()) != rows)
        fail(where, "expected " + std::to_string(rows) + " rows");
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        std::string w = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || int(row.size()) != cols)
            fail(w, "expected " + std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c)
            m(r, c) = cplx(row[c], w);
    }
    return m;
}

template <class F>
void each_named(const json& root, const std::string& key, std::set<std::string>& names, F&& f)
{
    if (!root.contains(key))
        return;
    const json& list = root[key];
    if (!list.is_array())
        fail(key, "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
        std::string where = key + "[" + std::to_string(i) + "]";
        std::string name = str(need(list[i], "name", where), where + ".name");
        if (!names.insert(name).second)
            fail(where, "duplicate name \"" + name + "\"");
        f(list[i], name, key + "." + name);
    }
}

std::filesystem::path existing_file(const Scene& sc, const json& j, const std::string& where)
{
    std::filesystem::path p = str(j, where);
    if (p.is_relative())
        p = sc.base_dir / p;
    if (!std::filesystem::is_regular_file(p))
        fail(where, "file not found: " + p.string());
    return p;
}

DipoleCoupling coupling_mode(const json& j, const std::string& where)
{
    std::string c = j.contains("coupling") ? str(j["coupling"], where + ".coupling") : "none";
    if (c == "none")
        return DipoleCoupling::none;
    if (c == "minimum_scattering")
        return DipoleCoupling::minimum_scattering;
    fail(where + ".coupling", "unknown coupling \"" + c + "\"");
}

// Planar block of identically oriented elements, centred on center_m.
void planar_elements(const json& j, double lam, std::vector<DipoleElement>& out, const std::string& where)
{
    int rows = integer(need(j, "rows", where), where + ".rows");
    int cols = integer(need(j, "cols", where), where + ".cols");
    if (rows < 1 || cols < 1)
        fail(where, "rows and cols must be positive");
    double spacing = num_or(j, "spacing_wl", 0.5, where) * lam;
    std::string plane = j.contains("plane") ? str(j["plane"], where + ".plane") : "yz";
    Vec3 u, v;
    if (plane == "yz")
        u = Vec3::UnitY(), v = Vec3::UnitZ();
    else if (plane == "xz")
        u = Vec3::UnitX(), v = Vec3::UnitZ();
    else if (plane == "xy")
        u = Vec3::UnitX(), v = Vec3::UnitY();
    else
        fail(where + ".plane", "expected yz, xz or xy");
    Vec3 center = j.contains("center_wl") ? lam * vec3(j["center_wl"], where + ".center_wl")
                                          : vec3_or(j, "center_m", Vec3::Zero(), where);
    Vec3 orient = vec3_or(j, "orientation", Vec3::UnitZ(), where);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            Vec3 pos = center + (c - 0.5 * (cols - 1)) * spacing * u + (r - 0.5 * (rows - 1)) * spacing * v;
            out.push_back({orient, pos});
        }
}

RadiatingStructure parse_structure(const Scene& sc, const json& j, const std::string& where)
{
    std::string kind = str(need(j, "kind", where), where + ".kind");
    RadiatingStructure s;
    if (kind == "dipole") {
        s = hertzian_dipole(vec3_or(j, "orientation", Vec3::UnitZ(), where),
                            position(j, wavelength(sc.frequency_hz), where), sc.grid, sc.frequency_hz,
                            coupling_mode(j, where));
    } else if (kind == "isotropic") {
        Vec2c pol(1.0, 0.0);
        if (j.contains("polarization")) {
            auto p = cplx_list(j["polarization"], where + ".polarization");
            if (p.size() != 2)
                fail(where + ".polarization", "expected [a_theta, a_phi]");
            pol = Vec2c(p[0], p[1]).normalized();
        }
        s = isotropic_radiator(sc.grid, sc.frequency_hz, pol);
    } else if (kind == "dipole_array") {
        double lam = wavelength(sc.frequency_hz);
        std::vector<DipoleElement> el;
        if (j.contains("elements")) {
            const json& list = j["elements"];
            if (!list.is_array())
                fail(where + ".elements", "expected a list");
            for (std::size_t i = 0; i < list.size(); ++i) {
                std::string w = where + ".elements[" + std::to_string(i) + "]";
                el.push_back({vec3_or(list[i], "orientation", Vec3::UnitZ(), w), position(list[i], lam, w)});
            }
        }
        if (j.contains("planar")) {
            const json& blocks = j["planar"];
            if (blocks.is_array())
                for (std::size_t i = 0; i < blocks.size(); ++i)
                    planar_elements(blocks[i], lam, el, where + ".planar[" + std::to_string(i) + "]");
            else
                planar_elements(blocks, lam, el, where + ".planar");
        }
        if (el.empty())
            fail(where, "dipole array without elements");
        s = dipole_array(el, sc.grid, sc.frequency_hz, coupling_mode(j, where));
    } else if (kind == "from_files") {
        if (j.contains("kernel_file"))
            s = parse_kernel_bundle(read_text_file(existing_file(sc, j["kernel_file"], where + ".kernel_file")));
        else if (j.contains("response_file"))
            s = structure_from_responses(
                parse_response_file(read_text_file(existing_file(sc, j["response_file"], where + ".response_file"))));
        else
            fail(where, "from_files needs kernel_file or response_file");
        if (std::abs(s.frequency_hz - sc.frequency_hz) > 1e-9 * sc.frequency_hz)
            fail(where, "file frequency " + format_double(s.frequency_hz) + " Hz differs from the scene frequency");
        require_same_grid(*s.grid, *sc.grid);
        s.grid = sc.grid;
    } else {
        fail(where + ".kind", "unknown kind \"" + kind + "\"");
    }
    if (j.contains("rotation")) {
        const json& r = j["rotation"];
        std::string w = where + ".rotation";
        double angle = num(need(r, "angle_deg", w), w + ".angle_deg");
        s = rotate_structure(s, rotation_matrix(vec3_or(r, "axis", Vec3::UnitZ(), w), angle * kPi / 180.0));
    }
    return s;
}

std::vector<Complex> parse_z_set(const json& j, const std::string& where)
{
    if (j.is_array())
        return cplx_list(j, where);
    return uniform_reactance_set(num(need(j, "resistance", where), where + ".resistance"),
                                 num(need(j, "x_min", where), where + ".x_min"),
                                 num(need(j, "x_max", where), where + ".x_max"),
                                 integer(need(j, "count", where), where + ".count"));
}

// The touchstone point at the scene frequency.
CMatrix touchstone_at(const Scene& sc, const json& j, const std::string& where, int expect_ports)
{
    auto data = load_touchstone(existing_file(sc, need(j, "file", where), where + ".file"));
    if (data.n_ports != expect_ports)
        fail(where, "touchstone file has " + std::to_string(data.n_ports) + " ports, expected " +
                        std::to_string(expect_ports));
    if (std::abs(data.r0 - sc.r0) > 1e-12 * sc.r0)
        fail(where, "touchstone reference resistance differs from r0_ohms");
    for (std::size_t k = 0; k < data.size(); ++k)
        if (std::abs(data.frequency_hz(k) - sc.frequency_hz) <= 1e-9 * sc.frequency_hz)
            return data.matrix(k);
    fail(where, "no frequency point at " + format_double(sc.frequency_hz) + " Hz");
}

TuningSpec parse_tuning(const Scene& sc, const json& j, const std::string& where)
{
    std::string kind = str(need(j, "kind", where), where + ".kind");
    TuningSpec t;
    if (kind == "through") {
        t.fixed = TuningNetwork::through(integer(need(j, "ports", where), where + ".ports"));
    } else if (kind == "inline" || kind == "touchstone") {
        TuningNetwork net;
        net.n = integer(need(j, "n", where), where + ".n");
        net.m = integer(need(j, "m", where), where + ".m");
        if (net.n < 1 || net.m < 1)
            fail(where, "n and m must be positive");
        net.s = kind == "inline" ? cplx_matrix(need(j, "s", where), net.n + net.m, net.n + net.m, where + ".s")
                                 : touchstone_at(sc, j, where, net.n + net.m);
        net.validate();
        if (!passivity_check(net.s).passive)
            fail(where, "scattering matrix is not passive");
        t.fixed = net;
    } else if (kind == "reconfigurable") {
        std::string topo = j.contains("topology") ? str(j["topology"], where + ".topology") : "feeds_and_loads";
        std::vector<Complex> z_set = parse_z_set(need(j, "z_set", where), where + ".z_set");
        int n = integer(need(j, "n", where), where + ".n");
        int r = integer(need(j, "r", where), where + ".r");
        if (topo == "feeds_and_loads") {
            t.reconfigurable = ReconfigurableNetwork::feeds_and_loads(n, r, z_set, sc.r0);
        } else if (topo == "inline" || topo == "touchstone") {
            ReconfigurableNetwork net;
            net.n = n;
            net.r = r;
            net.m = integer(need(j, "m", where), where + ".m");
            net.z_set = z_set;
            net.r0 = sc.r0;
            int p = net.n + net.m + net.r;
            net.fixed = topo == "inline" ? cplx_matrix(need(j, "s", where), p, p, where + ".s")
                                         : touchstone_at(sc, j, where, p);
            if (!passivity_check(net.fixed).passive)
                fail(where, "fixed scattering matrix is not passive");
            t.reconfigurable = net;
        } else {
            fail(where + ".topology", "unknown topology \"" + topo + "\"");
        }
        t.reconfigurable->validate();
        t.z_init = j.contains("z_init") ? cplx(j["z_init"], where + ".z_init") : z_set.front();
    } else {
        fail(where + ".kind", "unknown kind \"" + kind + "\"");
    }
    return t;
}

const json& lookup_ref(const json& j, const std::string& key, const std::string& where)
{
    const json& v = need(j, key, where);
    if (!v.is_string())
        fail(where + "." + key, "expected a name");
    return v;
}

template <class Map>
void require_known(const Map& m, const std::string& name, const std::string& what, const std::string& where)
{
    if (!m.count(name))
        fail(where, "unknown " + what + " \"" + name + "\"");
}

std::vector<double> sweep_values(const json& j, const std::string& where)
{
    if (j.contains("values")) {
        const json& v = j["values"];
        if (!v.is_array())
            fail(where + ".values", "expected a list");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(num(v[i], where + ".values"));
        return out;
    }
    double a = num(need(j, "start", where), where + ".start");
    double b = num(need(j, "stop", where), where + ".stop");
    int n = integer(need(j, "count", where), where + ".count");
    if (n < 0)
        fail(where + ".count", "must be nonnegative");
    std::string spacing = j.contains("spacing") ? str(j["spacing"], where + ".spacing") : "linear";
    if (spacing != "linear" && spacing != "log")
        fail(where + ".spacing", "expected linear or log");
    if (spacing == "log" && (a <= 0.0 || b <= 0.0))
        fail(where, "log spacing needs positive bounds");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        double t = n == 1 ? 0.0 : double(i) / (n - 1);
        out.push_back(spacing == "log" ? a * std::pow(b / a, t) : a + (b - a) * t);
    }
    return out;
}

}  // namespace

Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("scene: ") + e.what());
    }
    try {
        Scene sc;
        sc.base_dir = base_dir;
        sc.frequency_hz = num(need(root, "frequency_hz", "scene"), "frequency_hz");
        if (sc.frequency_hz <= 0.0)
            fail("frequency_hz", "must be positive");
        sc.r0 = num_or(root, "r0_ohms", 50.0, "scene");
        if (sc.r0 <= 0.0)
            fail("r0_ohms", "must be positive");
        const json& g = need(root, "grid", "scene");
        sc.grid = make_latlon_grid(integer(need(g, "n_theta", "grid"), "grid.n_theta"),
                                   integer(need(g, "n_phi", "grid"), "grid.n_phi"));

        std::set<std::string> names;
        each_named(root, "structures", names, [&](const json& j, const std::string& name, const std::string& w) {
            sc.structures[name] = std::make_shared<const RadiatingStructure>(parse_structure(sc, j, w));
        });
        each_named(root, "frontends", names, [&](const json& j, const std::string& name, const std::string& w) {
            RfFrontend f;
            f.r0 = sc.r0;
            if (j.contains("z_tx"))
                f.z_tx = cplx_list(j["z_tx"], w + ".z_tx");
            if (j.contains("z_rx"))
                f.z_rx = cplx_list(j["z_rx"], w + ".z_rx");
            f.validate();
            sc.frontends[name] = f;
        });
        each_named(root, "tuning", names, [&](const json& j, const std::string& name, const std::string& w) {
            sc.tuning[name] = parse_tuning(sc, j, w);
        });
        each_named(root, "models", names, [&](const json& j, const std::string& name, const std::string& w) {
            ModelSpec m;
            m.frontend = lookup_ref(j, "frontend", w);
            m.tuning = lookup_ref(j, "tuning", w);
            m.structure = lookup_ref(j, "structure", w);
            require_known(sc.frontends, m.frontend, "frontend", w);
            require_known(sc.tuning, m.tuning, "tuning network", w);
            require_known(sc.structures, m.structure, "structure", w);
            if (j.contains("drive_v")) {
                auto d = cplx_list(j["drive_v"], w + ".drive_v");
                m.drive = Eigen::Map<const CVector>(d.data(), Eigen::Index(d.size()));
            }
            if (j.contains("z_tuple"))
                m.z_tuple = cplx_list(j["z_tuple"], w + ".z_tuple");
            if (j.contains("incident")) {
                const json& inc = j["incident"];
                std::string wi = w + ".incident";
                m.incident = direction_deg(need(inc, "direction_deg", wi), wi + ".direction_deg");
                if (inc.contains("polarization")) {
                    auto p = cplx_list(inc["polarization"], wi + ".polarization");
                    if (p.size() != 2)
                        fail(wi + ".polarization", "expected [a_theta, a_phi]");
                    m.incident_pol = Vec2c(p[0], p[1]);
                }
            }
            sc.models[name] = m;
            sc.model(name).validate();
        });
        each_named(root, "channels", names, [&](const json& j, const std::string& name, const std::string& w) {
            ChannelSpec c;
            c.from = lookup_ref(j, "from", w);
            c.to = lookup_ref(j, "to", w);
            require_known(sc.structures, c.from, "structure", w);
            require_known(sc.structures, c.to, "structure", w);
            c.placement.distance_m = num_or(j, "distance_m", 1.0, w);
            c.placement.direction = vec3_or(j, "direction", Vec3::UnitX(), w);
            c.placement.validate();
            if (j.contains("ports")) {
                const json& p = j["ports"];
                if (!p.is_array() || p.size() != 2)
                    fail(w + ".ports", "expected [port_out, port_in]");
                c.port_out = integer(p[0], w + ".ports") - 1;
                c.port_in = integer(p[1], w + ".ports") - 1;
            }
            if (c.port_out < 0 || c.port_out >= sc.structures[c.to]->ports() || c.port_in < 0 ||
                c.port_in >= sc.structures[c.from]->ports())
                fail(w + ".ports", "port out of range (ports are numbered from 1)");
            if (j.contains("sweep")) {
                const json& s = j["sweep"];
                std::string ws = w + ".sweep";
                std::string param = str(need(s, "parameter", ws), ws + ".parameter");
                if (param == "alpha_deg")
                    c.sweep.kind = SweepSpec::Kind::alpha_deg;
                else if (param == "distance_m")
                    c.sweep.kind = SweepSpec::Kind::distance_m;
                else
                    fail(ws + ".parameter", "expected alpha_deg or distance_m");
                c.sweep.values = sweep_values(s, ws);
                c.sweep.axis = vec3_or(s, "axis", c.placement.direction, ws);
                if (c.sweep.axis.norm() == 0.0)
                    fail(ws + ".axis", "zero axis");
                if (c.sweep.kind == SweepSpec::Kind::distance_m)
                    for (double d : c.sweep.values)
                        if (!(d > 0.0))
                            fail(ws, "distances must be positive");
            }
            sc.channels[name] = c;
        });
        each_named(root, "problems", names, [&](const json& j, const std::string& name, const std::string& w) {
            ProblemSpec p;
            p.model = lookup_ref(j, "model", w);
            require_known(sc.models, p.model, "model", w);
            const TuningSpec& t = sc.tuning.at(sc.models.at(p.model).tuning);
            if (!t.reconfigurable)
                fail(w, "model \"" + p.model + "\" has no reconfigurable tuning network");
            BeamformProblem& b = p.problem;
            b.primary = direction_list(need(j, "primary_deg", w), w + ".primary_deg");
            if (j.contains("secondary_deg"))
                b.secondary = direction_list(j["secondary_deg"], w + ".secondary_deg");
            b.z_set = t.reconfigurable->z_set;
            b.r = t.reconfigurable->r;
            b.z_init = t.z_init;
            if (j.contains("z_init"))
                b.z_init = cplx(j["z_init"], w + ".z_init");
            if (j.contains("z_init_index")) {
                int k = integer(j["z_init_index"], w + ".z_init_index");
                if (k < 0 || k >= int(b.z_set.size()))
                    fail(w + ".z_init_index", "out of range");
                b.z_init = b.z_set[k];
            }
            b.i_max = integer(need(j, "i_max", w), w + ".i_max");
            const json& sg = need(j, "sigma", w);
            if (sg.is_array()) {
                for (std::size_t i = 0; i < sg.size(); ++i)
                    b.sigma_schedule.push_back(num(sg[i], w + ".sigma"));
            } else {
                b.sigma_schedule = geometric_sigma_schedule(num(need(sg, "scale", w + ".sigma"), w + ".sigma.scale"),
                                                            num(need(sg, "ratio", w + ".sigma"), w + ".sigma.ratio"),
                                                            b.i_max);
            }
            std::string q = j.contains("q_co") ? str(j["q_co"], w + ".q_co") : "case_study";
            if (q == "case_study")
                b.q_co = case_study_co_polarization;
            else if (q == "theta")
                b.q_co = [](Direction) { return Vec2c(1.0, 0.0); };
            else if (q == "phi")
                b.q_co = [](Direction) { return Vec2c(0.0, 1.0); };
            else
                fail(w + ".q_co", "expected case_study, theta or phi");
            if (j.contains("seed")) {
                if (!j["seed"].is_number_unsigned())
                    fail(w + ".seed", "expected a nonnegative integer");
                b.rng_seed = j["seed"].get<std::uint64_t>();
            }
            b.validate(sc.frontends.at(sc.models.at(p.model).frontend).n_tx());
            sc.problems[name] = p;
        });
        return sc;
    } catch (const json::exception& e) {
        throw InputError(std::string("scene: ") + e.what());
    }
}

Scene load_scene(const std::filesystem::path& path)
{
    return parse_scene(read_text_file(path), path.parent_path());
}

RemsModel Scene::model(const std::string& name) const
{
    auto it = models.find(name);
    if (it == models.end())
        throw InputError("unknown model \"" + name + "\"");
    const ModelSpec& m = it->second;
    const TuningSpec& t = tuning.at(m.tuning);
    if (t.fixed) {
        if (!m.z_tuple.empty())
            throw InputError("model \"" + name + "\": z_tuple given for a fixed tuning network");
        RemsModel out;
        out.frontend = frontends.at(m.frontend);
        out.tuning = *t.fixed;
        out.radiating = structures.at(m.structure);
        return out;
    }
    std::vector<Complex> z = m.z_tuple.empty() ? std::vector<Complex>(t.reconfigurable->r, t.z_init) : m.z_tuple;
    return builder(name)(z);
}

ModelBuilder Scene::builder(const std::string& model_name) const
{
    auto it = models.find(model_name);
    if (it == models.end())
        throw InputError("unknown model \"" + model_name + "\"");
    const TuningSpec& t = tuning.at(it->second.tuning);
    if (!t.reconfigurable)
        throw InputError("model \"" + model_name + "\" has no reconfigurable tuning network");
    return reconfigurable_builder(frontends.at(it->second.frontend), *t.reconfigurable,
                                  structures.at(it->second.structure));
}

CVector Scene::drive(const std::string& model_name) const
{
    auto it = models.find(model_name);
    if (it == models.end())
        throw InputError("unknown model \"" + model_name + "\"");
    int n_tx = frontends.at(it->second.frontend).n_tx();
    if (it->second.drive.size() == 0)
        return CVector::Ones(n_tx);
    if (it->second.drive.size() != n_tx)
        throw InputError("model \"" + model_name + "\": drive_v needs " + std::to_string(n_tx) + " entries");
    return it->second.drive;
}

}  // namespace remskit::cli
