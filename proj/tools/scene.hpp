// Scene configuration: JSON with // and /* */ comments. See scenes/ for complete examples.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "remskit/beamform.hpp"
#include "remskit/channel.hpp"

namespace remskit::cli {

struct TuningSpec {
    std::optional<TuningNetwork> fixed;
    std::optional<ReconfigurableNetwork> reconfigurable;
    Complex z_init{0.0, 0.0};  // default termination for reconfigurable networks
};

struct ModelSpec {
    std::string frontend, tuning, structure;
    CVector drive;                     // v_tx, empty means all ones
    std::vector<Complex> z_tuple;      // terminations, empty means z_init everywhere
    std::optional<Direction> incident;  // optional plane wave for solve
    Vec2c incident_pol{1.0, 0.0};
};

struct SweepSpec {
    enum class Kind { none, alpha_deg, distance_m } kind = Kind::none;
    std::vector<double> values;
    Vec3 axis = Vec3::UnitX();  // rotation axis of the receiving structure
};

struct ChannelSpec {
    std::string from, to;
    Placement placement;
    int port_out = 0, port_in = 0;  // zero-based
    SweepSpec sweep;
};

struct ProblemSpec {
    std::string model;
    BeamformProblem problem;
};

struct Scene {
    std::filesystem::path base_dir;
    double frequency_hz = 0.0;
    double r0 = 50.0;
    GridPtr grid;
    std::map<std::string, StructurePtr> structures;
    std::map<std::string, RfFrontend> frontends;
    std::map<std::string, TuningSpec> tuning;
    std::map<std::string, ModelSpec> models;
    std::map<std::string, ChannelSpec> channels;
    std::map<std::string, ProblemSpec> problems;

    // Model with the reconfigurable terminations set to z_tuple (or the model's own tuple).
    RemsModel model(const std::string& name) const;
    ModelBuilder builder(const std::string& model_name) const;
    CVector drive(const std::string& model_name) const;
};

Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir);
Scene load_scene(const std::filesystem::path& path);

}  // namespace remskit::cli
