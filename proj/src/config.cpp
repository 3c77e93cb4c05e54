#include "foilwind/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "foilwind/constants.hpp"
#include "foilwind/errors.hpp"

namespace foilwind {

std::string to_string(LayoutKind k) {
    switch (k) {
        case LayoutKind::Box: return "box";
        case LayoutKind::PotCore: return "pot_core";
        case LayoutKind::Window: return "window";
        case LayoutKind::Rects: return "rects";
        case LayoutKind::Msh: return "msh";
    }
    return "unknown";
}

std::vector<double> Config::frequencies() const {
    return sweep.logarithmic ? log_frequencies(sweep.f_min, sweep.f_max, sweep.points)
                             : linear_frequencies(sweep.f_min, sweep.f_max, sweep.points);
}

namespace {

class Reader {
public:
    explicit Reader(std::string path) : path_(std::move(path)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
        std::ostringstream os;
        os << path_;
        const YAML::Mark m = at.Mark();
        if (m.line >= 0) {
            os << ':' << m.line + 1 << ':' << m.column + 1;
        }
        os << ": " << msg;
        throw ConfigError(os.str());
    }

    void expect_map(const YAML::Node& n, const std::string& name) const {
        if (!n.IsMap()) fail(n, "'" + name + "' must be a mapping");
    }

    void check_keys(const YAML::Node& n, const std::string& name, const std::set<std::string>& allowed) const {
        expect_map(n, name);
        for (const auto& kv : n) {
            const std::string key = kv.first.as<std::string>();
            if (allowed.count(key) == 0) {
                fail(kv.first, "unknown key '" + key + "' in section '" + name + "'");
            }
        }
    }

    YAML::Node section(const YAML::Node& parent, const std::string& key, const std::string& where) const {
        const YAML::Node n = parent[key];
        if (!n) fail(parent, "missing section '" + key + "'" + where);
        return n;
    }

    double number(const YAML::Node& parent, const std::string& key) const {
        const YAML::Node n = parent[key];
        if (!n) fail(parent, "missing key '" + key + "'");
        return to_number(n, key);
    }

    double number(const YAML::Node& parent, const std::string& key, double fallback) const {
        const YAML::Node n = parent[key];
        return n ? to_number(n, key) : fallback;
    }

    double positive(const YAML::Node& parent, const std::string& key) const {
        const double v = number(parent, key);
        if (!(v > 0.0)) fail(parent[key], "'" + key + "' must be positive");
        return v;
    }

    double positive(const YAML::Node& parent, const std::string& key, double fallback) const {
        const double v = number(parent, key, fallback);
        if (!(v > 0.0)) fail(parent[key] ? parent[key] : parent, "'" + key + "' must be positive");
        return v;
    }

    int integer(const YAML::Node& parent, const std::string& key, int fallback, int min_value) const {
        const YAML::Node n = parent[key];
        if (!n) return fallback;
        int v = 0;
        try {
            v = n.as<int>();
        } catch (const YAML::Exception&) {
            fail(n, "'" + key + "' must be an integer");
        }
        if (v < min_value) fail(n, "'" + key + "' must be at least " + std::to_string(min_value));
        return v;
    }

    int required_integer(const YAML::Node& parent, const std::string& key, int min_value) const {
        if (!parent[key]) fail(parent, "missing key '" + key + "'");
        return integer(parent, key, 0, min_value);
    }

    std::string text(const YAML::Node& parent, const std::string& key, const std::string& fallback) const {
        const YAML::Node n = parent[key];
        if (!n) return fallback;
        if (!n.IsScalar()) fail(n, "'" + key + "' must be a scalar");
        return n.as<std::string>();
    }

    std::string choice(const YAML::Node& parent, const std::string& key, const std::string& fallback,
                       const std::set<std::string>& allowed) const {
        const std::string v = text(parent, key, fallback);
        if (allowed.count(v) == 0) {
            std::string list;
            for (const std::string& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(parent[key] ? parent[key] : parent, "'" + key + "' must be one of " + list + ", got '" + v + "'");
        }
        return v;
    }

    double to_number(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) fail(n, "'" + key + "' must be a number");
        double v = 0.0;
        try {
            v = n.as<double>();
        } catch (const YAML::Exception&) {
            fail(n, "'" + key + "' must be a number, got '" + n.as<std::string>() + "'");
        }
        if (!std::isfinite(v)) fail(n, "'" + key + "' must be finite");
        return v;
    }

private:
    std::string path_;
};

Region parse_region(const Reader& rd, const YAML::Node& n) {
    const std::string s = n.as<std::string>();
    if (s == "air") return Region::Air;
    if (s == "yoke") return Region::Yoke;
    if (s == "foil_winding") return Region::FoilWinding;
    rd.fail(n, "unknown region '" + s + "' (air, yoke, foil_winding)");
}

SideCondition parse_side(const Reader& rd, const YAML::Node& sides, const std::string& key) {
    const std::string v = rd.choice(sides, key, "flux_wall", {"flux_wall", "natural"});
    return v == "natural" ? SideCondition::Natural : SideCondition::FluxWall;
}

LayoutRect parse_rect(const Reader& rd, const YAML::Node& n, const std::string& name, bool with_region) {
    if (with_region) {
        rd.check_keys(n, name, {"x0", "x1", "y0", "y1", "region"});
    } else {
        rd.check_keys(n, name, {"x0", "x1", "y0", "y1"});
    }
    LayoutRect r;
    r.x0 = rd.number(n, "x0");
    r.x1 = rd.number(n, "x1");
    r.y0 = rd.number(n, "y0");
    r.y1 = rd.number(n, "y1");
    if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) rd.fail(n, "rectangle needs x1 > x0 and y1 > y0");
    if (with_region) {
        if (!n["region"]) rd.fail(n, "missing key 'region'");
        r.region = parse_region(rd, n["region"]);
    } else {
        r.region = Region::FoilWinding;
    }
    return r;
}

void parse_geometry(const Reader& rd, const YAML::Node& g, Config& c) {
    rd.check_keys(g, "geometry", {"symmetry", "length_z", "layout", "mesh_size", "refinements", "margin",
                                  "gap", "pot_core", "rects", "sides", "msh"});
    GeometryConfig& out = c.geometry;
    const std::string sym = rd.choice(g, "symmetry", "cartesian", {"cartesian", "axisymmetric"});
    if (sym == "cartesian") {
        out.symmetry = SymmetryMode::cartesian(rd.positive(g, "length_z"));
    } else {
        if (g["length_z"]) rd.fail(g["length_z"], "'length_z' is only valid for cartesian symmetry");
        out.symmetry = SymmetryMode::axisymmetric();
    }
    const std::string layout = rd.choice(g, "layout", "box", {"box", "pot_core", "window", "rects", "msh"});
    if (layout == "box") out.layout = LayoutKind::Box;
    if (layout == "pot_core") out.layout = LayoutKind::PotCore;
    if (layout == "window") out.layout = LayoutKind::Window;
    if (layout == "rects") out.layout = LayoutKind::Rects;
    if (layout == "msh") out.layout = LayoutKind::Msh;

    if (out.layout != LayoutKind::Msh) {
        out.mesh_size = rd.positive(g, "mesh_size");
    }
    out.refinements = rd.integer(g, "refinements", 0, 0);
    out.margin = rd.positive(g, "margin", 0.01);
    if (out.layout == LayoutKind::Window) {
        out.gap = rd.positive(g, "gap");
    }
    if (out.layout == LayoutKind::PotCore) {
        if (out.symmetry.kind() != SymmetryMode::Kind::Axisymmetric) {
            rd.fail(g, "layout 'pot_core' requires axisymmetric symmetry");
        }
        const YAML::Node p = rd.section(g, "pot_core", " in 'geometry'");
        rd.check_keys(p, "pot_core", {"yoke_width", "yoke_height", "yoke_thickness", "air_gap",
                                      "corner_radius", "radial_offset"});
        PotCoreGeometry& pc = out.pot;
        pc.yoke_width = rd.positive(p, "yoke_width", pc.yoke_width);
        pc.yoke_height = rd.positive(p, "yoke_height", pc.yoke_height);
        pc.yoke_thickness = rd.positive(p, "yoke_thickness", pc.yoke_thickness);
        pc.air_gap = rd.positive(p, "air_gap", pc.air_gap);
        pc.corner_radius = rd.number(p, "corner_radius", pc.corner_radius);
        if (pc.corner_radius < 0.0) rd.fail(p["corner_radius"], "'corner_radius' must not be negative");
        pc.radial_offset = rd.number(p, "radial_offset", pc.radial_offset);
    }
    if (out.layout == LayoutKind::Rects) {
        const YAML::Node list = rd.section(g, "rects", " in 'geometry'");
        if (!list.IsSequence() || list.size() == 0) rd.fail(list, "'rects' must be a non-empty list");
        for (const YAML::Node& r : list) {
            out.rects.rects.push_back(parse_rect(rd, r, "rects", true));
        }
        out.rects.axisymmetric = out.symmetry.is_axisymmetric();
        if (const YAML::Node sides = g["sides"]) {
            rd.check_keys(sides, "sides", {"left", "right", "bottom", "top"});
            out.rects.left = parse_side(rd, sides, "left");
            out.rects.right = parse_side(rd, sides, "right");
            out.rects.bottom = parse_side(rd, sides, "bottom");
            out.rects.top = parse_side(rd, sides, "top");
        }
    } else if (g["sides"]) {
        rd.fail(g["sides"], "'sides' is only valid for the 'rects' layout");
    }
    if (out.layout == LayoutKind::Msh) {
        const YAML::Node m = rd.section(g, "msh", " in 'geometry'");
        rd.check_keys(m, "msh", {"file", "regions", "boundaries"});
        if (!m["file"]) rd.fail(m, "missing key 'file'");
        std::filesystem::path file = m["file"].as<std::string>();
        if (file.is_relative()) {
            file = std::filesystem::path(c.source_path).parent_path() / file;
        }
        out.msh_file = file.string();
        if (const YAML::Node regions = m["regions"]) {
            rd.expect_map(regions, "regions");
            out.physical.regions.clear();
            for (const auto& kv : regions) {
                out.physical.regions[kv.first.as<std::string>()] = parse_region(rd, kv.second);
            }
        }
        if (const YAML::Node bounds = m["boundaries"]) {
            rd.expect_map(bounds, "boundaries");
            out.physical.boundaries.clear();
            for (const auto& kv : bounds) {
                const std::string v = kv.second.as<std::string>();
                if (v == "flux_wall") {
                    out.physical.boundaries[kv.first.as<std::string>()] = BoundaryTag::FluxWall;
                } else if (v == "axis") {
                    out.physical.boundaries[kv.first.as<std::string>()] = BoundaryTag::Axis;
                } else if (v == "natural") {
                    out.physical.boundaries[kv.first.as<std::string>()] = std::nullopt;
                } else {
                    rd.fail(kv.second, "unknown boundary '" + v + "' (flux_wall, axis, natural)");
                }
            }
        }
    }
}

void parse_winding(const Reader& rd, const YAML::Node& w, Config& c) {
    rd.check_keys(w, "winding", {"turns", "fill_factor", "thickness", "height", "rect", "alpha_axis", "splines"});
    WindingConfig& out = c.winding;
    out.turns = rd.required_integer(w, "turns", 2);
    out.fill_factor = rd.number(w, "fill_factor");
    if (!(out.fill_factor > 0.0 && out.fill_factor < 1.0)) {
        rd.fail(w["fill_factor"], "'fill_factor' must lie in (0, 1)");
    }
    out.splines = rd.integer(w, "splines", 7, 3);
    const std::string axis = rd.choice(w, "alpha_axis", "x", {"x", "y", "r", "z"});
    out.alpha_axis = axis == "x" || axis == "r" ? 0 : 1;

    const LayoutKind kind = c.geometry.layout;
    const bool sized = kind == LayoutKind::Box || kind == LayoutKind::PotCore || kind == LayoutKind::Window;
    if (sized) {
        out.thickness = rd.positive(w, "thickness");
        out.height = rd.positive(w, "height");
        if (w["rect"]) rd.fail(w["rect"], "'rect' is only valid for 'rects' and 'msh' layouts");
        if (kind == LayoutKind::PotCore && out.alpha_axis != 0) {
            rd.fail(w["alpha_axis"], "the pot core winding runs along r");
        }
    } else {
        if (w["thickness"] || w["height"]) {
            rd.fail(w, "'thickness' and 'height' follow from the winding rectangle for this layout");
        }
        if (kind == LayoutKind::Msh) {
            out.rect = parse_rect(rd, rd.section(w, "rect", " in 'winding'"), "rect", false);
        } else if (w["rect"]) {
            rd.fail(w["rect"], "'rect' is taken from the foil_winding rectangle of the layout");
        }
    }
    if (kind == LayoutKind::PotCore) {
        c.geometry.pot.winding_thickness = out.thickness;
        c.geometry.pot.winding_height = out.height;
    }
}

void parse_materials(const Reader& rd, const YAML::Node& m, Config& c) {
    rd.check_keys(m, "materials", {"sigma_c", "sigma_i", "mu_r_c", "mu_r_i", "eps_r_c", "eps_r_i",
                                   "mu_r_air", "mu_r_yoke"});
    FoilMaterials& f = c.materials.foil;
    f.sigma_c = rd.positive(m, "sigma_c");
    f.sigma_i = rd.number(m, "sigma_i", 0.0);
    if (f.sigma_i != 0.0) rd.fail(m["sigma_i"], "'sigma_i' must be 0, the insulation does not conduct");
    f.nu_c = nu0 / rd.positive(m, "mu_r_c", 1.0);
    f.nu_i = nu0 / rd.positive(m, "mu_r_i", 1.0);
    f.eps_c = eps0 * rd.positive(m, "eps_r_c", 1.0);
    f.eps_i = eps0 * rd.positive(m, "eps_r_i");
    f.fill_factor = c.winding.fill_factor;
    c.materials.mu_r_air = rd.positive(m, "mu_r_air", 1.0);
    if (m["mu_r_yoke"]) {
        c.materials.mu_r_yoke = rd.positive(m, "mu_r_yoke");
    } else if (c.geometry.layout == LayoutKind::PotCore) {
        rd.fail(m, "missing key 'mu_r_yoke' (the layout contains a yoke)");
    }
}

void parse_drive(const Reader& rd, const YAML::Node& d, Config& c) {
    rd.check_keys(d, "drive", {"type", "amplitude"});
    const std::string type = rd.choice(d, "type", "current", {"current", "voltage"});
    complex amp(1.0, 0.0);
    if (const YAML::Node a = d["amplitude"]) {
        if (a.IsSequence()) {
            if (a.size() != 2) rd.fail(a, "'amplitude' must be a number or [re, im]");
            amp = complex(rd.to_number(a[0], "amplitude"), rd.to_number(a[1], "amplitude"));
        } else {
            amp = complex(rd.to_number(a, "amplitude"), 0.0);
        }
        if (amp == complex(0.0, 0.0)) rd.fail(a, "'amplitude' must not be zero");
    }
    if (type == "current") {
        c.drive = CurrentDrive{amp};
    } else {
        c.drive = VoltageDrive{amp};
    }
}

void parse_sweep(const Reader& rd, const YAML::Node& s, Config& c) {
    rd.check_keys(s, "sweep", {"f_min", "f_max", "points", "spacing"});
    SweepConfig& out = c.sweep;
    out.f_min = rd.positive(s, "f_min", out.f_min);
    out.f_max = rd.positive(s, "f_max", out.f_max);
    out.points = rd.integer(s, "points", out.points, 1);
    out.logarithmic = rd.choice(s, "spacing", "log", {"log", "linear"}) == "log";
    if (out.f_max < out.f_min) rd.fail(s, "'f_max' must not be below 'f_min'");
    if (out.points > 1 && out.f_max == out.f_min) rd.fail(s, "several points need f_max > f_min");
}

void parse_output(const Reader& rd, const YAML::Node& o, Config& c) {
    rd.check_keys(o, "output", {"directory", "profile_samples", "contour_levels"});
    c.output.directory = rd.text(o, "directory", c.output.directory);
    if (c.output.directory.empty()) rd.fail(o, "'directory' must not be empty");
    c.output.profile_samples = rd.integer(o, "profile_samples", c.output.profile_samples, 0);
    c.output.contour_levels = rd.integer(o, "contour_levels", c.output.contour_levels, 0);
}

void parse_oracle(const Reader& rd, const YAML::Node& o, Config& c) {
    rd.check_keys(o, "oracle", {"mesh_size", "max_elements"});
    if (o["mesh_size"]) c.oracle.mesh_size = rd.positive(o, "mesh_size");
    c.oracle.max_elements = rd.integer(o, "max_elements", static_cast<int>(c.oracle.max_elements), 1);
}

}  // namespace

Config parse_config(const std::string& text, const std::string& path) {
    const Reader rd(path);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": " + e.msg);
    }
    if (!root.IsMap()) {
        throw ConfigError(path + ": configuration must be a mapping of sections");
    }
    rd.check_keys(root, "top level", {"geometry", "winding", "materials", "drive", "sweep", "model", "output", "oracle"});

    Config c;
    c.source_path = path;
    c.source_text = text;
    try {
        parse_geometry(rd, rd.section(root, "geometry", ""), c);
        parse_winding(rd, rd.section(root, "winding", ""), c);
        parse_materials(rd, rd.section(root, "materials", ""), c);
        if (const YAML::Node d = root["drive"]) parse_drive(rd, d, c);
        if (const YAML::Node s = root["sweep"]) parse_sweep(rd, s, c);
        if (const YAML::Node o = root["output"]) parse_output(rd, o, c);
        if (const YAML::Node o = root["oracle"]) parse_oracle(rd, o, c);
        const std::string model = rd.choice(root, "model", "both", {"standard", "capacitive", "both"});
        if (model == "standard") c.models = {ModelKind::Standard};
        if (model == "capacitive") c.models = {ModelKind::Capacitive};
        if (model == "both") c.models = {ModelKind::Standard, ModelKind::Capacitive};
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": " + e.msg);
    } catch (const GeometryError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), path);
}

RectLayout build_layout(const Config& c) {
    const GeometryConfig& g = c.geometry;
    const WindingConfig& w = c.winding;
    switch (g.layout) {
        case LayoutKind::Box: {
            RectLayout l = cartesian_winding_layout(w.thickness, w.height, g.margin);
            l.axisymmetric = g.symmetry.is_axisymmetric();
            return l;
        }
        case LayoutKind::PotCore:
            return pot_inductor_layout(g.pot);
        case LayoutKind::Window: {
            RectLayout l = window_winding_layout(w.thickness, w.height, g.gap);
            l.axisymmetric = g.symmetry.is_axisymmetric();
            return l;
        }
        case LayoutKind::Rects:
            return g.rects;
        case LayoutKind::Msh:
            break;
    }
    throw ConfigError("layout '" + to_string(g.layout) + "' has no rectangle description");
}

LayoutRect winding_rect(const Config& c) {
    if (c.geometry.layout == LayoutKind::Msh) {
        return *c.winding.rect;
    }
    if (c.geometry.layout == LayoutKind::PotCore) {
        return pot_winding_rect(c.geometry.pot);
    }
    const RectLayout layout = build_layout(c);
    const LayoutRect* found = nullptr;
    for (const LayoutRect& r : layout.rects) {
        if (r.region == Region::FoilWinding) {
            if (found) {
                throw ConfigError("layout contains more than one foil_winding rectangle");
            }
            found = &r;
        }
    }
    if (!found) {
        throw ConfigError("layout contains no foil_winding rectangle");
    }
    return *found;
}

FoilModel build_model(const Config& c) {
    FoilModel m;
    m.symmetry = c.geometry.symmetry;
    if (c.geometry.layout == LayoutKind::Msh) {
        std::ifstream in(c.geometry.msh_file);
        if (!in) {
            throw IoError("cannot read mesh file '" + c.geometry.msh_file + "'");
        }
        m.mesh = read_msh(in, c.geometry.physical);
    } else {
        m.mesh = generate_rect_layout(build_layout(c), c.geometry.mesh_size);
    }
    for (int k = 0; k < c.geometry.refinements; ++k) {
        m.mesh = refine_uniform(m.mesh);
    }
    m.winding = make_foil_winding(c.winding.turns, c.winding.fill_factor, winding_rect(c), c.winding.alpha_axis);
    m.basis = make_basis(c.winding.splines, m.winding.alpha_min(), m.winding.alpha_max());
    m.materials.nu_air = nu0 / c.materials.mu_r_air;
    if (c.materials.mu_r_yoke) {
        m.materials.nu_yoke = nu0 / *c.materials.mu_r_yoke;
    }
    m.materials.winding = mix(c.materials.foil);
    return m;
}

}  // namespace foilwind
