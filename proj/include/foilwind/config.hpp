#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "foilwind/assembly.hpp"
#include "foilwind/homogenization.hpp"
#include "foilwind/mesh.hpp"
#include "foilwind/solver.hpp"

namespace foilwind {

enum class LayoutKind { Box, PotCore, Window, Rects, Msh };

std::string to_string(LayoutKind k);

struct GeometryConfig {
    SymmetryMode symmetry;
    LayoutKind layout = LayoutKind::Box;
    double mesh_size = 0.0;
    int refinements = 0;
    double margin = 0.01;                // box
    double gap = 0.0;                    // window
    PotCoreGeometry pot;                 // pot_core (winding size comes from the winding section)
    RectLayout rects;                    // rects
    std::string msh_file;                // msh, relative paths resolved against the config file
    PhysicalMap physical = default_physical_map();
};

struct WindingConfig {
    int turns = 0;
    double fill_factor = 0.0;
    double thickness = 0.0;
    double height = 0.0;
    std::optional<LayoutRect> rect;      // explicit placement, required for msh layouts
    int alpha_axis = 0;
    int splines = 7;
};

struct MaterialsConfig {
    FoilMaterials foil;
    double mu_r_air = 1.0;
    std::optional<double> mu_r_yoke;
};

struct SweepConfig {
    double f_min = 1e-2;
    double f_max = 1e6;
    int points = 50;
    bool logarithmic = true;
};

struct OutputConfig {
    std::string directory = "output";
    int profile_samples = 100;
    int contour_levels = 20;
};

struct OracleConfig {
    std::optional<double> mesh_size;     // resolved-turn mesh, defaults to the geometry mesh size
    long max_elements = 2000000;
};

struct Config {
    std::string source_path;
    std::string source_text;
    GeometryConfig geometry;
    WindingConfig winding;
    MaterialsConfig materials;
    Drive drive;
    SweepConfig sweep;
    std::vector<ModelKind> models;
    OutputConfig output;
    OracleConfig oracle;

    std::vector<double> frequencies() const;
};

// YAML parsing. Diagnostics carry "path:line:column:" of the offending node,
// or of the enclosing section for missing keys; all problems raise ConfigError.
Config parse_config(const std::string& text, const std::string& path = "<config>");
Config load_config(const std::string& path);

// Layout of the geometry section, with the winding rectangle in place.
RectLayout build_layout(const Config& c);

// Winding rectangle: the FoilWinding rectangle of generated layouts, or the
// explicit winding.rect for MSH meshes.
LayoutRect winding_rect(const Config& c);

// Mesh, winding, spline basis and materials. ConfigError, GeometryError,
// ResolutionError, FormatError or TaggingError on bad input.
FoilModel build_model(const Config& c);

}  // namespace foilwind
