#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace foilwind {

enum class Region : std::uint8_t { Air, Yoke, FoilWinding };
enum class BoundaryTag : std::uint8_t { FluxWall, Axis };

std::string to_string(Region r);
std::string to_string(BoundaryTag t);

class SymmetryMode {
public:
    enum class Kind { Cartesian2D, Axisymmetric };

    // Cartesian with unit length.
    SymmetryMode() = default;

    // Throws GeometryError unless length_z > 0.
    static SymmetryMode cartesian(double length_z);
    static SymmetryMode axisymmetric();

    Kind kind() const { return kind_; }
    bool is_axisymmetric() const { return kind_ == Kind::Axisymmetric; }
    // Out-of-plane length in meters; zero in axisymmetric mode.
    double length_z() const { return length_z_; }

private:
    SymmetryMode(Kind kind, double length_z) : kind_(kind), length_z_(length_z) {}

    Kind kind_ = Kind::Cartesian2D;
    double length_z_ = 1.0;
};

struct BoundaryEdge {
    std::array<int, 2> nodes;
    BoundaryTag tag;
};

// Linear triangle mesh of a 2D cross section. Coordinates are (x, y) in
// Cartesian mode and (r, z) in axisymmetric mode. Boundary edges without a
// tag carry the natural condition and are not stored.
struct Mesh {
    Eigen::Matrix2Xd nodes;
    Eigen::Matrix3Xi triangles;    // counter-clockwise node indices
    std::vector<Region> regions;   // per triangle
    std::vector<int> groups;       // per triangle: layout rectangle or elementary entity
    std::vector<BoundaryEdge> boundary;

    int num_nodes() const { return static_cast<int>(nodes.cols()); }
    int num_triangles() const { return static_cast<int>(triangles.cols()); }

    Eigen::Vector2d node(int i) const { return nodes.col(i); }
    double signed_area(int t) const;
    Eigen::Vector2d centroid(int t) const;

    // Nodes on a FluxWall or Axis edge, i.e. homogeneous Dirichlet nodes.
    std::vector<bool> dirichlet_mask() const;
};

// Throws GeometryError on non-positive triangle area, unused nodes, or
// negative radii in axisymmetric mode.
void validate(const Mesh& mesh, const SymmetryMode& symmetry);

double total_area(const Mesh& mesh);

struct LayoutRect {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;
    Region region = Region::Air;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

// Corner cut: the right triangle with legs `size` starting at `corner` and
// pointing along (dir_x, 0) and (0, dir_y) is retagged to `region`.
struct Chamfer {
    Eigen::Vector2d corner = Eigen::Vector2d::Zero();
    int dir_x = 1;
    int dir_y = 1;
    double size = 0.0;
    Region region = Region::Yoke;
};

enum class SideCondition { FluxWall, Natural };

// Axis-aligned rectangles tiling the domain. Outer edges on the bounding box
// sides get the side condition; edges of interior holes are flux walls. With
// `axisymmetric` set, edges on x = 0 are tagged as the symmetry axis.
struct RectLayout {
    std::vector<LayoutRect> rects;
    std::vector<Chamfer> chamfers;
    SideCondition left = SideCondition::FluxWall;
    SideCondition right = SideCondition::FluxWall;
    SideCondition bottom = SideCondition::FluxWall;
    SideCondition top = SideCondition::FluxWall;
    bool axisymmetric = false;
};

double layout_area(const RectLayout& layout);

// Structured, conforming quad-split triangulation on the tensor grid spanned
// by all rectangle edges, each interval divided into ceil(length / target_h)
// equal cells. Throws GeometryError for overlapping rectangles and
// ResolutionError when target_h exceeds the smallest rectangle dimension.
Mesh generate_rect_layout(const RectLayout& layout, double target_h);

// Splits every triangle into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

// Winding d x h centered at the origin inside a box with the given margin.
RectLayout cartesian_winding_layout(double thickness, double height, double margin);

struct PotCoreGeometry {
    double yoke_width = 0.040;      // outer radius
    double yoke_height = 0.080;
    double yoke_thickness = 0.010;  // center limb radius and wall/plate thickness
    double air_gap = 0.004;         // in the center limb, centered at z = 0
    double corner_radius = 0.002;   // window corners, realized as chamfers
    double winding_thickness = 0.014;
    double winding_height = 0.050;
    double radial_offset = 0.0;     // winding center offset from the window center
};

RectLayout pot_inductor_layout(const PotCoreGeometry& g);
LayoutRect pot_winding_rect(const PotCoreGeometry& g);

// Winding spanning the full height of an ideal-yoke window (natural condition
// top and bottom), with air gaps of width `gap` to flux walls left and right.
RectLayout window_winding_layout(double thickness, double height, double gap);

// Maps MSH physical group names to tags. A boundary name mapped to nullopt
// marks a natural boundary.
struct PhysicalMap {
    std::map<std::string, Region> regions;
    std::map<std::string, std::optional<BoundaryTag>> boundaries;
};

// Names written by write_msh: air, yoke, foil_winding, flux_wall, axis.
PhysicalMap default_physical_map();

// ASCII MSH 2.2 reader. Point elements are skipped; any other element type
// besides 2-node lines and 3-node triangles raises FormatError.
Mesh read_msh(std::istream& in, const PhysicalMap& map);
Mesh read_msh(std::string_view text, const PhysicalMap& map);

void write_msh(std::ostream& out, const Mesh& mesh);

}  // namespace foilwind
