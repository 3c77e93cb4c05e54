#include "foilwind/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "foilwind/errors.hpp"

namespace foilwind {

std::string to_string(Region r) {
    switch (r) {
        case Region::Air: return "air";
        case Region::Yoke: return "yoke";
        case Region::FoilWinding: return "foil_winding";
    }
    return "unknown";
}

std::string to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::FluxWall: return "flux_wall";
        case BoundaryTag::Axis: return "axis";
    }
    return "unknown";
}

SymmetryMode SymmetryMode::cartesian(double length_z) {
    if (!(length_z > 0.0)) {
        throw GeometryError("Cartesian length l_z must be positive");
    }
    return SymmetryMode(Kind::Cartesian2D, length_z);
}

SymmetryMode SymmetryMode::axisymmetric() { return SymmetryMode(Kind::Axisymmetric, 0.0); }

double Mesh::signed_area(int t) const {
    const Eigen::Vector2d a = nodes.col(triangles(0, t));
    const Eigen::Vector2d b = nodes.col(triangles(1, t));
    const Eigen::Vector2d c = nodes.col(triangles(2, t));
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Eigen::Vector2d Mesh::centroid(int t) const {
    return (nodes.col(triangles(0, t)) + nodes.col(triangles(1, t)) + nodes.col(triangles(2, t))) /
           3.0;
}

std::vector<bool> Mesh::dirichlet_mask() const {
    std::vector<bool> mask(static_cast<std::size_t>(num_nodes()), false);
    for (const auto& e : boundary) {
        mask[static_cast<std::size_t>(e.nodes[0])] = true;
        mask[static_cast<std::size_t>(e.nodes[1])] = true;
    }
    return mask;
}

void validate(const Mesh& mesh, const SymmetryMode& symmetry) {
    std::vector<bool> used(static_cast<std::size_t>(mesh.num_nodes()), false);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (!(mesh.signed_area(t) > 0.0)) {
            throw GeometryError("triangle " + std::to_string(t) + " has non-positive area");
        }
        for (int k = 0; k < 3; ++k) {
            used[static_cast<std::size_t>(mesh.triangles(k, t))] = true;
        }
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw GeometryError("mesh has nodes that belong to no triangle");
    }
    if (symmetry.is_axisymmetric() && mesh.num_nodes() > 0 && mesh.nodes.row(0).minCoeff() < 0.0) {
        throw GeometryError("axisymmetric mesh has nodes with negative radius");
    }
}

double total_area(const Mesh& mesh) {
    double area = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        area += mesh.signed_area(t);
    }
    return area;
}

double layout_area(const RectLayout& layout) {
    double area = 0.0;
    for (const auto& r : layout.rects) {
        area += r.width() * r.height();
    }
    return area;
}

namespace {

using EdgeKey = std::pair<int, int>;

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const {
        return std::hash<long long>()((static_cast<long long>(k.first) << 32) ^
                                      static_cast<long long>(k.second));
    }
};

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Sorted, de-duplicated breakpoints.
std::vector<double> unique_sorted(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (out.empty() || x - out.back() > tol) {
            out.push_back(x);
        }
    }
    return out;
}

std::vector<double> subdivide(const std::vector<double>& breaks, double h) {
    std::vector<double> coords;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k];
        const double b = breaks[k + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
        for (int i = 0; i < n; ++i) {
            coords.push_back(i == 0 ? a : a + (b - a) * static_cast<double>(i) / n);
        }
    }
    coords.push_back(breaks.back());
    return coords;
}

bool on_chamfer_line(const Chamfer& c, const Eigen::Vector2d& p, double tol) {
    const double u = c.dir_x * (p.x() - c.corner.x());
    const double v = c.dir_y * (p.y() - c.corner.y());
    return u >= -tol && v >= -tol && std::abs(u + v - c.size) <= tol;
}

bool inside_chamfer(const Chamfer& c, const Eigen::Vector2d& p) {
    const double u = c.dir_x * (p.x() - c.corner.x());
    const double v = c.dir_y * (p.y() - c.corner.y());
    return u > 0.0 && v > 0.0 && u + v < c.size;
}

// Collects edges used by exactly one triangle, in triangle order.
std::vector<std::array<int, 2>> outer_edges(const Eigen::Matrix3Xi& tris) {
    std::unordered_map<EdgeKey, int, EdgeKeyHash> count;
    count.reserve(static_cast<std::size_t>(tris.cols()) * 3);
    for (int t = 0; t < tris.cols(); ++t) {
        for (int k = 0; k < 3; ++k) {
            ++count[edge_key(tris(k, t), tris((k + 1) % 3, t))];
        }
    }
    std::vector<std::array<int, 2>> edges;
    for (int t = 0; t < tris.cols(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const int a = tris(k, t);
            const int b = tris((k + 1) % 3, t);
            if (count[edge_key(a, b)] == 1) {
                edges.push_back({a, b});
            }
        }
    }
    return edges;
}

}  // namespace

Mesh generate_rect_layout(const RectLayout& layout, double target_h) {
    if (layout.rects.empty()) {
        throw GeometryError("layout has no rectangles");
    }
    if (!(target_h > 0.0)) {
        throw ResolutionError("target mesh size must be positive");
    }

    double xmin = std::numeric_limits<double>::max();
    double xmax = std::numeric_limits<double>::lowest();
    double ymin = xmin;
    double ymax = xmax;
    double smallest = std::numeric_limits<double>::max();
    for (const auto& r : layout.rects) {
        if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) {
            throw GeometryError("layout rectangle with non-positive extent");
        }
        xmin = std::min(xmin, r.x0);
        xmax = std::max(xmax, r.x1);
        ymin = std::min(ymin, r.y0);
        ymax = std::max(ymax, r.y1);
        smallest = std::min({smallest, r.width(), r.height()});
    }
    const double extent = std::max(xmax - xmin, ymax - ymin);
    const double tol = 1e-12 * extent;

    for (std::size_t i = 0; i < layout.rects.size(); ++i) {
        for (std::size_t j = i + 1; j < layout.rects.size(); ++j) {
            const auto& a = layout.rects[i];
            const auto& b = layout.rects[j];
            const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
            const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
            if (w > tol && h > tol) {
                throw GeometryError("layout rectangles " + std::to_string(i) + " and " +
                                    std::to_string(j) + " overlap");
            }
        }
    }
    if (target_h > smallest * (1.0 + 1e-12)) {
        throw ResolutionError("target mesh size exceeds the smallest rectangle dimension");
    }
    if (layout.axisymmetric && xmin < -tol) {
        throw GeometryError("axisymmetric layout extends to negative radius");
    }

    std::vector<double> xb;
    std::vector<double> yb;
    for (const auto& r : layout.rects) {
        xb.insert(xb.end(), {r.x0, r.x1});
        yb.insert(yb.end(), {r.y0, r.y1});
    }
    for (const auto& c : layout.chamfers) {
        if (!(c.size > 0.0) || std::abs(c.dir_x) != 1 || std::abs(c.dir_y) != 1) {
            throw GeometryError("invalid chamfer");
        }
        xb.insert(xb.end(), {c.corner.x(), c.corner.x() + c.dir_x * c.size});
        yb.insert(yb.end(), {c.corner.y(), c.corner.y() + c.dir_y * c.size});
    }
    const std::vector<double> xs = subdivide(unique_sorted(xb, tol), target_h);
    const std::vector<double> ys = subdivide(unique_sorted(yb, tol), target_h);
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());

    std::vector<int> node_id(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), -1);
    std::vector<Eigen::Vector2d> coords;
    std::vector<std::array<int, 3>> tris;
    std::vector<Region> regions;
    std::vector<int> groups;

    auto node = [&](int i, int j) {
        int& id = node_id[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                          static_cast<std::size_t>(i)];
        if (id < 0) {
            id = static_cast<int>(coords.size());
            coords.emplace_back(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]);
        }
        return id;
    };

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const Eigen::Vector2d p00(xs[i], ys[j]);
            const Eigen::Vector2d p10(xs[i + 1], ys[j]);
            const Eigen::Vector2d p11(xs[i + 1], ys[j + 1]);
            const Eigen::Vector2d p01(xs[i], ys[j + 1]);
            const Eigen::Vector2d center = 0.25 * (p00 + p10 + p11 + p01);

            int owner = -1;
            for (std::size_t r = 0; r < layout.rects.size(); ++r) {
                const auto& rect = layout.rects[r];
                if (center.x() > rect.x0 && center.x() < rect.x1 && center.y() > rect.y0 &&
                    center.y() < rect.y1) {
                    owner = static_cast<int>(r);
                    break;
                }
            }
            if (owner < 0) {
                continue;
            }

            bool back_diagonal = false;
            for (const auto& c : layout.chamfers) {
                if (on_chamfer_line(c, p10, tol) && on_chamfer_line(c, p01, tol)) {
                    back_diagonal = true;
                }
            }

            const int n00 = node(i, j);
            const int n10 = node(i + 1, j);
            const int n11 = node(i + 1, j + 1);
            const int n01 = node(i, j + 1);
            const Region region = layout.rects[static_cast<std::size_t>(owner)].region;
            if (back_diagonal) {
                tris.push_back({n00, n10, n01});
                tris.push_back({n10, n11, n01});
            } else {
                tris.push_back({n00, n10, n11});
                tris.push_back({n00, n11, n01});
            }
            regions.insert(regions.end(), 2, region);
            groups.insert(groups.end(), 2, owner);
        }
    }

    Mesh mesh;
    mesh.nodes.resize(2, static_cast<Eigen::Index>(coords.size()));
    for (std::size_t k = 0; k < coords.size(); ++k) {
        mesh.nodes.col(static_cast<Eigen::Index>(k)) = coords[k];
    }
    mesh.triangles.resize(3, static_cast<Eigen::Index>(tris.size()));
    for (std::size_t t = 0; t < tris.size(); ++t) {
        for (int k = 0; k < 3; ++k) {
            mesh.triangles(k, static_cast<Eigen::Index>(t)) = tris[t][static_cast<std::size_t>(k)];
        }
    }
    mesh.regions = std::move(regions);
    mesh.groups = std::move(groups);

    for (const auto& c : layout.chamfers) {
        double retagged = 0.0;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            if (inside_chamfer(c, mesh.centroid(t))) {
                mesh.regions[static_cast<std::size_t>(t)] = c.region;
                retagged += mesh.signed_area(t);
            }
        }
        if (std::abs(retagged - 0.5 * c.size * c.size) > 1e-9 * c.size * c.size) {
            throw ResolutionError("chamfer is not resolved by the grid");
        }
    }

    for (const auto& e : outer_edges(mesh.triangles)) {
        const Eigen::Vector2d a = mesh.node(e[0]);
        const Eigen::Vector2d b = mesh.node(e[1]);
        auto both = [&](auto pred) { return pred(a) && pred(b); };
        std::optional<BoundaryTag> tag = BoundaryTag::FluxWall;
        if (layout.axisymmetric && both([&](const auto& p) { return std::abs(p.x()) <= tol; })) {
            tag = BoundaryTag::Axis;
        } else if (both([&](const auto& p) { return std::abs(p.x() - xmin) <= tol; })) {
            if (layout.left == SideCondition::Natural) tag.reset();
        } else if (both([&](const auto& p) { return std::abs(p.x() - xmax) <= tol; })) {
            if (layout.right == SideCondition::Natural) tag.reset();
        } else if (both([&](const auto& p) { return std::abs(p.y() - ymin) <= tol; })) {
            if (layout.bottom == SideCondition::Natural) tag.reset();
        } else if (both([&](const auto& p) { return std::abs(p.y() - ymax) <= tol; })) {
            if (layout.top == SideCondition::Natural) tag.reset();
        }
        if (tag) {
            mesh.boundary.push_back({e, *tag});
        }
    }
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
    std::unordered_map<EdgeKey, int, EdgeKeyHash> midpoint;
    std::vector<Eigen::Vector2d> coords;
    coords.reserve(static_cast<std::size_t>(mesh.num_nodes()) * 4);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        coords.push_back(mesh.node(i));
    }
    auto mid = [&](int a, int b) {
        auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), static_cast<int>(coords.size()));
        if (inserted) {
            coords.push_back(0.5 * (mesh.node(a) + mesh.node(b)));
        }
        return it->second;
    };

    Mesh out;
    out.triangles.resize(3, 4 * mesh.num_triangles());
    out.regions.reserve(static_cast<std::size_t>(4 * mesh.num_triangles()));
    out.groups.reserve(static_cast<std::size_t>(4 * mesh.num_triangles()));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const int a = mesh.triangles(0, t);
        const int b = mesh.triangles(1, t);
        const int c = mesh.triangles(2, t);
        const int ab = mid(a, b);
        const int bc = mid(b, c);
        const int ca = mid(c, a);
        out.triangles.col(4 * t + 0) << a, ab, ca;
        out.triangles.col(4 * t + 1) << ab, b, bc;
        out.triangles.col(4 * t + 2) << ca, bc, c;
        out.triangles.col(4 * t + 3) << ab, bc, ca;
        out.regions.insert(out.regions.end(), 4, mesh.regions[static_cast<std::size_t>(t)]);
        out.groups.insert(out.groups.end(), 4, mesh.groups[static_cast<std::size_t>(t)]);
    }
    for (const auto& e : mesh.boundary) {
        const int m = mid(e.nodes[0], e.nodes[1]);
        out.boundary.push_back({{e.nodes[0], m}, e.tag});
        out.boundary.push_back({{m, e.nodes[1]}, e.tag});
    }
    out.nodes.resize(2, static_cast<Eigen::Index>(coords.size()));
    for (std::size_t k = 0; k < coords.size(); ++k) {
        out.nodes.col(static_cast<Eigen::Index>(k)) = coords[k];
    }
    return out;
}

RectLayout cartesian_winding_layout(double thickness, double height, double margin) {
    const double xa = 0.5 * thickness;
    const double ya = 0.5 * height;
    const double xb = xa + margin;
    const double yb = ya + margin;
    RectLayout layout;
    layout.rects = {
        {-xb, -xa, -yb, yb, Region::Air},
        {xa, xb, -yb, yb, Region::Air},
        {-xa, xa, -yb, -ya, Region::Air},
        {-xa, xa, ya, yb, Region::Air},
        {-xa, xa, -ya, ya, Region::FoilWinding},
    };
    return layout;
}

LayoutRect pot_winding_rect(const PotCoreGeometry& g) {
    const double r_center = 0.5 * g.yoke_width + g.radial_offset;
    return {r_center - 0.5 * g.winding_thickness, r_center + 0.5 * g.winding_thickness,
            -0.5 * g.winding_height, 0.5 * g.winding_height, Region::FoilWinding};
}

RectLayout pot_inductor_layout(const PotCoreGeometry& g) {
    const double R = g.yoke_width;
    const double Z = 0.5 * g.yoke_height;
    const double t = g.yoke_thickness;
    const double zg = 0.5 * g.air_gap;
    const double zw = Z - t;  // window half height
    const LayoutRect w = pot_winding_rect(g);
    if (!(w.x0 > t && w.x1 < R - t && w.y1 < zw)) {
        throw GeometryError("winding does not fit into the pot core window");
    }

    RectLayout layout;
    layout.axisymmetric = true;
    layout.rects = {
        // center limb with air gap
        {0.0, t, -Z, -zg, Region::Yoke},
        {0.0, t, -zg, zg, Region::Air},
        {0.0, t, zg, Z, Region::Yoke},
        // plates and outer wall
        {t, R, -Z, -zw, Region::Yoke},
        {t, R, zw, Z, Region::Yoke},
        {R - t, R, -zw, zw, Region::Yoke},
        // window
        {t, w.x0, -zw, zw, Region::Air},
        {w.x1, R - t, -zw, zw, Region::Air},
        {w.x0, w.x1, -zw, w.y0, Region::Air},
        {w.x0, w.x1, w.y1, zw, Region::Air},
        w,
    };
    if (g.corner_radius > 0.0) {
        layout.chamfers = {
            {Eigen::Vector2d(t, -zw), 1, 1, g.corner_radius, Region::Yoke},
            {Eigen::Vector2d(R - t, -zw), -1, 1, g.corner_radius, Region::Yoke},
            {Eigen::Vector2d(t, zw), 1, -1, g.corner_radius, Region::Yoke},
            {Eigen::Vector2d(R - t, zw), -1, -1, g.corner_radius, Region::Yoke},
        };
    }
    return layout;
}

RectLayout window_winding_layout(double thickness, double height, double gap) {
    const double xa = 0.5 * thickness;
    const double ya = 0.5 * height;
    RectLayout layout;
    layout.rects = {
        {-xa - gap, -xa, -ya, ya, Region::Air},
        {-xa, xa, -ya, ya, Region::FoilWinding},
        {xa, xa + gap, -ya, ya, Region::Air},
    };
    layout.bottom = SideCondition::Natural;
    layout.top = SideCondition::Natural;
    return layout;
}

PhysicalMap default_physical_map() {
    PhysicalMap map;
    map.regions = {{"air", Region::Air}, {"yoke", Region::Yoke}, {"foil_winding", Region::FoilWinding}};
    map.boundaries = {{"flux_wall", BoundaryTag::FluxWall}, {"axis", BoundaryTag::Axis}};
    return map;
}

namespace {

constexpr int region_physical_id(Region r) { return 1 + static_cast<int>(r); }
constexpr int boundary_physical_id(BoundaryTag t) { return 11 + static_cast<int>(t); }

bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (!line.empty()) {
            return true;
        }
    }
    return false;
}

void expect_end(std::istream& in, const std::string& section) {
    std::string line;
    if (!next_content_line(in, line) || line != "$End" + section) {
        throw FormatError("missing $End" + section);
    }
}

}  // namespace

Mesh read_msh(std::istream& in, const PhysicalMap& map) {
    std::map<int, std::string> physical_names;
    std::vector<Eigen::Vector2d> coords;
    std::unordered_map<long long, int> node_index;
    struct RawTriangle {
        std::array<int, 3> nodes;
        std::string physical;
        int entity;
    };
    struct RawLine {
        std::array<int, 2> nodes;
        std::string physical;
    };
    std::vector<RawTriangle> raw_tris;
    std::vector<RawLine> raw_lines;
    bool have_format = false;
    bool have_nodes = false;
    bool have_elements = false;

    auto name_of = [&](int id) {
        auto it = physical_names.find(id);
        return it != physical_names.end() ? it->second : std::to_string(id);
    };

    std::string line;
    while (next_content_line(in, line)) {
        if (line == "$MeshFormat") {
            if (!next_content_line(in, line)) throw FormatError("truncated $MeshFormat");
            std::istringstream iss(line);
            double version = 0.0;
            int file_type = -1;
            iss >> version >> file_type;
            if (!iss || version < 2.0 || version >= 3.0) {
                throw FormatError("only MSH version 2.x is supported");
            }
            if (file_type != 0) {
                throw FormatError("only ASCII MSH files are supported");
            }
            expect_end(in, "MeshFormat");
            have_format = true;
        } else if (line == "$PhysicalNames") {
            if (!next_content_line(in, line)) throw FormatError("truncated $PhysicalNames");
            const int count = std::stoi(line);
            for (int k = 0; k < count; ++k) {
                if (!next_content_line(in, line)) throw FormatError("truncated $PhysicalNames");
                std::istringstream iss(line);
                int dim = 0;
                int id = 0;
                iss >> dim >> id;
                if (!iss) throw FormatError("bad $PhysicalNames entry: " + line);
                std::string rest;
                std::getline(iss, rest);
                const auto q0 = rest.find('"');
                const auto q1 = rest.rfind('"');
                if (q0 == std::string::npos || q1 == q0) throw FormatError("unquoted physical name");
                physical_names[id] = rest.substr(q0 + 1, q1 - q0 - 1);
            }
            expect_end(in, "PhysicalNames");
        } else if (line == "$Nodes") {
            if (!next_content_line(in, line)) throw FormatError("truncated $Nodes");
            const long count = std::stol(line);
            coords.reserve(static_cast<std::size_t>(count));
            for (long k = 0; k < count; ++k) {
                if (!next_content_line(in, line)) throw FormatError("truncated $Nodes");
                std::istringstream iss(line);
                long long id = 0;
                double x = 0.0;
                double y = 0.0;
                double z = 0.0;
                iss >> id >> x >> y >> z;
                if (!iss) throw FormatError("bad node line: " + line);
                node_index[id] = static_cast<int>(coords.size());
                coords.emplace_back(x, y);
            }
            expect_end(in, "Nodes");
            have_nodes = true;
        } else if (line == "$Elements") {
            if (!next_content_line(in, line)) throw FormatError("truncated $Elements");
            const long count = std::stol(line);
            for (long k = 0; k < count; ++k) {
                if (!next_content_line(in, line)) throw FormatError("truncated $Elements");
                std::istringstream iss(line);
                long long id = 0;
                int type = 0;
                int ntags = 0;
                iss >> id >> type >> ntags;
                std::vector<int> tags(static_cast<std::size_t>(std::max(ntags, 0)));
                for (auto& tag : tags) iss >> tag;
                if (!iss) throw FormatError("bad element line: " + line);
                const int physical = tags.empty() ? 0 : tags[0];
                const int entity = tags.size() > 1 ? tags[1] : 0;
                auto read_nodes = [&](auto& arr) {
                    for (auto& n : arr) {
                        long long nid = 0;
                        iss >> nid;
                        auto it = node_index.find(nid);
                        if (!iss || it == node_index.end()) {
                            throw FormatError("element references unknown node: " + line);
                        }
                        n = it->second;
                    }
                };
                if (type == 2) {
                    RawTriangle t{{}, name_of(physical), entity};
                    read_nodes(t.nodes);
                    raw_tris.push_back(t);
                } else if (type == 1) {
                    RawLine l{{}, name_of(physical)};
                    read_nodes(l.nodes);
                    raw_lines.push_back(l);
                } else if (type != 15) {
                    throw FormatError("unsupported element type " + std::to_string(type));
                }
            }
            expect_end(in, "Elements");
            have_elements = true;
        } else if (line.size() > 1 && line[0] == '$' && line.rfind("$End", 0) != 0) {
            const std::string section = line.substr(1);
            while (next_content_line(in, line) && line != "$End" + section) {
            }
        }
    }
    if (!have_format || !have_nodes || !have_elements) {
        throw FormatError("MSH input lacks $MeshFormat, $Nodes or $Elements");
    }
    if (raw_tris.empty()) {
        throw FormatError("MSH input contains no triangles");
    }

    // Keep nodes that belong to a triangle, preserving file order.
    std::vector<int> used(coords.size(), 0);
    for (const auto& t : raw_tris) {
        for (int n : t.nodes) used[static_cast<std::size_t>(n)] = 1;
    }
    std::vector<int> renumber(coords.size(), -1);
    int next = 0;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (used[k]) renumber[k] = next++;
    }

    Mesh mesh;
    mesh.nodes.resize(2, next);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (renumber[k] >= 0) mesh.nodes.col(renumber[k]) = coords[k];
    }
    mesh.triangles.resize(3, static_cast<Eigen::Index>(raw_tris.size()));
    for (std::size_t t = 0; t < raw_tris.size(); ++t) {
        const auto& rt = raw_tris[t];
        auto it = map.regions.find(rt.physical);
        if (it == map.regions.end()) {
            throw TaggingError("no region mapping for physical group '" + rt.physical + "'");
        }
        const auto col = static_cast<Eigen::Index>(t);
        for (int k = 0; k < 3; ++k) {
            mesh.triangles(k, col) = renumber[static_cast<std::size_t>(rt.nodes[static_cast<std::size_t>(k)])];
        }
        const double area = mesh.signed_area(static_cast<int>(t));
        if (area == 0.0) {
            throw FormatError("degenerate triangle in MSH input");
        }
        if (area < 0.0) {
            std::swap(mesh.triangles(1, col), mesh.triangles(2, col));
        }
        mesh.regions.push_back(it->second);
        mesh.groups.push_back(rt.entity);
    }
    for (const auto& rl : raw_lines) {
        auto it = map.boundaries.find(rl.physical);
        if (it == map.boundaries.end()) {
            throw TaggingError("no boundary mapping for physical group '" + rl.physical + "'");
        }
        const int a = renumber[static_cast<std::size_t>(rl.nodes[0])];
        const int b = renumber[static_cast<std::size_t>(rl.nodes[1])];
        if (a < 0 || b < 0) {
            throw FormatError("boundary line references a node outside all triangles");
        }
        if (it->second) {
            mesh.boundary.push_back({{a, b}, *it->second});
        }
    }
    return mesh;
}

Mesh read_msh(std::string_view text, const PhysicalMap& map) {
    std::istringstream in{std::string(text)};
    return read_msh(in, map);
}

void write_msh(std::ostream& out, const Mesh& mesh) {
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$PhysicalNames\n5\n";
    for (auto t : {BoundaryTag::FluxWall, BoundaryTag::Axis}) {
        out << "1 " << boundary_physical_id(t) << " \"" << to_string(t) << "\"\n";
    }
    for (auto r : {Region::Air, Region::Yoke, Region::FoilWinding}) {
        out << "2 " << region_physical_id(r) << " \"" << to_string(r) << "\"\n";
    }
    out << "$EndPhysicalNames\n";

    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "$Nodes\n" << mesh.num_nodes() << "\n";
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        out << i + 1 << ' ' << mesh.nodes(0, i) << ' ' << mesh.nodes(1, i) << " 0\n";
    }
    out << "$EndNodes\n";
    out.precision(old_precision);

    out << "$Elements\n" << mesh.boundary.size() + static_cast<std::size_t>(mesh.num_triangles())
        << "\n";
    long id = 1;
    for (const auto& e : mesh.boundary) {
        out << id++ << " 1 2 " << boundary_physical_id(e.tag) << " 0 " << e.nodes[0] + 1 << ' '
            << e.nodes[1] + 1 << "\n";
    }
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        out << id++ << " 2 2 " << region_physical_id(mesh.regions[static_cast<std::size_t>(t)]) << ' '
            << mesh.groups[static_cast<std::size_t>(t)] << ' ' << mesh.triangles(0, t) + 1 << ' '
            << mesh.triangles(1, t) + 1 << ' ' << mesh.triangles(2, t) + 1 << "\n";
    }
    out << "$EndElements\n";
    if (!out) {
        throw IoError("failed to write MSH output");
    }
}

}  // namespace foilwind
