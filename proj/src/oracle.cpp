#include "foilwind/oracle.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "foilwind/constants.hpp"
#include "foilwind/errors.hpp"

namespace foilwind {

std::vector<double> turn_positions(const FoilWinding& w) {
    std::vector<double> r(static_cast<std::size_t>(w.turns));
    for (int k = 0; k < w.turns; ++k) {
        r[static_cast<std::size_t>(k)] = w.axis_coordinate(w.alpha_min() + (k + 0.5) * w.foil_thickness());
    }
    return r;
}

Eigen::VectorXd turn_resistances(const FoilWinding& w, double sigma_c, const SymmetryMode& symmetry) {
    const double section = sigma_c * w.conductor_thickness() * w.height();
    Eigen::VectorXd R(w.turns);
    const std::vector<double> r = turn_positions(w);
    for (int k = 0; k < w.turns; ++k) {
        const double length = symmetry.is_axisymmetric() ? 2.0 * pi * r[static_cast<std::size_t>(k)]
                                                         : symmetry.length_z();
        R(k) = length / section;
    }
    return R;
}

double dc_resistance(const FoilWinding& w, double sigma_c, const SymmetryMode& symmetry) {
    return turn_resistances(w, sigma_c, symmetry).sum();
}

Eigen::VectorXd interturn_capacitances(const FoilWinding& w, double eps_i, const SymmetryMode& symmetry) {
    Eigen::VectorXd C(w.turns - 1);
    for (int k = 0; k + 1 < w.turns; ++k) {
        const double gap = w.axis_coordinate(w.alpha_min() + (k + 1) * w.foil_thickness());
        const double length = symmetry.is_axisymmetric() ? 2.0 * pi * gap : symmetry.length_z();
        C(k) = eps_i * w.height() * length / w.insulation_thickness();
    }
    return C;
}

ResolvedTurns resolve_turns(const RectLayout& layout, const FoilWinding& w) {
    ResolvedTurns out;
    out.layout = layout;
    out.layout.rects.clear();
    int found = 0;
    const double tol = 1e-12;
    for (const LayoutRect& r : layout.rects) {
        const bool same = std::abs(r.x0 - w.rect.x0) < tol && std::abs(r.x1 - w.rect.x1) < tol &&
                          std::abs(r.y0 - w.rect.y0) < tol && std::abs(r.y1 - w.rect.y1) < tol;
        if (same) {
            ++found;
        } else {
            out.layout.rects.push_back(r);
        }
    }
    if (found != 1) {
        throw GeometryError("layout must contain the winding rectangle exactly once");
    }
    const int ax = w.alpha_axis;
    const double di = w.insulation_thickness();
    const double dc = w.conductor_thickness();
    auto strip = [&](double a0, double a1) {
        LayoutRect r = w.rect;
        r.region = Region::Air;
        const double c0 = w.axis_coordinate(a0);
        const double c1 = w.axis_coordinate(a1);
        if (ax == 0) {
            r.x0 = c0;
            r.x1 = c1;
        } else {
            r.y0 = c0;
            r.y1 = c1;
        }
        out.layout.rects.push_back(r);
        return static_cast<int>(out.layout.rects.size()) - 1;
    };
    double a = w.alpha_min();
    for (int k = 0; k < w.turns; ++k) {
        const double insulation = k == 0 ? 0.5 * di : di;
        strip(a, a + insulation);
        a += insulation;
        out.turn_rects.push_back(strip(a, a + dc));
        a += dc;
    }
    strip(a, w.alpha_max());
    return out;
}

Eigen::MatrixXd magnetostatic_inductances(const Mesh& mesh, const std::vector<int>& turn_groups,
                                          const RegionMaterials& materials,
                                          const SymmetryMode& symmetry) {
    const std::set<int> unique(turn_groups.begin(), turn_groups.end());
    if (unique.size() != turn_groups.size()) {
        throw GeometryError("turn regions overlap: a mesh group is used by two turns");
    }
    const int n = static_cast<int>(turn_groups.size());
    const FieldMatrices field = assemble_field(mesh, materials, symmetry);
    const double scale = symmetry.is_axisymmetric() ? 2.0 * pi : symmetry.length_z();

    // uniform unit current density per turn
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(mesh.num_nodes(), n);
    for (int k = 0; k < n; ++k) {
        double area = 0.0;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            if (mesh.groups[static_cast<std::size_t>(t)] == turn_groups[static_cast<std::size_t>(k)]) {
                area += mesh.signed_area(t);
            }
        }
        if (!(area > 0.0)) {
            throw GeometryError("turn " + std::to_string(k) + " has no triangles");
        }
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            if (mesh.groups[static_cast<std::size_t>(t)] == turn_groups[static_cast<std::size_t>(k)]) {
                for (int a = 0; a < 3; ++a) {
                    J(mesh.triangles(a, t), k) += scale * mesh.signed_area(t) / (3.0 * area);
                }
            }
        }
    }

    const std::vector<bool> fixed = mesh.dirichlet_mask();
    std::vector<int> index(fixed.size(), -1);
    int nf = 0;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (!fixed[i]) index[i] = nf++;
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (int k = 0; k < field.K.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(field.K, k); it; ++it) {
            const int i = index[static_cast<std::size_t>(it.row())];
            const int j = index[static_cast<std::size_t>(it.col())];
            if (i >= 0 && j >= 0) entries.emplace_back(i, j, it.value());
        }
    }
    SparseMatrix K(nf, nf);
    K.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("magnetostatic stiffness matrix is singular");
    }
    Eigen::MatrixXd Jr = Eigen::MatrixXd::Zero(nf, n);
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= 0) Jr.row(index[i]) = J.row(static_cast<Eigen::Index>(i));
    }
    const Eigen::MatrixXd A = ldlt.solve(Jr);
    return Jr.transpose() * A;
}

ResolvedLadder resolved_ladder(const RectLayout& layout, const FoilWinding& w, const FoilMaterials& foil,
                               const RegionMaterials& materials, const SymmetryMode& symmetry,
                               double mesh_size) {
    const ResolvedTurns rt = resolve_turns(layout, w);
    const Mesh mesh = generate_rect_layout(rt.layout, mesh_size);
    RegionMaterials mats = materials;
    mats.winding.reset();
    ResolvedLadder out;
    out.net.R = turn_resistances(w, foil.sigma_c, symmetry);
    out.net.C = interturn_capacitances(w, foil.eps_i, symmetry);
    out.net.L = magnetostatic_inductances(mesh, rt.turn_rects, mats, symmetry);
    out.triangles = mesh.num_triangles();
    return out;
}

void validate(const LadderNetwork& net) {
    const int n = net.turns();
    if (n < 1) {
        throw ConfigError("ladder network needs at least one turn");
    }
    if ((net.R.array() <= 0.0).any()) {
        throw ConfigError("ladder resistances must be positive");
    }
    if (net.C.size() != n - 1 || (net.C.array() <= 0.0).any()) {
        throw ConfigError("ladder needs N - 1 positive capacitances");
    }
    if (net.L.rows() != n || net.L.cols() != n) {
        throw ConfigError("ladder inductance matrix must be N x N");
    }
    const double scale = net.L.cwiseAbs().maxCoeff();
    if ((net.L - net.L.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw ConfigError("ladder inductance matrix must be symmetric");
    }
}

std::complex<double> ladder_impedance(const LadderNetwork& net, double omega) {
    validate(net);
    using complex = std::complex<double>;
    const int n = net.turns();
    const complex jw(0.0, omega);
    // unknowns: node voltages V_0..V_{N-1} (V_N = 0), branch currents i_0..i_{N-1}
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(2 * n);

    for (int k = 0; k < n; ++k) {
        A(k, n + k) += 1.0;                   // leaves node k
        if (k + 1 < n) A(k + 1, n + k) -= 1.0;  // enters node k + 1
    }
    for (int k = 0; k + 1 < n; ++k) {
        // mean potential difference (V_k - V_{k+2}) / 2
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
        e(k) = 0.5;
        if (k + 2 < n) e(k + 2) = -0.5;
        A.topLeftCorner(n, n) += jw * net.C(k) * e * e.transpose();
    }
    for (int k = 0; k < n; ++k) {
        const int row = n + k;
        A(row, k) += 1.0;
        if (k + 1 < n) A(row, k + 1) -= 1.0;
        A(row, n + k) -= net.R(k);
        for (int m = 0; m < n; ++m) {
            A(row, n + m) -= jw * net.L(k, m);
        }
    }
    b(0) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) {
        throw SolverError("ladder nodal matrix is singular");
    }
    const Eigen::VectorXcd x = lu.solve(b);
    return x(0);
}

}  // namespace foilwind
