#include "foilwind/assembly.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

#include "foilwind/errors.hpp"
#include "foilwind/quadrature.hpp"

namespace foilwind {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

constexpr int field_rule_points = 4;

double region_nu(const RegionMaterials& m, Region r) {
    const std::optional<double>& nu = r == Region::Air ? m.nu_air : m.nu_yoke;
    if (!nu) {
        throw ConfigError("no reluctivity given for region " + to_string(r));
    }
    if (!(*nu > 0.0)) {
        throw ConfigError("reluctivity of region " + to_string(r) + " must be positive");
    }
    return *nu;
}

const HomogenizedTensors& winding_tensors(const RegionMaterials& m) {
    if (!m.winding) {
        throw ConfigError("no homogenized material given for region foil_winding");
    }
    return *m.winding;
}

// Reluctivity acting on the gradient of the scalar potential. The gradient
// along alpha produces flux parallel to the foils, the gradient along gamma
// produces flux across them.
Eigen::Matrix2d gradient_nu(const RegionMaterials& m, Region r, const FoilWinding* winding) {
    if (r != Region::FoilWinding) {
        return region_nu(m, r) * Eigen::Matrix2d::Identity();
    }
    if (winding == nullptr) {
        throw ConfigError("mesh has foil winding triangles but no winding was given");
    }
    const HomogenizedTensors& h = winding_tensors(m);
    Eigen::Matrix2d nu = Eigen::Matrix2d::Zero();
    nu(winding->alpha_axis, winding->alpha_axis) = h.nu_par;
    nu(1 - winding->alpha_axis, 1 - winding->alpha_axis) = h.nu_perp;
    return nu;
}

Eigen::Vector2d rule_point(const Mesh& mesh, int t, const Eigen::Vector3d& l) {
    return l(0) * mesh.node(mesh.triangles(0, t)) + l(1) * mesh.node(mesh.triangles(1, t)) +
           l(2) * mesh.node(mesh.triangles(2, t));
}

double spline_value(const BSplineBasisd& basis, int j, const WindingQuadPoint& q) {
    return basis.eval_on_span(j, q.span, q.alpha);
}

double spline_deriv(const BSplineBasisd& basis, int j, const WindingQuadPoint& q) {
    return basis.eval_deriv_on_span(j, q.span, q.alpha);
}

int first_active(const WindingQuadPoint& q) { return q.span - BSplineBasisd::degree; }

void check_winding_fits(const Mesh& mesh, const FoilWinding& winding) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.regions[static_cast<std::size_t>(t)] != Region::FoilWinding) {
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            if (!inside_winding(winding, mesh.node(mesh.triangles(k, t)))) {
                throw GeometryError("foil winding triangle " + std::to_string(t) +
                                    " leaves the winding rectangle");
            }
        }
    }
}

}  // namespace

double volume_weight(const SymmetryMode& symmetry, const Eigen::Vector2d& p) {
    return symmetry.is_axisymmetric() ? 2.0 * pi * p.x() : symmetry.length_z();
}

FieldMatrices assemble_field(const Mesh& mesh, const RegionMaterials& materials,
                             const SymmetryMode& symmetry, const FoilWinding* winding) {
    const TriangleRule rule = duffy_rule(field_rule_points);
    const bool axi = symmetry.is_axisymmetric();
    Triplets k_entries;
    Triplets m_entries;
    k_entries.reserve(static_cast<std::size_t>(9 * mesh.num_triangles()));

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Region region = mesh.regions[static_cast<std::size_t>(t)];
        const Eigen::Matrix2d nu = gradient_nu(materials, region, winding);
        const Eigen::Matrix<double, 2, 3> g = shape_gradients(mesh, t);
        const double area = mesh.signed_area(t);

        // integral of 1/r (axisymmetric) or 1 over the triangle
        double measure = area;
        if (axi) {
            measure = 0.0;
            for (std::size_t q = 0; q < rule.weights.size(); ++q) {
                measure += rule.weights[q] * area / rule_point(mesh, t, rule.barycentric[q]).x();
            }
        }
        const double scale = axi ? 2.0 * pi : symmetry.length_z();
        const Eigen::Matrix3d ke = scale * measure * g.transpose() * nu * g;

        Eigen::Matrix3d me = Eigen::Matrix3d::Zero();
        if (region == Region::FoilWinding) {
            const double sigma = winding_tensors(materials).sigma_par;
            for (std::size_t q = 0; q < rule.weights.size(); ++q) {
                const Eigen::Vector3d& l = rule.barycentric[q];
                double w = rule.weights[q] * area * sigma;
                w *= axi ? 2.0 * pi / rule_point(mesh, t, l).x() : symmetry.length_z();
                me += w * l * l.transpose();
            }
        }

        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const int i = mesh.triangles(a, t);
                const int j = mesh.triangles(b, t);
                k_entries.emplace_back(i, j, ke(a, b));
                if (me(a, b) != 0.0) {
                    m_entries.emplace_back(i, j, me(a, b));
                }
            }
        }
    }

    const int n = mesh.num_nodes();
    FieldMatrices out;
    out.K.resize(n, n);
    out.M.resize(n, n);
    out.K.setFromTriplets(k_entries.begin(), k_entries.end());
    out.M.setFromTriplets(m_entries.begin(), m_entries.end());
    return out;
}

SparseMatrix assemble_coupling(const Mesh& mesh, const FoilWinding& winding, const BSplineBasisd& basis,
                               double sigma_par, const SymmetryMode& symmetry) {
    const std::vector<WindingQuadPoint> points = winding_quadrature(mesh, winding, basis);
    const bool axi = symmetry.is_axisymmetric();
    // entries sum many quadrature contributions; accumulate in extended precision
    std::vector<Eigen::Triplet<long double>> entries;
    entries.reserve(points.size() * 9);
    for (const WindingQuadPoint& q : points) {
        long double w = static_cast<long double>(q.weight) * sigma_par;
        if (axi) {
            w /= q.position.x();
        }
        if (w == 0.0L) {
            continue;
        }
        for (int j = first_active(q); j <= q.span; ++j) {
            const long double xi = spline_value(basis, j, q);
            for (int a = 0; a < 3; ++a) {
                entries.emplace_back(mesh.triangles(a, q.triangle), j, w * xi * q.bary(a));
            }
        }
    }
    Eigen::SparseMatrix<long double> Xl(mesh.num_nodes(), basis.size());
    Xl.setFromTriplets(entries.begin(), entries.end());
    SparseMatrix X = Xl.cast<double>();
    return X;
}

WindingMatrices assemble_winding(const Mesh& mesh, const FoilWinding& winding,
                                 const BSplineBasisd& basis, double sigma_par, double eps_hom,
                                 const SymmetryMode& symmetry) {
    if (eps_hom < 0.0 || !std::isfinite(eps_hom)) {
        throw ConfigError("homogenized permittivity must be non-negative");
    }
    const std::vector<WindingQuadPoint> points = winding_quadrature(mesh, winding, basis);
    const int n = basis.size();
    const double df = winding.foil_thickness();
    const bool axi = symmetry.is_axisymmetric();

    using ExtMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    ExtMatrix G = ExtMatrix::Zero(n, n);
    ExtMatrix C_prime = ExtMatrix::Zero(n, n);
    ExtMatrix C_dprime = ExtMatrix::Zero(n, n);

    for (const WindingQuadPoint& q : points) {
        const long double vol = volume_weight(symmetry, q.position);
        const long double chi2_vol = axi ? 1.0L / (2.0L * pi * q.position.x()) : 1.0L / symmetry.length_z();
        const long double wg = q.weight * sigma_par * chi2_vol;
        const long double wc1 = q.weight * vol * eps_hom / (2.0L * df);
        const long double wc2 = q.weight * vol * eps_hom / (static_cast<long double>(df) * df);
        for (int i = first_active(q); i <= q.span; ++i) {
            const long double xi_i = spline_value(basis, i, q);
            for (int j = first_active(q); j <= q.span; ++j) {
                const long double xi_j = spline_value(basis, j, q);
                G(i, j) += wg * xi_j * xi_i;
                C_prime(i, j) += wc1 * spline_deriv(basis, j, q) * xi_i;
                C_dprime(i, j) += wc2 * xi_j * xi_i;
            }
        }
    }
    WindingMatrices out;
    out.G = G.cast<double>();
    out.C_prime = C_prime.cast<double>();
    out.C_dprime = C_dprime.cast<double>();
    out.P.resize(n);
    for (int i = 0; i < n; ++i) {
        out.P(i) = basis.integral(i) / df;
    }
    return out;
}

Eigen::VectorXd assemble_source(const Mesh& mesh, const SourceDensity& sources,
                                const SymmetryMode& symmetry) {
    Eigen::VectorXd js = Eigen::VectorXd::Zero(mesh.num_nodes());
    const double scale = symmetry.is_axisymmetric() ? 2.0 * pi : symmetry.length_z();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        auto it = sources.find(mesh.regions[static_cast<std::size_t>(t)]);
        if (it == sources.end() || it->second == 0.0) {
            continue;
        }
        const double share = scale * it->second * mesh.signed_area(t) / 3.0;
        for (int a = 0; a < 3; ++a) {
            js(mesh.triangles(a, t)) += share;
        }
    }
    return js;
}

const HomogenizedTensors& FoilModel::tensors() const { return winding_tensors(materials); }

AssembledSystem assemble_system(const FoilModel& model) {
    validate(model.mesh, model.symmetry);
    check_winding_fits(model.mesh, model.winding);
    const HomogenizedTensors& h = model.tensors();

    AssembledSystem s;
    FieldMatrices field = assemble_field(model.mesh, model.materials, model.symmetry, &model.winding);
    s.K = std::move(field.K);
    s.M = std::move(field.M);
    s.X = assemble_coupling(model.mesh, model.winding, model.basis, h.sigma_par, model.symmetry);
    WindingMatrices wm = assemble_winding(model.mesh, model.winding, model.basis, h.sigma_par,
                                          h.eps_hom, model.symmetry);
    s.G = std::move(wm.G);
    s.C_prime = std::move(wm.C_prime);
    s.C_dprime = std::move(wm.C_dprime);
    s.P = std::move(wm.P);
    s.js = assemble_source(model.mesh, model.sources, model.symmetry);
    s.dirichlet = model.mesh.dirichlet_mask();
    s.symmetry = model.symmetry;
    return s;
}

double asymmetry(const Eigen::MatrixXd& a) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        return 0.0;
    }
    return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

double asymmetry(const SparseMatrix& a) {
    const SparseMatrix diff = a - SparseMatrix(a.transpose());
    double scale = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            scale = std::max(scale, std::abs(it.value()));
        }
    }
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return scale == 0.0 ? 0.0 : worst / scale;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
        }
    }
}

void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& a) {
    write_matrix_market(out, SparseMatrix(a.sparseView(0.0, 0.0)));
}

}  // namespace foilwind
