#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <set>
#include <sstream>

#include "foilwind/assembly.hpp"
#include "foilwind/errors.hpp"
#include "foilwind/quadrature.hpp"
#include "test_models.hpp"

using namespace foilwind;
using foilwind::testing::cartesian_model;
using foilwind::testing::pot_model;

namespace {

Eigen::MatrixXd dense(const SparseMatrix& a) { return Eigen::MatrixXd(a); }

double min_eigenvalue(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd free_block(const SparseMatrix& a, const std::vector<bool>& fixed) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (!fixed[i]) idx.push_back(static_cast<int>(i));
    }
    const Eigen::MatrixXd d = dense(a);
    Eigen::MatrixXd out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = d(idx[i], idx[j]);
    }
    return out;
}

Mesh single_triangle() {
    Mesh m;
    m.nodes.resize(2, 3);
    m.nodes << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
    m.triangles.resize(3, 1);
    m.triangles << 0, 1, 2;
    m.regions = {Region::Air};
    m.groups = {0};
    return m;
}

// Monomial coefficients of the degree-2 Bernstein polynomials on [0, 1].
double bernstein_product_integral(int i, int j) {
    const double c[3][3] = {{1, -2, 1}, {0, 2, -2}, {0, 0, 1}};
    double sum = 0.0;
    for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) sum += c[i][p] * c[j][q] / (p + q + 1);
    }
    return sum;
}

// Composite Simpson rule with m panels per knot span.
template <class F>
double integrate_alpha(const BSplineBasisd& b, F f, int m = 64) {
    double sum = 0.0;
    for (int k = 0; k < b.num_spans(); ++k) {
        const auto [a0, a1] = b.span_bounds(k);
        const double h = (a1 - a0) / m;
        for (int p = 0; p < m; ++p) {
            const double x0 = a0 + p * h;
            sum += h / 6.0 * (f(k + 2, x0) + 4.0 * f(k + 2, x0 + 0.5 * h) + f(k + 2, x0 + h));
        }
    }
    return sum;
}

}  // namespace

TEST(AssembleField, OneTriangleLaplacian) {
    RegionMaterials mat;
    mat.nu_air = 1.0;
    const FieldMatrices f = assemble_field(single_triangle(), mat, SymmetryMode::cartesian(1.0));
    Eigen::Matrix3d expected;
    expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
    EXPECT_LT((dense(f.K) - expected).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(dense(f.M).cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssembleField, NoConductorNoMass) {
    RectLayout l;
    l.rects = {{0.0, 1.0, 0.0, 1.0, Region::Air}};
    const Mesh m = generate_rect_layout(l, 0.25);
    const FieldMatrices f = assemble_field(m, RegionMaterials{}, SymmetryMode::cartesian(1.0));
    EXPECT_EQ(dense(f.M).cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssembleField, DirichletStiffnessPositiveDefinite) {
    RectLayout l;
    l.rects = {{0.0, 1.0, 0.0, 1.0, Region::Air}};
    const Mesh m = generate_rect_layout(l, 0.1);
    RegionMaterials mat;
    mat.nu_air = 1.0;
    const FieldMatrices f = assemble_field(m, mat, SymmetryMode::cartesian(1.0));
    const Eigen::MatrixXd kf = free_block(f.K, m.dirichlet_mask());
    EXPECT_GT(min_eigenvalue(kf), 0.0);
}

TEST(AssembleField, MissingMaterialThrows) {
    FoilModel m = pot_model(0.002);
    RegionMaterials mat = m.materials;
    mat.nu_yoke.reset();
    EXPECT_THROW(assemble_field(m.mesh, mat, m.symmetry, &m.winding), ConfigError);
    mat = m.materials;
    mat.winding.reset();
    EXPECT_THROW(assemble_field(m.mesh, mat, m.symmetry, &m.winding), ConfigError);
}

TEST(AssembleField, AnisotropicReluctivityOrientation) {
    // single winding triangle, alpha along x: B along the foils comes from d/dx
    Mesh m = single_triangle();
    m.regions = {Region::FoilWinding};
    const FoilWinding w = make_foil_winding(10, 0.5, {0.0, 1.0, 0.0, 1.0, Region::FoilWinding});
    RegionMaterials mat;
    HomogenizedTensors t;
    t.nu_perp = 3.0;
    t.nu_par = 1.0;
    t.sigma_par = 0.0;
    mat.winding = t;
    const FieldMatrices f = assemble_field(m, mat, SymmetryMode::cartesian(1.0), &w);
    // grad N = (-1,-1), (1,0), (0,1); area 1/2
    Eigen::Matrix3d expected;
    expected << 0.5 * (1 + 3), -0.5 * 1, -0.5 * 3, -0.5 * 1, 0.5 * 1, 0.0, -0.5 * 3, 0.0, 0.5 * 3;
    EXPECT_LT((dense(f.K) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

class AssemblyInvariants : public ::testing::TestWithParam<bool> {
protected:
    FoilModel model() const { return GetParam() ? pot_model(0.002) : cartesian_model(0.002); }
};

TEST_P(AssemblyInvariants, SymmetricPositiveSemidefinite) {
    const FoilModel m = model();
    const AssembledSystem s = assemble_system(m);
    EXPECT_LE(asymmetry(s.K), 1e-12);
    EXPECT_LE(asymmetry(s.M), 1e-12);
    EXPECT_LE(asymmetry(s.G), 1e-12);
    EXPECT_LE(asymmetry(s.C_dprime), 1e-12);
    const Eigen::MatrixXd M = dense(s.M);
    EXPECT_GE(min_eigenvalue(M), -1e-12 * M.norm());
    EXPECT_GE(min_eigenvalue(s.G), -1e-12 * s.G.norm());
    EXPECT_GE(min_eigenvalue(s.C_dprime), -1e-12 * s.C_dprime.norm());
    EXPECT_GT(min_eigenvalue(free_block(s.K, s.dirichlet)), 0.0);
}

TEST_P(AssemblyInvariants, CouplingSupportedOnWinding) {
    const FoilModel m = model();
    const AssembledSystem s = assemble_system(m);
    std::set<int> winding_nodes;
    for (int t = 0; t < m.mesh.num_triangles(); ++t) {
        if (m.mesh.regions[static_cast<std::size_t>(t)] == Region::FoilWinding) {
            for (int k = 0; k < 3; ++k) winding_nodes.insert(m.mesh.triangles(k, t));
        }
    }
    for (int k = 0; k < s.X.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s.X, k); it; ++it) {
            EXPECT_TRUE(winding_nodes.count(static_cast<int>(it.row())) == 1);
        }
    }
}

TEST_P(AssemblyInvariants, PermittivityZeroGivesStandardSystem) {
    FoilModel m = model();
    const AssembledSystem full = assemble_system(m);
    m.materials.winding->eps_hom = 0.0;
    const AssembledSystem standard = assemble_system(m);
    EXPECT_EQ(standard.C_prime.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(standard.C_dprime.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(dense(standard.K), dense(full.K));
    EXPECT_EQ(dense(standard.M), dense(full.M));
    EXPECT_EQ(dense(standard.X), dense(full.X));
    EXPECT_EQ(standard.G, full.G);
    EXPECT_EQ(standard.P, full.P);
    EXPECT_EQ(standard.js, full.js);
}

TEST_P(AssemblyInvariants, VoltageWeightsSumToTurns) {
    const FoilModel m = model();
    const AssembledSystem s = assemble_system(m);
    EXPECT_NEAR(s.P.sum(), 500.0, 1e-9);
    for (int i = 0; i < m.basis.size(); ++i) {
        EXPECT_NEAR(s.P(i), m.basis.integral(i) / m.winding.foil_thickness(), 1e-9);
    }
}

INSTANTIATE_TEST_SUITE_P(Symmetry, AssemblyInvariants, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "Axisymmetric" : "Cartesian"; });

TEST(AssembleWinding, CartesianTotals) {
    const FoilModel m = cartesian_model(0.001);
    const AssembledSystem s = assemble_system(m);
    const HomogenizedTensors& t = m.tensors();
    const double area = 0.01 * 0.02;
    const double lz = 0.3;
    const double df = m.winding.foil_thickness();
    EXPECT_NEAR(dense(s.M).sum(), lz * t.sigma_par * area, 1e-9 * lz * t.sigma_par * area);
    EXPECT_NEAR(s.G.sum(), t.sigma_par / lz * area, 1e-12 * t.sigma_par / lz * area);
    const double c2 = lz * t.eps_hom / (df * df) * area;
    EXPECT_NEAR(s.C_dprime.sum(), c2, 1e-12 * c2);
    const double c1 = lz * t.eps_hom / (2.0 * df) * 0.02;
    EXPECT_NEAR(s.C_prime.sum(), 0.0, 1e-12 * c1);
    // C' + C'^T is the boundary term of (xi_i xi_j)' at both winding faces
    const Eigen::MatrixXd sym = s.C_prime + s.C_prime.transpose();
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(sym.rows(), sym.cols());
    expected(0, 0) = -c1;
    expected(sym.rows() - 1, sym.cols() - 1) = c1;
    EXPECT_LT((sym - expected).cwiseAbs().maxCoeff(), 1e-10 * c1);
}

TEST(AssembleWinding, AxisymmetricTotals) {
    const FoilModel m = pot_model(0.001);
    const AssembledSystem s = assemble_system(m);
    const HomogenizedTensors& t = m.tensors();
    const double r0 = m.winding.rect.x0;
    const double r1 = m.winding.rect.x1;
    const double h = m.winding.height();
    const double df = m.winding.foil_thickness();
    const double m_sum = 2.0 * pi * t.sigma_par * h * std::log(r1 / r0);
    EXPECT_NEAR(dense(s.M).sum(), m_sum, 1e-9 * m_sum);
    const double g_sum = t.sigma_par * h * std::log(r1 / r0) / (2.0 * pi);
    EXPECT_NEAR(s.G.sum(), g_sum, 1e-9 * g_sum);
    const double c2 = t.eps_hom / (df * df) * pi * (r1 * r1 - r0 * r0) * h;
    EXPECT_NEAR(s.C_dprime.sum(), c2, 1e-12 * c2);
}

TEST(AssembleCoupling, ColumnSumsCartesian) {
    const FoilModel m = cartesian_model(0.001);
    const AssembledSystem s = assemble_system(m);
    const double sigma = m.tensors().sigma_par;
    const Eigen::RowVectorXd col = Eigen::RowVectorXd::Ones(s.X.rows()) * s.X;
    for (int j = 0; j < m.basis.size(); ++j) {
        const double expected = sigma * m.winding.height() * m.basis.integral(j);
        EXPECT_NEAR(col(j), expected, 1e-12 * expected);
    }
}

TEST(AssembleCoupling, ColumnSumsAxisymmetric) {
    const FoilModel m = pot_model(0.001);
    const AssembledSystem s = assemble_system(m);
    const double sigma = m.tensors().sigma_par;
    const Eigen::RowVectorXd col = Eigen::RowVectorXd::Ones(s.X.rows()) * s.X;
    for (int j = 0; j < m.basis.size(); ++j) {
        const double expected =
            sigma * m.winding.height() *
            integrate_alpha(m.basis, [&](int span, double a) {
                return m.basis.eval_on_span(j, span, a) / m.winding.axis_coordinate(a);
            });
        EXPECT_NEAR(col(j), expected, 1e-10 * expected);
    }
}

TEST(AssembleCoupling, NoConductivityNoCoupling) {
    const FoilModel m = cartesian_model(0.002);
    const SparseMatrix X = assemble_coupling(m.mesh, m.winding, m.basis, 0.0, m.symmetry);
    EXPECT_EQ(dense(X).cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssembleWinding, BernsteinMassMatrix) {
    // unit-square winding, N = 2 so that eps / d_f^2 = 1 with eps = 1/4
    RectLayout l;
    l.rects = {{-0.5, 0.5, 0.0, 1.0, Region::FoilWinding}};
    const Mesh mesh = generate_rect_layout(l, 0.1);
    const FoilWinding w = make_foil_winding(2, 0.5, l.rects[0]);
    const BSplineBasisd b = make_basis(3, -0.5, 0.5);
    const WindingMatrices wm = assemble_winding(mesh, w, b, 1.0, 0.25, SymmetryMode::cartesian(1.0));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(wm.C_dprime(i, j), bernstein_product_integral(i, j), 1e-15) << i << "," << j;
        }
    }
    EXPECT_NEAR(wm.C_dprime(0, 0), 6.0 / 30.0, 1e-15);
    EXPECT_NEAR(wm.C_dprime(0, 2), 1.0 / 30.0, 1e-15);
    EXPECT_NEAR(wm.C_dprime(1, 1), 4.0 / 30.0, 1e-15);
    // G with sigma = 1 and l_z = 1 is the same mass matrix
    EXPECT_LT((wm.G - wm.C_dprime).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AssembleWinding, NegativePermittivityThrows) {
    const FoilModel m = cartesian_model(0.002);
    EXPECT_THROW(assemble_winding(m.mesh, m.winding, m.basis, 1.0, -1.0, m.symmetry), ConfigError);
}

TEST(AssembleWinding, BasisIntervalMismatchThrows) {
    FoilModel m = cartesian_model(0.002);
    m.basis = make_basis(10, -0.004, 0.005);
    EXPECT_THROW(assemble_system(m), ConfigError);
}

TEST(AssembleWinding, QuadratureSufficiency) {
    // knots on mesh lines: 6 splines give 4 spans of 3.5 mm; mesh cells of 0.5 mm
    FoilModel m = pot_model(0.0005, 6);
    auto g_entries = [&](int order) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m.basis.size(), m.basis.size());
        for (const WindingQuadPoint& q : winding_quadrature(m.mesh, m.winding, m.basis, order)) {
            for (int i = q.span - 2; i <= q.span; ++i) {
                for (int j = q.span - 2; j <= q.span; ++j) {
                    G(i, j) += q.weight * m.basis.eval_on_span(i, q.span, q.alpha) *
                               m.basis.eval_on_span(j, q.span, q.alpha) / q.position.x();
                }
            }
        }
        return G;
    };
    const Eigen::MatrixXd a = g_entries(4);
    const Eigen::MatrixXd b = g_entries(8);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (b(i, j) != 0.0) EXPECT_LT(std::abs(a(i, j) - b(i, j)) / std::abs(b(i, j)), 1e-10);
        }
    }
}

TEST(AssembleWinding, DirectCurrentResistanceFromConductance) {
    const FoilModel m = cartesian_model(0.001);
    const AssembledSystem s = assemble_system(m);
    const Eigen::VectorXd u = s.G.fullPivLu().solve(s.P);
    const double r = s.P.dot(u);
    const double oracle = 500 * 0.3 / (60e6 * 19e-6 * 0.02);
    EXPECT_NEAR(r, oracle, 0.005 * oracle);
}

TEST(AssembleSource, LinearElementLoad) {
    Mesh m = single_triangle();
    const double lz = 0.7;
    const Eigen::VectorXd js = assemble_source(m, {{Region::Air, 3.0}}, SymmetryMode::cartesian(lz));
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(js(a), lz * 3.0 * 0.5 / 3.0, 1e-15);
    EXPECT_EQ(assemble_source(m, {}, SymmetryMode::cartesian(lz)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssembleSource, RegionsAreAdditive) {
    const FoilModel m = pot_model(0.002);
    const Eigen::VectorXd a = assemble_source(m.mesh, {{Region::Air, 2.0}}, m.symmetry);
    const Eigen::VectorXd b = assemble_source(m.mesh, {{Region::Yoke, -5.0}}, m.symmetry);
    const Eigen::VectorXd ab = assemble_source(m.mesh, {{Region::Air, 2.0}, {Region::Yoke, -5.0}}, m.symmetry);
    EXPECT_LT((ab - a - b).cwiseAbs().maxCoeff(), 1e-15 * ab.cwiseAbs().maxCoeff());
}

TEST(MatrixMarket, CoordinateFormat) {
    SparseMatrix a(2, 3);
    a.insert(0, 1) = 2.5;
    a.insert(1, 2) = -1.0;
    std::ostringstream out;
    write_matrix_market(out, a);
    EXPECT_EQ(out.str(), "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 2 2.5\n2 3 -1\n");
}
