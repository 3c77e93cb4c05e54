#include <gtest/gtest.h>

#include <cmath>

#include "foilwind/errors.hpp"
#include "foilwind/oracle.hpp"
#include "foilwind/quadrature.hpp"
#include "test_models.hpp"

using namespace foilwind;

namespace {

// Zero-Dirichlet Green's function of -d2/dx2 on [0, W].
double green(double x, double y, double W) { return std::min(x, y) * (W - std::max(x, y)) / W; }

// Double integral of the Green's function over [a, b] x [c, d], exact for
// disjoint or identical intervals.
double green_integral(double a, double b, double c, double d, double W) {
    const GaussRule g = gauss_legendre(4);
    double sum = 0.0;
    if (a == c && b == d) {
        // two triangles, x' < x on each by symmetry
        for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
            const double x = a + (b - a) * g.nodes(i);
            sum += 2.0 * g.weights(i) * (b - a) * (W - x) / W * 0.5 * (x * x - a * a);
        }
        return sum;
    }
    for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
        for (Eigen::Index j = 0; j < g.nodes.size(); ++j) {
            const double x = a + (b - a) * g.nodes(i);
            const double y = c + (d - c) * g.nodes(j);
            sum += g.weights(i) * g.weights(j) * (b - a) * (d - c) * green(x, y, W);
        }
    }
    return sum;
}

LadderNetwork ladder(int n, double r, double c, double l) {
    LadderNetwork net;
    net.R = Eigen::VectorXd::Constant(n, r);
    net.C = Eigen::VectorXd::Constant(n - 1, c);
    net.L = Eigen::MatrixXd::Constant(n, n, l);
    return net;
}

}  // namespace

TEST(Oracle, CartesianDirectCurrentResistance) {
    const FoilModel m = foilwind::testing::cartesian_model(0.002);
    EXPECT_NEAR(dc_resistance(m.winding, 60e6, m.symmetry), 6.578947368421, 1e-9);
}

TEST(Oracle, AxisymmetricDirectCurrentResistance) {
    const FoilWinding w = make_foil_winding(4, 0.5, {0.01, 0.02, 0.0, 0.05, Region::FoilWinding});
    // turns at mean radii 11.25, 13.75, 16.25, 18.75 mm
    const double length = 2.0 * pi * (0.01125 + 0.01375 + 0.01625 + 0.01875);
    EXPECT_NEAR(dc_resistance(w, 1e7, SymmetryMode::axisymmetric()), length / (1e7 * 0.00125 * 0.05), 1e-12);
}

TEST(Oracle, InterturnCapacitance) {
    const FoilModel m = foilwind::testing::cartesian_model(0.002);
    const Eigen::VectorXd C = interturn_capacitances(m.winding, 10.0 * eps0, m.symmetry);
    ASSERT_EQ(C.size(), 499);
    EXPECT_NEAR(C(0), 0.531e-6, 0.001e-6);
    EXPECT_EQ(C.minCoeff(), C.maxCoeff());
    const FoilWinding w = make_foil_winding(3, 0.5, {0.01, 0.013, 0.0, 0.02, Region::FoilWinding});
    const Eigen::VectorXd Ca = interturn_capacitances(w, eps0, SymmetryMode::axisymmetric());
    EXPECT_NEAR(Ca(1), eps0 * 0.02 * 2.0 * pi * 0.012 / 0.0005, 1e-18);
}

TEST(Oracle, TurnPositions) {
    const FoilWinding w = make_foil_winding(4, 0.5, {0.01, 0.02, 0.0, 0.05, Region::FoilWinding});
    const std::vector<double> r = turn_positions(w);
    ASSERT_EQ(r.size(), 4u);
    EXPECT_NEAR(r[0], 0.01125, 1e-15);
    EXPECT_NEAR(r[3], 0.01875, 1e-15);
}

TEST(Oracle, ResolvedTurnStrips) {
    const RectLayout l = window_winding_layout(0.003, 0.01, 0.001);
    const FoilWinding w = make_foil_winding(3, 0.5, l.rects[1]);
    const ResolvedTurns rt = resolve_turns(l, w);
    ASSERT_EQ(rt.turn_rects.size(), 3u);
    const LayoutRect& t0 = rt.layout.rects[static_cast<std::size_t>(rt.turn_rects[0])];
    EXPECT_NEAR(t0.x0, -0.00125, 1e-15);
    EXPECT_NEAR(t0.x1, -0.00075, 1e-15);
    for (const LayoutRect& r : rt.layout.rects) EXPECT_EQ(r.region, Region::Air);
    EXPECT_NEAR(layout_area(rt.layout), layout_area(l), 1e-18);
    RectLayout bad = l;
    bad.rects.erase(bad.rects.begin() + 1);
    EXPECT_THROW(resolve_turns(bad, w), GeometryError);
}

TEST(Oracle, MagnetostaticInductanceInWindow) {
    const double gap = 0.001;
    const double D = 0.003;
    const double h = 0.01;
    const double lz = 0.2;
    const RectLayout l = window_winding_layout(D, h, gap);
    const FoilWinding w = make_foil_winding(3, 0.5, l.rects[1]);
    const ResolvedTurns rt = resolve_turns(l, w);
    const Mesh mesh = generate_rect_layout(rt.layout, 0.0000625);
    RegionMaterials mat;
    const Eigen::MatrixXd L = magnetostatic_inductances(mesh, rt.turn_rects, mat, SymmetryMode::cartesian(lz));
    const double W = D + 2.0 * gap;
    const double x0 = -0.5 * W;
    for (int k = 0; k < 3; ++k) {
        for (int m = 0; m < 3; ++m) {
            const LayoutRect& a = rt.layout.rects[static_cast<std::size_t>(rt.turn_rects[k])];
            const LayoutRect& b = rt.layout.rects[static_cast<std::size_t>(rt.turn_rects[m])];
            const double expected = lz * mu0 / (a.width() * b.width() * h) *
                                    green_integral(a.x0 - x0, a.x1 - x0, b.x0 - x0, b.x1 - x0, W);
            EXPECT_NEAR(L(k, m), expected, 1e-3 * expected) << k << "," << m;
        }
    }
    EXPECT_THROW(magnetostatic_inductances(mesh, {rt.turn_rects[0], rt.turn_rects[0]}, mat,
                                           SymmetryMode::cartesian(lz)),
                 GeometryError);
}

TEST(Ladder, SingleTurn) {
    LadderNetwork net;
    net.R = Eigen::VectorXd::Constant(1, 2.0);
    net.C = Eigen::VectorXd(0);
    net.L = Eigen::MatrixXd::Constant(1, 1, 1e-3);
    const double w = 1e3;
    EXPECT_LT(std::abs(ladder_impedance(net, w) - std::complex<double>(2.0, w * 1e-3)), 1e-12);
}

TEST(Ladder, TwoTurnsWithoutInductance) {
    LadderNetwork net = ladder(2, 1.0, 1e-6, 0.0);
    net.R(1) = 3.0;
    const double w = 2e5;
    const std::complex<double> expected = 1.0 / (1.0 / 4.0 + std::complex<double>(0.0, w * 1e-6 / 4.0));
    EXPECT_LT(std::abs(ladder_impedance(net, w) - expected), 1e-12);
}

TEST(Ladder, LowFrequencyLimit) {
    // coupled inductances add up in series
    const LadderNetwork net = ladder(5, 0.1, 1e-9, 2e-6);
    const std::complex<double> z = ladder_impedance(net, 1.0);
    EXPECT_NEAR(z.real(), 0.5, 1e-9);
    EXPECT_NEAR(z.imag(), 25 * 2e-6, 1e-9);
}

TEST(Ladder, Validation) {
    EXPECT_THROW(ladder_impedance(ladder(3, -1.0, 1e-9, 1e-6), 1.0), ConfigError);
    EXPECT_THROW(ladder_impedance(ladder(3, 1.0, 0.0, 1e-6), 1.0), ConfigError);
    LadderNetwork net = ladder(3, 1.0, 1e-9, 1e-6);
    net.L(0, 1) = 5e-6;
    EXPECT_THROW(validate(net), ConfigError);
    net = ladder(3, 1.0, 1e-9, 1e-6);
    net.C = Eigen::VectorXd::Constant(3, 1e-9);
    EXPECT_THROW(validate(net), ConfigError);
}
