#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>

#include "foilwind/errors.hpp"
#include "foilwind/solver.hpp"
#include "test_models.hpp"

using namespace foilwind;
using foilwind::testing::cartesian_model;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& a) { return a.sparseView(0.0, 0.0); }

// Four field nodes (node 3 fixed) and two voltage functions.
AssembledSystem small_system() {
    AssembledSystem s;
    Eigen::MatrixXd K(4, 4), M(4, 4), X(4, 2);
    K << 4, -1, 0, -1, -1, 4, -1, 0, 0, -1, 3, -1, -1, 0, -1, 5;
    M << 2, 1, 0, 0, 1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3;
    X << 1.0, 0.5, 0.5, 1.0, 0.0, 0.0, 2.0, 2.0;
    s.K = sparse(K);
    s.M = sparse(M);
    s.X = sparse(X);
    s.G.resize(2, 2);
    s.G << 2.0, 0.5, 0.5, 1.0;
    s.C_prime.resize(2, 2);
    s.C_prime << -0.3, 0.2, -0.2, 0.3;
    s.C_dprime.resize(2, 2);
    s.C_dprime << 0.4, 0.1, 0.1, 0.6;
    s.P = Eigen::Vector2d(0.7, 1.3);
    s.js = Eigen::Vector4d(0.1, -0.2, 0.3, 0.0);
    s.dirichlet = {false, false, false, true};
    return s;
}

// Dense solve of the block system on the free nodes with the current as unknown
// for a voltage drive.
Eigen::VectorXcd dense_reference(const AssembledSystem& s, double w, const Drive& drive, ModelKind model) {
    const complex jw(0.0, w);
    const int na = 3;
    const int nu = 2;
    const bool vd = std::holds_alternative<VoltageDrive>(drive);
    const int n = na + nu + (vd ? 1 : 0);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    const Eigen::MatrixXd K(s.K), M(s.M), X(s.X);
    A.topLeftCorner(na, na) = K.topLeftCorner(na, na).cast<complex>() + jw * M.topLeftCorner(na, na);
    A.block(0, na, na, nu) = -X.topRows(na).cast<complex>();
    A.block(na, 0, nu, na) = -jw * X.topRows(na).transpose();
    Eigen::MatrixXcd W = s.G.cast<complex>();
    if (model == ModelKind::Capacitive) W += jw * (s.C_prime + s.C_dprime);
    A.block(na, na, nu, nu) = W;
    b.head(na) = s.js.head(na).cast<complex>();
    if (vd) {
        A.block(na, na + nu, nu, 1) = -s.P.cast<complex>();
        A.block(na + nu, na, 1, nu) = s.P.transpose().cast<complex>();
        b(na + nu) = std::get<VoltageDrive>(drive).voltage;
    } else {
        b.segment(na, nu) = s.P.cast<complex>() * std::get<CurrentDrive>(drive).current;
    }
    return A.fullPivLu().solve(b);
}

}  // namespace

TEST(FrequencySolver, TrivialSystem) {
    AssembledSystem s;
    s.K = sparse(Eigen::MatrixXd::Identity(1, 1));
    s.M = SparseMatrix(1, 1);
    s.X = SparseMatrix(1, 1);
    s.G = Eigen::MatrixXd::Ones(1, 1);
    s.C_prime = Eigen::MatrixXd::Zero(1, 1);
    s.C_dprime = Eigen::MatrixXd::Zero(1, 1);
    s.P = Eigen::VectorXd::Ones(1);
    s.js = Eigen::VectorXd::Zero(1);
    s.dirichlet = {false};
    const Solution sol = solve_frequency(s, 2.0 * pi * 1e3, CurrentDrive{}, ModelKind::Capacitive);
    EXPECT_NEAR(std::abs(sol.impedance() - complex(1.0, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(sol.frequency(), 1e3, 1e-9);
}

TEST(FrequencySolver, MatchesDenseBlockSolve) {
    const AssembledSystem s = small_system();
    FrequencySolver solver(s);
    for (double w : {0.0, 0.3, 7.0}) {
        for (ModelKind model : {ModelKind::Standard, ModelKind::Capacitive}) {
            for (const Drive& drive : {Drive(CurrentDrive{{1.5, -0.5}}), Drive(VoltageDrive{{0.0, 2.0}})}) {
                if (w == 0.0 && std::holds_alternative<VoltageDrive>(drive)) continue;
                const Solution sol = solver.solve(w, drive, model);
                const Eigen::VectorXcd ref = dense_reference(s, w, drive, model);
                EXPECT_LT((sol.a.head(3) - ref.head(3)).norm(), 1e-13 * ref.norm());
                EXPECT_EQ(sol.a(3), complex(0.0, 0.0));
                EXPECT_LT((sol.u - ref.segment(3, 2)).norm(), 1e-13 * ref.norm());
                if (std::holds_alternative<VoltageDrive>(drive)) {
                    EXPECT_LT(std::abs(sol.current - ref(5)), 1e-13 * std::abs(ref(5)));
                }
                EXPECT_LT(sol.residual, 1e-14);
            }
        }
    }
}

TEST(FrequencySolver, NegativeFrequencyThrows) {
    const AssembledSystem s = small_system();
    FrequencySolver solver(s);
    EXPECT_THROW(solver.solve(-1.0, CurrentDrive{}, ModelKind::Standard), DomainError);
    EXPECT_THROW(solver.solve(std::nan(""), CurrentDrive{}, ModelKind::Standard), DomainError);
}

TEST(FrequencySolver, SingularVoltageSystemThrows) {
    AssembledSystem s;
    s.K = sparse(Eigen::MatrixXd::Identity(1, 1));
    s.M = SparseMatrix(1, 1);
    s.X = SparseMatrix(1, 2);
    s.G = Eigen::MatrixXd::Zero(2, 2);
    s.C_prime = Eigen::MatrixXd::Zero(2, 2);
    s.C_dprime = Eigen::MatrixXd::Zero(2, 2);
    s.P = Eigen::VectorXd::Ones(2);
    s.js = Eigen::VectorXd::Zero(1);
    s.dirichlet = {false};
    EXPECT_THROW(solve_frequency(s, 0.0, VoltageDrive{}, ModelKind::Standard), SolverError);
    EXPECT_THROW(solve_frequency(s, 0.0, CurrentDrive{}, ModelKind::Standard), SolverError);
}

TEST(FrequencySolver, UncoupledFieldNodeThrows) {
    AssembledSystem s = small_system();
    Eigen::MatrixXd K(s.K);
    K.row(2).setZero();
    K.col(2).setZero();
    s.K = sparse(K);
    EXPECT_THROW(solve_frequency(s, 0.0, CurrentDrive{}, ModelKind::Standard), SolverError);
}

class CartesianSolve : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        model_ = new FoilModel(cartesian_model(0.001));
        system_ = new AssembledSystem(assemble_system(*model_));
    }
    static void TearDownTestSuite() {
        delete system_;
        delete model_;
    }
    static FoilModel* model_;
    static AssembledSystem* system_;
};

FoilModel* CartesianSolve::model_ = nullptr;
AssembledSystem* CartesianSolve::system_ = nullptr;

TEST_F(CartesianSolve, DirectCurrentResistance) {
    const double oracle = 500 * 0.3 / (60e6 * 0.95 * 0.01 / 500 * 0.02);
    for (ModelKind model : {ModelKind::Standard, ModelKind::Capacitive}) {
        const complex z = solve_frequency(*system_, 0.0, CurrentDrive{}, model).impedance();
        EXPECT_NEAR(z.real(), oracle, 0.005 * oracle);
        EXPECT_NEAR(z.imag(), 0.0, 1e-12 * oracle);
    }
}

TEST_F(CartesianSolve, LinearInDrive) {
    FrequencySolver solver(*system_);
    const double w = 2.0 * pi * 5e3;
    const Solution s1 = solver.solve(w, CurrentDrive{{1.0, 0.0}}, ModelKind::Capacitive);
    const Solution s2 = solver.solve(w, CurrentDrive{{-2.0, 3.0}}, ModelKind::Capacitive);
    const complex k(-2.0, 3.0);
    EXPECT_LT((s2.u - k * s1.u).norm(), 1e-10 * s2.u.norm());
    EXPECT_LT((s2.a - k * s1.a).norm(), 1e-10 * s2.a.norm());
    EXPECT_LT(std::abs(s2.impedance() - s1.impedance()), 1e-10 * std::abs(s1.impedance()));
}

TEST_F(CartesianSolve, VoltageAndCurrentDrivesAreDual) {
    FrequencySolver solver(*system_);
    for (double f : {0.0, 50.0, 2e4, 5e5}) {
        const double w = 2.0 * pi * f;
        for (ModelKind model : {ModelKind::Standard, ModelKind::Capacitive}) {
            const complex z = solver.solve(w, CurrentDrive{}, model).impedance();
            if (f == 0.0) continue;
            const Solution v = solver.solve(w, VoltageDrive{z}, model);
            EXPECT_LT(std::abs(v.current - complex(1.0, 0.0)), 1e-9) << f;
            EXPECT_LT(std::abs(v.impedance() - z), 1e-9 * std::abs(z)) << f;
        }
    }
}

TEST_F(CartesianSolve, PassiveAndResidualSmall) {
    const std::vector<double> fs = log_frequencies(1.0, 1e6, 13);
    for (const SweepResult& r : sweep(*system_, fs, CurrentDrive{}, {ModelKind::Standard, ModelKind::Capacitive})) {
        ASSERT_EQ(r.entries.size(), fs.size());
        for (const SweepEntry& e : r.entries) {
            ASSERT_TRUE(e.solution.has_value()) << e.error;
            EXPECT_GE(e.solution->impedance().real(), 0.0) << e.frequency;
            EXPECT_LE(current_condition_residual(*system_, *e.solution), 1e-10) << e.frequency;
            EXPECT_LE(e.solution->residual, 1e-12) << e.frequency;
        }
    }
}

TEST_F(CartesianSolve, ModelsAgreeAtLowFrequency) {
    FrequencySolver solver(*system_);
    for (double f : {1.0, 10.0}) {
        const complex zs = solver.solve(2.0 * pi * f, CurrentDrive{}, ModelKind::Standard).impedance();
        const complex zc = solver.solve(2.0 * pi * f, CurrentDrive{}, ModelKind::Capacitive).impedance();
        EXPECT_LT(std::abs(zs - zc) / std::abs(zs), 1e-6) << f;
    }
}

TEST_F(CartesianSolve, SharedSweepMatchesSingleModelSweep) {
    const std::vector<double> fs = {10.0, 1e3, 1e5};
    const std::vector<SweepResult> both = sweep(*system_, fs, CurrentDrive{}, {ModelKind::Standard, ModelKind::Capacitive});
    ASSERT_EQ(both.size(), 2u);
    const SweepResult cap = sweep(*system_, fs, CurrentDrive{}, ModelKind::Capacitive);
    EXPECT_EQ(both[1].model, ModelKind::Capacitive);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const complex a = both[1].entries[i].solution->impedance();
        const complex b = cap.entries[i].solution->impedance();
        EXPECT_LT(std::abs(a - b), 1e-12 * std::abs(b));
    }
}

TEST(Sweep, RejectsBadFrequencyLists) {
    const AssembledSystem s = small_system();
    EXPECT_THROW(sweep(s, {}, CurrentDrive{}, ModelKind::Standard), ConfigError);
    EXPECT_THROW(sweep(s, {0.0, 1.0}, CurrentDrive{}, ModelKind::Standard), ConfigError);
    EXPECT_THROW(sweep(s, {2.0, 1.0}, CurrentDrive{}, ModelKind::Standard), ConfigError);
}

TEST(Sweep, FrequencyGrids) {
    const std::vector<double> g = log_frequencies(1.0, 1e3, 4);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g.front(), 1.0);
    EXPECT_EQ(g.back(), 1e3);
    EXPECT_NEAR(g[1], 10.0, 1e-12);
    EXPECT_NEAR(g[2], 100.0, 1e-10);
    const std::vector<double> l = linear_frequencies(1.0, 3.0, 5);
    ASSERT_EQ(l.size(), 5u);
    EXPECT_NEAR(l[1], 1.5, 1e-15);
    EXPECT_EQ(log_frequencies(5.0, 5.0, 1), std::vector<double>{5.0});
    EXPECT_THROW(log_frequencies(0.0, 1.0, 3), ConfigError);
    EXPECT_THROW(log_frequencies(2.0, 1.0, 3), ConfigError);
    EXPECT_THROW(linear_frequencies(1.0, 2.0, 0), ConfigError);
}
