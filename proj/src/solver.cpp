#include "foilwind/solver.hpp"

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

#include "foilwind/errors.hpp"

namespace foilwind {

namespace {

using ComplexSparse = Eigen::SparseMatrix<complex>;
using ComplexTriplets = std::vector<Eigen::Triplet<complex>>;

constexpr double residual_tolerance = 1e-9;
constexpr int refinement_steps = 4;

}  // namespace

std::string to_string(ModelKind m) {
    return m == ModelKind::Standard ? "standard" : "capacitive";
}

double Solution::frequency() const { return omega / (2.0 * pi); }

complex Solution::impedance() const {
    if (current == complex(0.0, 0.0)) {
        throw DomainError("impedance undefined for zero current");
    }
    return voltage / current;
}

struct FrequencySolver::Factorization {
    Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    bool valid = false;
    double omega = -1.0;
    SparseMatrix Kf;            // blocks restricted to free field nodes
    SparseMatrix Mf;
    SparseMatrix Xf;
    ComplexSparse F;            // Kf + jw Mf
    Eigen::VectorXd scale;      // symmetric diagonal scaling of F
    Eigen::MatrixXcd Y;         // F^-1 Xf

    Eigen::VectorXcd field_solve(const Eigen::VectorXcd& b) const {
        const Eigen::VectorXcd y = lu.solve(scale.cast<complex>().asDiagonal() * b);
        return scale.cast<complex>().asDiagonal() * y;
    }
};

namespace {

using ExtComplex = std::complex<long double>;
using ExtVector = Eigen::Matrix<ExtComplex, Eigen::Dynamic, 1>;

// y += c * A x, accumulated in extended precision
void add_product(ExtVector& y, const SparseMatrix& A, const ExtVector& x, ExtComplex c) {
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            y(it.row()) += c * static_cast<long double>(it.value()) * x(it.col());
        }
    }
}

void add_transposed_product(ExtVector& y, const SparseMatrix& A, const ExtVector& x, ExtComplex c) {
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            y(it.col()) += c * static_cast<long double>(it.value()) * x(it.row());
        }
    }
}

SparseMatrix restrict_rows(const SparseMatrix& A, const std::vector<int>& index, int n, bool columns) {
    std::vector<Eigen::Triplet<double>> entries;
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
            const int i = index[static_cast<std::size_t>(it.row())];
            const int j = columns ? index[static_cast<std::size_t>(it.col())] : static_cast<int>(it.col());
            if (i >= 0 && j >= 0) entries.emplace_back(i, j, it.value());
        }
    }
    SparseMatrix out(n, columns ? n : A.cols());
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

}  // namespace

FrequencySolver::FrequencySolver(const AssembledSystem& system)
    : system_(system), f_(std::make_unique<Factorization>()) {
    free_index_.assign(system.dirichlet.size(), -1);
    for (std::size_t i = 0; i < system.dirichlet.size(); ++i) {
        if (!system.dirichlet[i]) {
            free_index_[i] = num_free_++;
        }
    }
    f_->Kf = restrict_rows(system.K, free_index_, num_free_, true);
    f_->Mf = restrict_rows(system.M, free_index_, num_free_, true);
    f_->Xf = restrict_rows(system.X, free_index_, num_free_, false);
}

FrequencySolver::~FrequencySolver() = default;

void FrequencySolver::factor(double omega) {
    Factorization& f = *f_;
    if (f.valid && f.omega == omega) {
        return;
    }
    f.valid = false;
    // M entries are kept at omega = 0 so the pattern does not change
    ComplexSparse jwM = f.Mf.cast<complex>() * complex(0.0, omega);
    f.F = f.Kf.cast<complex>() + jwM;
    f.F.makeCompressed();

    f.scale.resize(num_free_);
    for (int i = 0; i < num_free_; ++i) {
        const double d = std::abs(f.F.coeff(i, i));
        if (!(d > 0.0)) {
            throw SolverError("field block has a zero diagonal entry; a node is not coupled");
        }
        f.scale(i) = 1.0 / std::sqrt(d);
    }
    ComplexSparse scaled = f.scale.cast<complex>().asDiagonal() * f.F * f.scale.cast<complex>().asDiagonal();
    scaled.makeCompressed();
    if (!f.analyzed) {
        f.lu.analyzePattern(scaled);
        f.analyzed = true;
    }
    f.lu.factorize(scaled);
    if (f.lu.info() != Eigen::Success) {
        throw SolverError("field block singular at omega = " + std::to_string(omega) + ": " +
                          f.lu.lastErrorMessage());
    }
    const int nu = system_.num_voltage();
    f.Y.resize(num_free_, nu);
    for (int j = 0; j < nu; ++j) {
        f.Y.col(j) = f.field_solve(Eigen::VectorXd(f.Xf.col(j)).cast<complex>());
    }
    f.omega = omega;
    f.valid = true;
}

Solution FrequencySolver::solve(double omega, const Drive& drive, ModelKind model) {
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw DomainError("angular frequency must be finite and non-negative");
    }
    factor(omega);
    const Factorization& f = *f_;
    const bool voltage_drive = std::holds_alternative<VoltageDrive>(drive);
    const complex jw(0.0, omega);
    const ExtComplex ext_jw(0.0L, static_cast<long double>(omega));
    const int nf = num_free_;
    const int nu = system_.num_voltage();
    const int nb = nu + (voltage_drive ? 1 : 0);

    Eigen::MatrixXcd W = system_.G.cast<complex>();
    if (model == ModelKind::Capacitive) {
        W += jw * (system_.C_prime + system_.C_dprime).cast<complex>();
    }
    Eigen::Matrix<ExtComplex, Eigen::Dynamic, Eigen::Dynamic> ext_W =
        system_.G.cast<long double>().cast<ExtComplex>();
    if (model == ModelKind::Capacitive) {
        ext_W += ext_jw * (system_.C_prime.cast<long double>() + system_.C_dprime.cast<long double>())
                              .cast<ExtComplex>();
    }
    const Eigen::VectorXcd P = system_.P.cast<complex>();
    const ExtVector ext_P = system_.P.cast<long double>().cast<ExtComplex>();

    // bordered Schur complement
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(nb, nb);
    S.topLeftCorner(nu, nu) = W - jw * (f.Xf.transpose() * f.Y);
    if (voltage_drive) {
        S.block(0, nu, nu, 1) = -P;
        S.block(nu, 0, 1, nu) = P.transpose();
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> slu(S);
    if (slu.rank() < nb) {
        throw SolverError("voltage-function system singular at omega = " + std::to_string(omega) +
                          " (rank " + std::to_string(slu.rank()) + " of " + std::to_string(nb) + ")");
    }

    ExtVector js = ExtVector::Zero(nf);
    for (std::size_t i = 0; i < free_index_.size(); ++i) {
        if (free_index_[i] >= 0) js(free_index_[i]) = system_.js(static_cast<Eigen::Index>(i));
    }
    ExtVector rhs2 = ExtVector::Zero(nb);
    if (voltage_drive) {
        const complex U = std::get<VoltageDrive>(drive).voltage;
        rhs2(nu) = ExtComplex(U.real(), U.imag());
    } else {
        const complex I = std::get<CurrentDrive>(drive).current;
        rhs2.head(nu) = ext_P * ExtComplex(I.real(), I.imag());
    }

    // correction (da, dv) for the residual (b1, b2)
    auto block_solve = [&](const ExtVector& b1, const ExtVector& b2, ExtVector& da, ExtVector& dv) {
        const Eigen::VectorXcd y = f.field_solve(b1.cast<complex>());
        Eigen::VectorXcd r = b2.cast<complex>();
        r.head(nu) += jw * (f.Xf.transpose() * y);
        const Eigen::VectorXcd v = slu.solve(r);
        da = (y + f.Y * v.head(nu)).cast<ExtComplex>();
        dv = v.cast<ExtComplex>();
    };
    auto residual_of = [&](const ExtVector& a, const ExtVector& v, ExtVector& r1, ExtVector& r2) {
        r1 = js;
        add_product(r1, f.Kf, a, -1.0L);
        add_product(r1, f.Mf, a, -ext_jw);
        add_product(r1, f.Xf, v.head(nu), 1.0L);
        r2 = rhs2;
        ExtVector xa = ExtVector::Zero(nu);
        add_transposed_product(xa, f.Xf, a, 1.0L);
        r2.head(nu) += ext_jw * xa - ext_W * v.head(nu);
        if (voltage_drive) {
            r2.head(nu) += ext_P * v(nu);
            r2(nu) -= (ext_P.transpose() * v.head(nu))(0);
        }
    };
    auto norm = [](const ExtVector& x, const ExtVector& y) {
        return static_cast<double>(std::sqrt(x.squaredNorm() + y.squaredNorm()));
    };

    const double rhs_norm = norm(js, rhs2);
    ExtVector a = ExtVector::Zero(nf);
    ExtVector v = ExtVector::Zero(nb);
    ExtVector r1 = js;
    ExtVector r2 = rhs2;
    double residual = 1.0;
    for (int step = 0; step <= refinement_steps; ++step) {
        ExtVector da;
        ExtVector dv;
        block_solve(r1, r2, da, dv);
        const ExtVector a_new = a + da;
        const ExtVector v_new = v + dv;
        ExtVector n1;
        ExtVector n2;
        residual_of(a_new, v_new, n1, n2);
        const double next = norm(n1, n2) / rhs_norm;
        if (!std::isfinite(next)) {
            throw SolverError("block system solve produced non-finite values", next);
        }
        if (step > 0 && !(next < residual)) {
            break;
        }
        a = a_new;
        v = v_new;
        r1 = std::move(n1);
        r2 = std::move(n2);
        residual = next;
        if (residual < 1e-18) {
            break;
        }
    }
    if (residual > residual_tolerance) {
        throw SolverError("block system residual " + std::to_string(residual) + " exceeds tolerance",
                          residual);
    }

    Solution s;
    s.omega = omega;
    s.model = model;
    s.drive = drive;
    s.residual = residual;
    s.a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(free_index_.size()));
    for (std::size_t i = 0; i < free_index_.size(); ++i) {
        if (free_index_[i] >= 0) s.a(static_cast<Eigen::Index>(i)) = a(free_index_[i]);
    }
    s.u = v.head(nu).cast<complex>();
    s.voltage = P.dot(s.u);
    s.current = voltage_drive ? complex(v(nu)) : std::get<CurrentDrive>(drive).current;
    return s;
}

Solution solve_frequency(const AssembledSystem& system, double omega, const Drive& drive,
                         ModelKind model) {
    FrequencySolver solver(system);
    return solver.solve(omega, drive, model);
}

std::vector<SweepResult> sweep(const AssembledSystem& system, const std::vector<double>& frequencies,
                               const Drive& drive, const std::vector<ModelKind>& models) {
    if (frequencies.empty()) {
        throw ConfigError("frequency sweep needs at least one frequency");
    }
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        if (!(frequencies[k] > 0.0)) {
            throw ConfigError("sweep frequencies must be positive");
        }
        if (k > 0 && frequencies[k] < frequencies[k - 1]) {
            throw ConfigError("sweep frequencies must be sorted");
        }
    }
    FrequencySolver solver(system);
    std::vector<SweepResult> results(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
        results[m].model = models[m];
    }
    for (double f : frequencies) {
        for (std::size_t m = 0; m < models.size(); ++m) {
            SweepEntry e;
            e.frequency = f;
            try {
                e.solution = solver.solve(2.0 * pi * f, drive, models[m]);
            } catch (const Error& ex) {
                e.error = ex.what();
            }
            results[m].entries.push_back(std::move(e));
        }
    }
    return results;
}

SweepResult sweep(const AssembledSystem& system, const std::vector<double>& frequencies,
                  const Drive& drive, ModelKind model) {
    return sweep(system, frequencies, drive, std::vector<ModelKind>{model}).front();
}

std::vector<double> log_frequencies(double f_min, double f_max, int points) {
    if (!(f_min > 0.0) || !(f_max >= f_min) || points < 1) {
        throw ConfigError("logarithmic grid needs 0 < f_min <= f_max and at least one point");
    }
    std::vector<double> f(static_cast<std::size_t>(points));
    const double a = std::log10(f_min);
    const double b = std::log10(f_max);
    for (int k = 0; k < points; ++k) {
        f[static_cast<std::size_t>(k)] = points == 1 ? f_min : std::pow(10.0, a + (b - a) * k / (points - 1));
    }
    f.front() = f_min;
    f.back() = points == 1 ? f_min : f_max;
    return f;
}

std::vector<double> linear_frequencies(double f_min, double f_max, int points) {
    if (!(f_min > 0.0) || !(f_max >= f_min) || points < 1) {
        throw ConfigError("linear grid needs 0 < f_min <= f_max and at least one point");
    }
    std::vector<double> f(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        f[static_cast<std::size_t>(k)] = points == 1 ? f_min : f_min + (f_max - f_min) * k / (points - 1);
    }
    return f;
}

double current_condition_residual(const AssembledSystem& system, const Solution& s) {
    const ExtComplex jw(0.0L, s.omega);
    const int n = system.num_voltage();
    const ExtVector a = s.a.cast<ExtComplex>();
    const ExtVector u = s.u.cast<ExtComplex>();
    const ExtComplex current(s.current.real(), s.current.imag());
    ExtVector xa = ExtVector::Zero(n);
    add_transposed_product(xa, system.X, a, 1.0L);
    long double diff = 0.0L;
    long double ref = 0.0L;
    for (int i = 0; i < n; ++i) {
        ExtComplex r = -jw * xa(i);
        for (int j = 0; j < n; ++j) {
            ExtComplex w = static_cast<long double>(system.G(i, j));
            if (s.model == ModelKind::Capacitive) {
                w += jw * (static_cast<long double>(system.C_prime(i, j)) +
                           static_cast<long double>(system.C_dprime(i, j)));
            }
            r += w * u(j);
        }
        const ExtComplex pi_i = static_cast<long double>(system.P(i)) * current;
        diff += std::norm(r - pi_i);
        ref += std::norm(pi_i);
    }
    return static_cast<double>(std::sqrt(diff / ref));
}

}  // namespace foilwind
