#pragma once

#include <Eigen/Core>

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "foilwind/assembly.hpp"

namespace foilwind {

using complex = std::complex<double>;

enum class ModelKind { Standard, Capacitive };

std::string to_string(ModelKind m);

struct CurrentDrive {
    complex current{1.0, 0.0};
};

struct VoltageDrive {
    complex voltage{1.0, 0.0};
};

using Drive = std::variant<CurrentDrive, VoltageDrive>;

struct Solution {
    Eigen::VectorXcd a;   // all field nodes, Dirichlet entries zero
    Eigen::VectorXcd u;
    double omega = 0.0;
    ModelKind model = ModelKind::Capacitive;
    Drive drive;
    complex voltage;
    complex current;
    double residual = 0.0;   // relative residual of the full block system

    double frequency() const;
    complex impedance() const;
};

// Solves
//   [ K + jw M      -X                  ] [a]   [js   ]
//   [ -jw X^T       G + jw (C' + C'')   ] [u] = [P I  ]
// with the capacitive blocks dropped for the standard model. A voltage drive
// adds the current as unknown and the row P^T u = U.
//
// The field block F = K + jw M (Dirichlet rows removed) is factored by sparse
// LU and the voltage-function unknowns are found from the dense Schur
// complement G + jw C - jw X^T F^-1 X. The factorization of the last
// frequency is kept, so solving both models at one frequency factors once.
// The answer is improved by iterative refinement on the full block system.
class FrequencySolver {
public:
    explicit FrequencySolver(const AssembledSystem& system);
    ~FrequencySolver();
    FrequencySolver(const FrequencySolver&) = delete;
    FrequencySolver& operator=(const FrequencySolver&) = delete;

    // Throws DomainError for negative omega and SolverError when the system
    // is singular or the refined residual stays above tolerance.
    Solution solve(double omega, const Drive& drive, ModelKind model);

    const AssembledSystem& system() const { return system_; }

private:
    struct Factorization;

    void factor(double omega);

    const AssembledSystem& system_;
    std::vector<int> free_index_;   // field node -> reduced index or -1
    int num_free_ = 0;
    std::unique_ptr<Factorization> f_;
};

Solution solve_frequency(const AssembledSystem& system, double omega, const Drive& drive,
                         ModelKind model);

struct SweepEntry {
    double frequency = 0.0;
    std::optional<Solution> solution;
    std::string error;
};

struct SweepResult {
    ModelKind model = ModelKind::Capacitive;
    std::vector<SweepEntry> entries;
};

// Throws ConfigError for an empty, non-positive or unsorted frequency list.
// Failures at single frequencies are recorded in the entry.
SweepResult sweep(const AssembledSystem& system, const std::vector<double>& frequencies,
                  const Drive& drive, ModelKind model);

// One result per model, sharing the field factorization at every frequency.
std::vector<SweepResult> sweep(const AssembledSystem& system, const std::vector<double>& frequencies,
                               const Drive& drive, const std::vector<ModelKind>& models);

std::vector<double> log_frequencies(double f_min, double f_max, int points);
std::vector<double> linear_frequencies(double f_min, double f_max, int points);

// Second block row residual ||-jw X^T a + (G + jw C) u - P I|| / ||P I||.
double current_condition_residual(const AssembledSystem& system, const Solution& s);

}  // namespace foilwind
