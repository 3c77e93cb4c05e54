#pragma once

#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "foilwind/assembly.hpp"
#include "foilwind/solver.hpp"

namespace foilwind {

// Greville abscissae followed by `uniform` equally spaced points, sorted.
std::vector<double> default_samples(const BSplineBasisd& basis, int uniform = 100);

// Phi(alpha) = sum_j u_j B_j(alpha). DomainError for samples outside the interval.
Eigen::VectorXcd voltage_profile(const Solution& s, const BSplineBasisd& basis,
                                 const std::vector<double>& alpha);

complex terminal_voltage(const AssembledSystem& system, const Solution& s);
complex impedance(const AssembledSystem& system, const Solution& s);

// Conductive current through the slice at each alpha,
// d_f * integral over the slice of sigma_par (-jw A + Phi chi) . chi.
Eigen::VectorXcd conductive_current_profile(const FoilModel& model, const Solution& s,
                                            const std::vector<double>& alpha);

// Capacitive current across the slice at each alpha,
// jw * integral over the slice of eps_hom (dPhi/dalpha / 2 + Phi / d_f).
// Zero for the standard model.
Eigen::VectorXcd capacitive_current_profile(const FoilModel& model, const Solution& s,
                                            const std::vector<double>& alpha);

// Measure of the slice at alpha: its length along gamma times l_z or 2 pi r.
double slice_measure(const FoilModel& model, double alpha);

struct CurrentProfiles {
    std::vector<double> alpha;
    Eigen::VectorXcd phi;
    Eigen::VectorXcd conductive;
    Eigen::VectorXcd capacitive;
};

CurrentProfiles current_profiles(const FoilModel& model, const Solution& s,
                                 const std::vector<double>& alpha);

// Spline projections r_i = (1/d_f) int B_i(alpha) (I_cond + I_cap - I) dalpha,
// evaluated from the field and voltage function at the winding quadrature
// points, relative to ||P I||.
double kirchhoff_residual(const FoilModel& model, const Solution& s);

struct ImpedancePoint {
    double frequency = 0.0;
    complex z;
    double magnitude() const { return std::abs(z); }
    // Degrees in (-180, 180].
    double phase_deg() const;
};

std::vector<ImpedancePoint> impedance_points(const SweepResult& sweep);

struct Polyline {
    std::vector<Eigen::Vector2d> points;
    double level = 0.0;
    bool closed = false;
};

// Marching-triangle iso-lines of a nodal field at n_levels values
// min + (max - min) k / (n_levels + 1), k = 1..n_levels. A constant field
// gives no lines.
std::vector<Polyline> contour_lines(const Mesh& mesh, const Eigen::VectorXd& values, int n_levels);

struct FluxContours {
    std::vector<Polyline> real;
    std::vector<Polyline> imag;
};

// Iso-lines of A_z (Cartesian) or psi = r A_phi (axisymmetric).
FluxContours flux_contours(const Mesh& mesh, const Solution& s, int n_levels);

// CSV export. Complex values use two columns; numbers are written in
// shortest round-trip form. Headers:
//   profiles: alpha,phi_re,phi_im,i_cond_re,i_cond_im,i_cap_re,i_cap_im
//   sweep:    frequency,z_re,z_im,z_abs,phase_deg,status
//   contours: part,polyline,level,closed,x,y
void write_profiles_csv(std::ostream& out, const CurrentProfiles& p);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
void write_contours_csv(std::ostream& out, const FluxContours& c);

struct SweepRow {
    double frequency = 0.0;
    complex z;
    double magnitude = 0.0;
    double phase_deg = 0.0;
    std::string status;
};

CurrentProfiles read_profiles_csv(std::istream& in);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

// Writes via a stream opened on `path`; IoError if the file cannot be written.
void write_file(const std::string& path, const std::string& content);

std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace foilwind
