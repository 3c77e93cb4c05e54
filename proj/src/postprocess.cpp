#include "foilwind/postprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "foilwind/errors.hpp"
#include "foilwind/quadrature.hpp"

namespace foilwind {

namespace {

constexpr int line_rule_points = 4;

complex field_at(const Mesh& mesh, const Solution& s, int t, const Eigen::Vector3d& bary) {
    complex v = 0.0;
    for (int k = 0; k < 3; ++k) {
        v += bary(k) * s.a(mesh.triangles(k, t));
    }
    return v;
}

// Out-of-plane vector potential component from the nodal unknown.
complex a_beta(const SymmetryMode& symmetry, const Eigen::Vector2d& p, complex nodal) {
    return symmetry.is_axisymmetric() ? nodal / p.x() : nodal;
}

void check_samples(const BSplineBasisd& basis, const std::vector<double>& alpha) {
    for (double a : alpha) {
        if (!(a >= basis.lower() && a <= basis.upper())) {
            throw DomainError("profile sample outside the winding alpha interval");
        }
    }
}

struct SlicePoint {
    int triangle;
    Eigen::Vector2d position;
    double weight;   // length along gamma
};

// Gauss points on the intersection of the winding with the line alpha = const.
// A triangle takes part when alpha lies in [amin, amax), or (amin, amax] at
// the upper end of the interval, so a line on mesh edges is counted once.
std::vector<SlicePoint> slice_points(const FoilModel& model, double alpha) {
    const Mesh& mesh = model.mesh;
    const FoilWinding& w = model.winding;
    const int ax = w.alpha_axis;
    const int gx = 1 - ax;
    const double origin = w.alpha_origin();
    const bool at_upper = alpha >= w.alpha_max();
    const GaussRule g = gauss_legendre(line_rule_points);

    std::vector<SlicePoint> out;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.regions[static_cast<std::size_t>(t)] != Region::FoilWinding) {
            continue;
        }
        double amin = std::numeric_limits<double>::max();
        double amax = std::numeric_limits<double>::lowest();
        std::array<Eigen::Vector2d, 3> p;
        for (int k = 0; k < 3; ++k) {
            p[static_cast<std::size_t>(k)] = mesh.node(mesh.triangles(k, t));
            amin = std::min(amin, p[static_cast<std::size_t>(k)](ax) - origin);
            amax = std::max(amax, p[static_cast<std::size_t>(k)](ax) - origin);
        }
        const bool take = at_upper ? (alpha > amin && alpha <= amax) : (alpha >= amin && alpha < amax);
        if (!take) {
            continue;
        }
        double lo = std::numeric_limits<double>::max();
        double hi = std::numeric_limits<double>::lowest();
        for (int k = 0; k < 3; ++k) {
            const Eigen::Vector2d& a = p[static_cast<std::size_t>(k)];
            const Eigen::Vector2d& b = p[static_cast<std::size_t>((k + 1) % 3)];
            const double fa = a(ax) - origin - alpha;
            const double fb = b(ax) - origin - alpha;
            if (fa == 0.0) {
                lo = std::min(lo, a(gx));
                hi = std::max(hi, a(gx));
            }
            if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
                const double y = a(gx) + fa / (fa - fb) * (b(gx) - a(gx));
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
        }
        if (!(hi > lo)) {
            continue;
        }
        for (int q = 0; q < g.nodes.size(); ++q) {
            SlicePoint sp;
            sp.triangle = t;
            sp.position(ax) = origin + alpha;
            sp.position(gx) = lo + g.nodes(q) * (hi - lo);
            sp.weight = g.weights(q) * (hi - lo);
            out.push_back(sp);
        }
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream iss(line);
    while (std::getline(iss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

std::vector<double> default_samples(const BSplineBasisd& basis, int uniform) {
    const Eigen::VectorXd g = basis.greville();
    std::vector<double> out(g.data(), g.data() + g.size());
    for (int k = 0; k < uniform; ++k) {
        const double t = uniform == 1 ? 0.5 : static_cast<double>(k) / (uniform - 1);
        out.push_back(basis.lower() + t * (basis.upper() - basis.lower()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::VectorXcd voltage_profile(const Solution& s, const BSplineBasisd& basis,
                                 const std::vector<double>& alpha) {
    check_samples(basis, alpha);
    Eigen::VectorXcd phi(static_cast<Eigen::Index>(alpha.size()));
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        phi(static_cast<Eigen::Index>(k)) = basis.eval_all(alpha[k]).cast<complex>().dot(s.u);
    }
    return phi;
}

complex terminal_voltage(const AssembledSystem& system, const Solution& s) {
    return system.P.cast<complex>().dot(s.u);
}

complex impedance(const AssembledSystem& system, const Solution& s) {
    if (s.current == complex(0.0, 0.0)) {
        throw DomainError("impedance undefined for zero current");
    }
    return terminal_voltage(system, s) / s.current;
}

double slice_measure(const FoilModel& model, double alpha) {
    check_samples(model.basis, {alpha});
    double m = 0.0;
    for (const SlicePoint& sp : slice_points(model, alpha)) {
        m += sp.weight * volume_weight(model.symmetry, sp.position);
    }
    return m;
}

Eigen::VectorXcd conductive_current_profile(const FoilModel& model, const Solution& s,
                                            const std::vector<double>& alpha) {
    check_samples(model.basis, alpha);
    const Eigen::VectorXcd phi = voltage_profile(s, model.basis, alpha);
    const double sigma = model.tensors().sigma_par;
    const double df = model.winding.foil_thickness();
    const complex jw(0.0, s.omega);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(alpha.size()));
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        complex sum = 0.0;
        for (const SlicePoint& sp : slice_points(model, alpha[k])) {
            const Eigen::Vector3d bary = barycentric(model.mesh, sp.triangle, sp.position);
            const complex a = a_beta(model.symmetry, sp.position, field_at(model.mesh, s, sp.triangle, bary));
            const double vol = volume_weight(model.symmetry, sp.position);
            sum += sp.weight * sigma * (-jw * a + phi(static_cast<Eigen::Index>(k)) / vol);
        }
        out(static_cast<Eigen::Index>(k)) = df * sum;
    }
    return out;
}

Eigen::VectorXcd capacitive_current_profile(const FoilModel& model, const Solution& s,
                                            const std::vector<double>& alpha) {
    check_samples(model.basis, alpha);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(alpha.size()));
    if (s.model == ModelKind::Standard) {
        return out;
    }
    const double eps = model.tensors().eps_hom;
    const double df = model.winding.foil_thickness();
    const complex jw(0.0, s.omega);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        const complex phi = model.basis.eval_all(alpha[k]).cast<complex>().dot(s.u);
        const complex dphi = model.basis.eval_deriv_all(alpha[k]).cast<complex>().dot(s.u);
        out(static_cast<Eigen::Index>(k)) =
            jw * eps * (0.5 * dphi + phi / df) * slice_measure(model, alpha[k]);
    }
    return out;
}

CurrentProfiles current_profiles(const FoilModel& model, const Solution& s,
                                 const std::vector<double>& alpha) {
    CurrentProfiles p;
    p.alpha = alpha;
    p.phi = voltage_profile(s, model.basis, alpha);
    p.conductive = conductive_current_profile(model, s, alpha);
    p.capacitive = capacitive_current_profile(model, s, alpha);
    return p;
}

double kirchhoff_residual(const FoilModel& model, const Solution& s) {
    using ext = std::complex<long double>;
    const BSplineBasisd& basis = model.basis;
    const std::vector<WindingQuadPoint> points = winding_quadrature(model.mesh, model.winding, basis);
    const long double sigma = model.tensors().sigma_par;
    const long double eps = s.model == ModelKind::Capacitive ? model.tensors().eps_hom : 0.0;
    const long double df = model.winding.foil_thickness();
    const ext jw(0.0L, s.omega);
    const bool axi = model.symmetry.is_axisymmetric();

    // accumulated in extended precision, the current terms nearly cancel near resonance
    std::vector<ext> r(static_cast<std::size_t>(basis.size()), ext(0.0L));
    for (const WindingQuadPoint& q : points) {
        const int first = q.span - BSplineBasisd::degree;
        ext phi = 0.0L;
        ext dphi = 0.0L;
        for (int j = first; j <= q.span; ++j) {
            const ext u(s.u(j).real(), s.u(j).imag());
            phi += static_cast<long double>(basis.eval_on_span(j, q.span, q.alpha)) * u;
            dphi += static_cast<long double>(basis.eval_deriv_on_span(j, q.span, q.alpha)) * u;
        }
        ext a = 0.0L;
        for (int k = 0; k < 3; ++k) {
            const complex nodal = s.a(model.mesh.triangles(k, q.triangle));
            a += static_cast<long double>(q.bary(k)) * ext(nodal.real(), nodal.imag());
        }
        if (axi) {
            a /= static_cast<long double>(q.position.x());
        }
        const long double vol = volume_weight(model.symmetry, q.position);
        const ext cond = df * sigma * (-jw * a + phi / vol);
        const ext cap = jw * eps * vol * (0.5L * dphi + phi / df);
        for (int i = first; i <= q.span; ++i) {
            r[static_cast<std::size_t>(i)] +=
                static_cast<long double>(q.weight * basis.eval_on_span(i, q.span, q.alpha)) * (cond + cap) / df;
        }
    }
    long double diff = 0.0L;
    long double ref = 0.0L;
    const ext current(s.current.real(), s.current.imag());
    for (int i = 0; i < basis.size(); ++i) {
        const ext pi_i = static_cast<long double>(basis.integral(i)) / df * current;
        diff += std::norm(r[static_cast<std::size_t>(i)] - pi_i);
        ref += std::norm(pi_i);
    }
    return static_cast<double>(std::sqrt(diff / ref));
}

double ImpedancePoint::phase_deg() const {
    double p = std::arg(z) * 180.0 / pi;
    if (p <= -180.0) {
        p += 360.0;
    }
    return p;
}

std::vector<ImpedancePoint> impedance_points(const SweepResult& sweep) {
    std::vector<ImpedancePoint> out;
    for (const SweepEntry& e : sweep.entries) {
        if (e.solution) {
            out.push_back({e.frequency, e.solution->impedance()});
        }
    }
    return out;
}

std::vector<Polyline> contour_lines(const Mesh& mesh, const Eigen::VectorXd& values, int n_levels) {
    std::vector<Polyline> lines;
    if (values.size() == 0 || n_levels < 1) {
        return lines;
    }
    const double vmin = values.minCoeff();
    const double vmax = values.maxCoeff();
    if (!(vmax > vmin)) {
        return lines;
    }
    using EdgeKey = std::pair<int, int>;
    struct Segment {
        std::array<EdgeKey, 2> edges;
        std::array<Eigen::Vector2d, 2> points;
    };

    for (int level_index = 1; level_index <= n_levels; ++level_index) {
        const double level = vmin + (vmax - vmin) * level_index / (n_levels + 1);
        std::vector<Segment> segments;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            std::array<int, 3> n{mesh.triangles(0, t), mesh.triangles(1, t), mesh.triangles(2, t)};
            std::array<bool, 3> above{};
            for (int k = 0; k < 3; ++k) {
                above[static_cast<std::size_t>(k)] = values(n[static_cast<std::size_t>(k)]) >= level;
            }
            if (above[0] == above[1] && above[1] == above[2]) {
                continue;
            }
            Segment seg;
            int found = 0;
            for (int k = 0; k < 3 && found < 2; ++k) {
                const int i = n[static_cast<std::size_t>(k)];
                const int j = n[static_cast<std::size_t>((k + 1) % 3)];
                if (above[static_cast<std::size_t>(k)] == above[static_cast<std::size_t>((k + 1) % 3)]) {
                    continue;
                }
                const double s = (level - values(i)) / (values(j) - values(i));
                seg.edges[static_cast<std::size_t>(found)] = {std::min(i, j), std::max(i, j)};
                seg.points[static_cast<std::size_t>(found)] = mesh.node(i) + s * (mesh.node(j) - mesh.node(i));
                ++found;
            }
            segments.push_back(seg);
        }

        std::map<EdgeKey, std::vector<int>> by_edge;
        for (std::size_t k = 0; k < segments.size(); ++k) {
            for (const EdgeKey& e : segments[k].edges) {
                by_edge[e].push_back(static_cast<int>(k));
            }
        }
        std::vector<bool> used(segments.size(), false);

        // Follows the chain from segment `start` leaving through edge `exit`.
        auto walk = [&](int start, EdgeKey exit, std::vector<Eigen::Vector2d>& pts) {
            int current = start;
            while (true) {
                int next = -1;
                for (int cand : by_edge[exit]) {
                    if (cand != current && !used[static_cast<std::size_t>(cand)]) {
                        next = cand;
                        break;
                    }
                }
                if (next < 0) {
                    return exit;
                }
                used[static_cast<std::size_t>(next)] = true;
                const Segment& s = segments[static_cast<std::size_t>(next)];
                const int side = s.edges[0] == exit ? 1 : 0;
                pts.push_back(s.points[static_cast<std::size_t>(side)]);
                exit = s.edges[static_cast<std::size_t>(side)];
                current = next;
            }
        };

        for (std::size_t k = 0; k < segments.size(); ++k) {
            if (used[k]) {
                continue;
            }
            used[k] = true;
            const Segment& s = segments[k];
            std::vector<Eigen::Vector2d> forward{s.points[0], s.points[1]};
            const EdgeKey end = walk(static_cast<int>(k), s.edges[1], forward);
            Polyline line;
            line.level = level;
            if (end == s.edges[0]) {
                line.closed = true;
                line.points = std::move(forward);
            } else {
                std::vector<Eigen::Vector2d> backward;
                walk(static_cast<int>(k), s.edges[0], backward);
                std::reverse(backward.begin(), backward.end());
                backward.insert(backward.end(), forward.begin(), forward.end());
                line.points = std::move(backward);
            }
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

FluxContours flux_contours(const Mesh& mesh, const Solution& s, int n_levels) {
    FluxContours c;
    c.real = contour_lines(mesh, s.a.real(), n_levels);
    c.imag = contour_lines(mesh, s.a.imag(), n_levels);
    return c;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("not a number: '" + s + "'");
    }
    return v;
}

void write_profiles_csv(std::ostream& out, const CurrentProfiles& p) {
    out << "alpha,phi_re,phi_im,i_cond_re,i_cond_im,i_cap_re,i_cap_im\n";
    for (std::size_t k = 0; k < p.alpha.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        out << format_double(p.alpha[k]) << ',' << format_double(p.phi(i).real()) << ','
            << format_double(p.phi(i).imag()) << ',' << format_double(p.conductive(i).real()) << ','
            << format_double(p.conductive(i).imag()) << ',' << format_double(p.capacitive(i).real())
            << ',' << format_double(p.capacitive(i).imag()) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    out << "frequency,z_re,z_im,z_abs,phase_deg,status\n";
    for (const SweepEntry& e : sweep.entries) {
        out << format_double(e.frequency) << ',';
        if (e.solution) {
            const ImpedancePoint p{e.frequency, e.solution->impedance()};
            out << format_double(p.z.real()) << ',' << format_double(p.z.imag()) << ','
                << format_double(p.magnitude()) << ',' << format_double(p.phase_deg()) << ",ok\n";
        } else {
            out << "nan,nan,nan,nan," << sanitize(e.error) << '\n';
        }
    }
}

void write_contours_csv(std::ostream& out, const FluxContours& c) {
    out << "part,polyline,level,closed,x,y\n";
    auto emit = [&](const char* part, const std::vector<Polyline>& lines) {
        for (std::size_t k = 0; k < lines.size(); ++k) {
            for (const Eigen::Vector2d& p : lines[k].points) {
                out << part << ',' << k << ',' << format_double(lines[k].level) << ','
                    << (lines[k].closed ? 1 : 0) << ',' << format_double(p.x()) << ','
                    << format_double(p.y()) << '\n';
            }
        }
    };
    emit("re", c.real);
    emit("im", c.imag);
}

CurrentProfiles read_profiles_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "alpha,phi_re,phi_im,i_cond_re,i_cond_im,i_cap_re,i_cap_im") {
        throw FormatError("unexpected profiles header");
    }
    std::vector<std::array<double, 7>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != 7) {
            throw FormatError("profiles row needs 7 columns: " + line);
        }
        std::array<double, 7> r{};
        for (std::size_t k = 0; k < 7; ++k) r[k] = parse_double(cells[k]);
        rows.push_back(r);
    }
    CurrentProfiles p;
    const auto n = static_cast<Eigen::Index>(rows.size());
    p.phi.resize(n);
    p.conductive.resize(n);
    p.capacitive.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& r = rows[static_cast<std::size_t>(k)];
        p.alpha.push_back(r[0]);
        p.phi(k) = {r[1], r[2]};
        p.conductive(k) = {r[3], r[4]};
        p.capacitive(k) = {r[5], r[6]};
    }
    return p;
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "frequency,z_re,z_im,z_abs,phase_deg,status") {
        throw FormatError("unexpected sweep header");
    }
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != 6) {
            throw FormatError("sweep row needs 6 columns: " + line);
        }
        SweepRow r;
        r.frequency = parse_double(cells[0]);
        r.z = {parse_double(cells[1]), parse_double(cells[2])};
        r.magnitude = parse_double(cells[3]);
        r.phase_deg = parse_double(cells[4]);
        r.status = cells[5];
        rows.push_back(r);
    }
    return rows;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << content;
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

}  // namespace foilwind
