#include "foilwind/cli.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "foilwind/config.hpp"
#include "foilwind/constants.hpp"
#include "foilwind/errors.hpp"
#include "foilwind/oracle.hpp"
#include "foilwind/postprocess.hpp"
#include "foilwind/winding.hpp"

#ifndef FOILWIND_VERSION
#define FOILWIND_VERSION "0.0.0"
#endif

namespace foilwind {

namespace {

using json = nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

json yaml_to_json(const YAML::Node& n) {
    if (n.IsMap()) {
        json obj = json::object();
        for (const auto& kv : n) {
            obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
        }
        return obj;
    }
    if (n.IsSequence()) {
        json arr = json::array();
        for (const YAML::Node& item : n) {
            arr.push_back(yaml_to_json(item));
        }
        return arr;
    }
    if (n.IsScalar()) {
        const std::string s = n.Scalar();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size()) {
            return v;
        }
        return s;
    }
    return nullptr;
}

json complex_json(complex z) {
    return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)},
            {"phase_deg", ImpedancePoint{0.0, z}.phase_deg()}};
}

std::string model_file(const std::string& stem, ModelKind m) {
    return stem + "_" + to_string(m) + ".csv";
}

// Coarse cell count of the tensor grid generated for a layout.
double estimated_elements(const RectLayout& layout, double h) {
    std::set<double> xs;
    std::set<double> ys;
    for (const LayoutRect& r : layout.rects) {
        xs.insert(r.x0);
        xs.insert(r.x1);
        ys.insert(r.y0);
        ys.insert(r.y1);
    }
    auto cells = [h](const std::set<double>& s) {
        double n = 0.0;
        for (auto it = std::next(s.begin()); it != s.end(); ++it) {
            n += std::ceil((*it - *std::prev(it)) / h);
        }
        return n;
    };
    return 2.0 * cells(xs) * cells(ys);
}

class Run {
public:
    Run(const RunOptions& o, std::ostream& log, std::ostream& err) : opt_(o), log_(log), err_(err) {}

    int execute() {
        const auto t0 = clock_type::now();
        manifest_["command"] = opt_.command;
        manifest_["config_path"] = opt_.config_path;
        int code = exit_success;
        try {
            code = dispatch();
        } catch (const SolverError& e) {
            return fail(exit_solver_error, "solver error", e.what());
        } catch (const IoError& e) {
            return fail(exit_io_error, "io error", e.what());
        } catch (const Error& e) {
            return fail(exit_config_error, "config error", e.what());
        } catch (const std::exception& e) {
            return fail(exit_io_error, "error", e.what());
        }
        timings_["total"] = seconds_since(t0);
        manifest_["timings_s"] = timings_;
        manifest_["exit_code"] = code;
        try {
            write_output("manifest.json", manifest_.dump(2) + "\n");
        } catch (const IoError& e) {
            err_ << "io error: " << e.what() << '\n';
            return exit_io_error;
        }
        return code;
    }

private:
    int fail(int code, const std::string& kind, const std::string& what) {
        err_ << kind << ": " << what << '\n';
        if (!out_dir_.empty()) {
            manifest_["exit_code"] = code;
            manifest_["error"] = what;
            manifest_["timings_s"] = timings_;
            try {
                write_output("manifest.json", manifest_.dump(2) + "\n");
            } catch (const IoError&) {
            }
        }
        return code;
    }

    int dispatch() {
        static const std::set<std::string> commands = {"solve", "sweep", "profiles", "oracle-compare",
                                                       "dump-matrices"};
        if (commands.count(opt_.command) == 0) {
            throw ConfigError("unknown command '" + opt_.command + "'");
        }
        if ((opt_.command == "solve" || opt_.command == "profiles") && !opt_.frequency) {
            throw ConfigError(opt_.command + " needs --freq");
        }
        if (opt_.frequency && !(*opt_.frequency >= 0.0 && std::isfinite(*opt_.frequency))) {
            throw ConfigError("--freq must be finite and non-negative");
        }

        auto t = clock_type::now();
        config_ = load_config(opt_.config_path);
        manifest_["config"] = yaml_to_json(YAML::Load(config_.source_text));
        prepare_output_dir();
        manifest_["output_directory"] = out_dir_.string();
        manifest_["versions"] = {{"foilwind", FOILWIND_VERSION},
                                 {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                               std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                               std::to_string(EIGEN_MINOR_VERSION)},
                                 {"compiler", __VERSION__}};
        timings_["config"] = seconds_since(t);

        t = clock_type::now();
        model_ = build_model(config_);
        timings_["mesh"] = seconds_since(t);
        manifest_["mesh"] = {{"nodes", model_.mesh.num_nodes()}, {"triangles", model_.mesh.num_triangles()}};

        double f_max = opt_.frequency.value_or(0.0);
        if (opt_.command == "sweep" || opt_.command == "oracle-compare") {
            f_max = config_.sweep.f_max;
        }
        json warnings = json::array();
        for (const std::string& w : assumption_warnings(model_.winding, config_.materials.foil, f_max)) {
            err_ << "warning: " << w << '\n';
            warnings.push_back(w);
        }
        manifest_["warnings"] = warnings;

        t = clock_type::now();
        system_ = assemble_system(model_);
        timings_["assembly"] = seconds_since(t);
        manifest_["unknowns"] = {{"field", system_.num_field()}, {"voltage", system_.num_voltage()}};
        log_ << "mesh: " << model_.mesh.num_triangles() << " triangles, " << model_.mesh.num_nodes()
             << " nodes; " << system_.num_voltage() << " voltage splines\n";

        t = clock_type::now();
        int code = exit_success;
        if (opt_.command == "solve") code = solve();
        if (opt_.command == "sweep") code = sweep_command();
        if (opt_.command == "profiles") code = profiles();
        if (opt_.command == "oracle-compare") code = oracle_compare();
        if (opt_.command == "dump-matrices") code = dump_matrices();
        timings_["command"] = seconds_since(t);
        manifest_["outputs"] = outputs_;
        return code;
    }

    void prepare_output_dir() {
        if (opt_.output_dir) {
            out_dir_ = *opt_.output_dir;
        } else if (const char* env = std::getenv(output_dir_env); env && *env) {
            out_dir_ = env;
        } else {
            out_dir_ = config_.output.directory;
        }
        std::error_code ec;
        std::filesystem::create_directories(out_dir_, ec);
        if (ec) {
            throw IoError("cannot create output directory '" + out_dir_.string() + "': " + ec.message());
        }
    }

    void write_output(const std::string& name, const std::string& content) {
        write_file((out_dir_ / name).string(), content);
        if (name != "manifest.json") {
            outputs_.push_back(name);
        }
    }

    void write_output(const std::string& name, const std::function<void(std::ostream&)>& writer) {
        std::ostringstream os;
        writer(os);
        write_output(name, os.str());
    }

    int solve() {
        const double f = *opt_.frequency;
        FrequencySolver solver(system_);
        json results = json::object();
        std::ostringstream csv;
        csv << "model,frequency,z_re,z_im,z_abs,phase_deg,voltage_re,voltage_im,current_re,current_im\n";
        for (ModelKind m : config_.models) {
            const Solution s = solver.solve(2.0 * pi * f, config_.drive, m);
            const complex z = s.impedance();
            results[to_string(m)] = {{"frequency", f},
                                     {"impedance", complex_json(z)},
                                     {"voltage", complex_json(s.voltage)},
                                     {"current", complex_json(s.current)},
                                     {"block_residual", s.residual},
                                     {"current_condition_residual", kirchhoff_residual(model_, s)}};
            csv << to_string(m) << ',' << format_double(f) << ',' << format_double(z.real()) << ','
                << format_double(z.imag()) << ',' << format_double(std::abs(z)) << ','
                << format_double(ImpedancePoint{f, z}.phase_deg()) << ',' << format_double(s.voltage.real())
                << ',' << format_double(s.voltage.imag()) << ',' << format_double(s.current.real()) << ','
                << format_double(s.current.imag()) << '\n';
            log_ << to_string(m) << ": f = " << f << " Hz, Z = " << z.real() << (z.imag() < 0 ? " - j" : " + j")
                 << std::abs(z.imag()) << " ohm\n";
        }
        manifest_["results"] = results;
        write_output("solve.csv", csv.str());
        return exit_success;
    }

    int sweep_command() {
        const std::vector<double> freqs = config_.frequencies();
        const std::vector<SweepResult> results = sweep(system_, freqs, config_.drive, config_.models);
        json summary = json::object();
        int failed_total = 0;
        for (const SweepResult& r : results) {
            write_output(model_file("sweep", r.model), [&](std::ostream& os) { write_sweep_csv(os, r); });
            int failed = 0;
            json errors = json::array();
            for (const SweepEntry& e : r.entries) {
                if (!e.solution) {
                    ++failed;
                    errors.push_back({{"frequency", e.frequency}, {"error", e.error}});
                }
            }
            failed_total += failed;
            summary[to_string(r.model)] = {{"points", r.entries.size()}, {"failed", failed}, {"errors", errors}};
            log_ << to_string(r.model) << ": " << r.entries.size() - static_cast<std::size_t>(failed) << " of "
                 << r.entries.size() << " frequencies solved\n";
        }
        manifest_["results"] = summary;
        if (failed_total > 0) {
            err_ << "solver error: " << failed_total << " sweep points failed, partial results written\n";
            return exit_solver_error;
        }
        return exit_success;
    }

    int profiles() {
        const double f = *opt_.frequency;
        FrequencySolver solver(system_);
        const std::vector<double> alpha = default_samples(model_.basis, config_.output.profile_samples);
        json results = json::object();
        for (ModelKind m : config_.models) {
            const Solution s = solver.solve(2.0 * pi * f, config_.drive, m);
            const CurrentProfiles p = current_profiles(model_, s, alpha);
            write_output(model_file("profiles", m), [&](std::ostream& os) { write_profiles_csv(os, p); });
            const FluxContours c = flux_contours(model_.mesh, s, config_.output.contour_levels);
            write_output(model_file("contours", m), [&](std::ostream& os) { write_contours_csv(os, c); });
            results[to_string(m)] = {{"frequency", f},
                                     {"impedance", complex_json(s.impedance())},
                                     {"current_condition_residual", kirchhoff_residual(model_, s)},
                                     {"samples", alpha.size()}};
        }
        manifest_["results"] = results;
        return exit_success;
    }

    int oracle_compare() {
        json results = json::object();
        const SymmetryMode& sym = model_.symmetry;
        const FoilWinding& w = model_.winding;
        const double sigma_c = config_.materials.foil.sigma_c;

        FrequencySolver solver(system_);
        const Solution dc = solver.solve(0.0, CurrentDrive{}, ModelKind::Capacitive);
        const double r_oracle = dc_resistance(w, sigma_c, sym);
        const double r_fem = dc.impedance().real();
        results["dc_resistance"] = {{"fem", r_fem}, {"oracle", r_oracle},
                                    {"relative_difference", std::abs(r_fem - r_oracle) / r_oracle}};
        log_ << "DC resistance: fem " << r_fem << " ohm, oracle " << r_oracle << " ohm\n";
        const Eigen::VectorXd c_gap = interturn_capacitances(w, config_.materials.foil.eps_i, sym);
        results["interturn_capacitance"] = {{"min", c_gap.minCoeff()}, {"max", c_gap.maxCoeff()},
                                            {"series_total", 1.0 / c_gap.cwiseInverse().sum()}};

        json ladder = json::object();
        std::string skip;
        if (config_.geometry.layout == LayoutKind::Msh) {
            skip = "resolved-turn meshes need a rectangle layout";
        }
        ResolvedTurns resolved;
        double h = 0.0;
        if (skip.empty()) {
            resolved = resolve_turns(build_layout(config_), w);
            h = config_.oracle.mesh_size.value_or(
                std::min({config_.geometry.mesh_size, 0.5 * w.insulation_thickness(), w.conductor_thickness()}));
            const double n = estimated_elements(resolved.layout, h);
            if (n > static_cast<double>(config_.oracle.max_elements)) {
                std::ostringstream os;
                os << "resolved-turn mesh needs about " << n << " elements at h = " << h
                   << " m (oracle.max_elements = " << config_.oracle.max_elements << ")";
                skip = os.str();
            }
        }
        if (!skip.empty()) {
            err_ << "warning: ladder comparison skipped: " << skip << '\n';
            ladder["skipped"] = skip;
        } else {
            const ResolvedLadder rl = resolved_ladder(build_layout(config_), w, config_.materials.foil,
                                                      model_.materials, sym, h);
            const LadderNetwork& net = rl.net;
            const std::vector<double> freqs = config_.frequencies();
            std::ostringstream csv;
            csv << "frequency,z_fem_re,z_fem_im,z_ladder_re,z_ladder_im,relative_difference\n";
            double worst = 0.0;
            for (double f : freqs) {
                const complex z_fem = solver.solve(2.0 * pi * f, CurrentDrive{}, ModelKind::Capacitive).impedance();
                const complex z_lad = ladder_impedance(net, 2.0 * pi * f);
                const double rel = std::abs(std::abs(z_fem) - std::abs(z_lad)) / std::abs(z_lad);
                worst = std::max(worst, rel);
                csv << format_double(f) << ',' << format_double(z_fem.real()) << ',' << format_double(z_fem.imag())
                    << ',' << format_double(z_lad.real()) << ',' << format_double(z_lad.imag()) << ','
                    << format_double(rel) << '\n';
            }
            write_output("oracle_compare.csv", csv.str());
            ladder = {{"turns", net.turns()},
                      {"resolved_triangles", rl.triangles},
                      {"mesh_size", h},
                      {"max_relative_magnitude_difference", worst}};
            log_ << "ladder: " << net.turns() << " turns, worst |Z| difference " << worst << '\n';
        }
        results["ladder"] = ladder;
        manifest_["results"] = results;
        return exit_success;
    }

    int dump_matrices() {
        auto sparse = [&](const std::string& name, const SparseMatrix& a) {
            write_output(name + ".mtx", [&](std::ostream& os) { write_matrix_market(os, a); });
        };
        auto dense = [&](const std::string& name, const Eigen::MatrixXd& a) {
            write_output(name + ".mtx", [&](std::ostream& os) { write_matrix_market(os, a); });
        };
        sparse("K", system_.K);
        sparse("M", system_.M);
        sparse("X", system_.X);
        dense("G", system_.G);
        dense("C_prime", system_.C_prime);
        dense("C_dprime", system_.C_dprime);
        dense("P", system_.P);
        dense("js", system_.js);
        write_output("mesh.msh", [&](std::ostream& os) { write_msh(os, model_.mesh); });
        manifest_["results"] = {{"asymmetry",
                                 {{"K", asymmetry(system_.K)},
                                  {"M", asymmetry(system_.M)},
                                  {"G", asymmetry(system_.G)},
                                  {"C_dprime", asymmetry(system_.C_dprime)}}}};
        return exit_success;
    }

    const RunOptions& opt_;
    std::ostream& log_;
    std::ostream& err_;
    Config config_;
    FoilModel model_;
    AssembledSystem system_;
    std::filesystem::path out_dir_;
    json manifest_ = json::object();
    json timings_ = json::object();
    json outputs_ = json::array();
};

}  // namespace

int run(const RunOptions& options, std::ostream& log, std::ostream& err) {
    Run r(options, log, err);
    return r.execute();
}

}  // namespace foilwind
