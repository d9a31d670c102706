#include "kmreg/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kmreg/config.hpp"
#include "kmreg/errors.hpp"
#include "kmreg/harness.hpp"
#include "kmreg/io.hpp"

namespace kmreg::cli {

namespace fs = std::filesystem;

namespace {

// Maps the library's exception types onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ParameterBoundError& e) {
        err << "error: " << e.what() << '\n';
        return kParameterBound;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kConfigError;
    } catch (const EvaluationError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

std::string step_label(std::uint64_t k) { return std::to_string(k); }

}  // namespace

int cmd_forward(const std::string& config_path, double t, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
    return guarded(err, [&] {
        const ExperimentConfig cfg = config::load(config_path);
        const ManufacturedProblem problem = manufacture_data(cfg);
        const SpectralField u = forward_solution(problem, cfg, t);
        const fs::path path(out_path);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        io::save_grid(out_path, inverse_transform(u));
        out << "wrote " << out_path << " (" << to_string(cfg.method) << " forward solution at t=" << t << ")\n";
        return int{kOk};
    });
}

int cmd_reconstruct(const std::string& config_path, const std::string& out_dir, bool dump_checkpoints,
                    std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ExperimentConfig cfg = config::load(config_path);
        if (cfg.checkpoints.empty()) throw ConfigError("reconstruct needs at least one checkpoint");
        if (cfg.method == MethodKind::parabolic) {
            const BasisPtr basis = build_basis(cfg.domain, cfg.kmax, cfg.a2);
            const GammaReport g = gamma_admissible(cfg.gamma, *basis, cfg.t_end, cfg.a2);
            if (!g.admissible()) throw ParameterBoundError(g.describe());
        }
        const RunReport report = run_experiment(cfg);

        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        {
            std::ofstream csv(dir / "report.csv");
            if (!csv) throw std::runtime_error("cannot write " + (dir / "report.csv").string());
            io::write_report_csv(csv, report);
        }
        for (std::size_t r = 0; r < report.rows.size(); ++r) {
            const auto& row = report.rows[r];
            out << "step=" << row.step << " rel_error=" << io::format_double(row.rel_error_percent)
                << "% increment=" << io::format_double(row.increment_norm);
            if (row.via_solves_discrepancy) out << " via_solves=" << io::format_double(*row.via_solves_discrepancy);
            out << '\n';
            if (dump_checkpoints) {
                io::save_grid((dir / ("reconstruction_" + step_label(row.step) + ".grid")).string(),
                              report.reconstruction(r));
                io::save_grid((dir / ("error_" + step_label(row.step) + ".grid")).string(), report.error_field(r));
            }
        }
        const std::size_t last = report.rows.size() - 1;
        io::save_grid((dir / "reconstruction.grid").string(), report.reconstruction(last));
        io::save_grid((dir / "error.grid").string(), report.error_field(last));
        return int{kOk};
    });
}

int cmd_check(const std::string& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ExperimentConfig cfg = config::load(config_path);
        const BasisPtr basis = build_basis(cfg.domain, cfg.kmax, cfg.a2);
        const AffineIteration it =
            linear_part(cfg.method, basis, cfg.t_end, cfg.gamma, cfg.a2, cfg.resonance_tol);
        const OperatorDiagnostics d = operator_diagnostics(it, cfg.resonance_tol);

        const auto yes_no = [](bool b) { return b ? "yes" : "NO"; };
        out << "method: " << to_string(cfg.method) << ", T=" << io::format_double(cfg.t_end)
            << ", modes=" << basis->size() << ", lambda_min=" << io::format_double(basis->min_eigenvalue()) << '\n';
        out << "multiplier range: [" << io::format_double(d.min_multiplier) << ", "
            << io::format_double(d.max_multiplier) << "]\n";
        out << "non-expansive (max |m| <= 1): " << yes_no(d.nonexpansive) << '\n';
        out << "positive (m > 0): " << yes_no(d.positive) << '\n';
        out << "eigenvalue-1 modes: " << d.unit_modes.size() << '\n';
        for (std::size_t i : d.unit_modes) {
            const ModeIndex mode = basis->mode(i);
            out << "  mode (" << mode.k << "," << mode.m << ") lambda=" << io::format_double(basis->eigenvalue(i))
                << '\n';
        }
        out << "kernel modes (m = 0): " << d.kernel_modes.size() << '\n';
        out << "(1-m)^2 <= 1-m^2: " << yes_no(d.contraction_inequality) << '\n';
        if (d.resonance) {
            out << "resonance margin min|sin(lambda T)|=" << io::format_double(d.resonance->margin)
                << ", min distance to j*pi/T=" << io::format_double(d.resonance->min_distance) << '\n';
            for (std::size_t i : d.resonance->flagged) {
                const auto& e = d.resonance->modes[i];
                out << "  resonant mode (" << e.mode.k << "," << e.mode.m << ") lambda=" << io::format_double(e.lambda)
                    << " ~ " << e.nearest_multiple << "*pi/T\n";
            }
        }
        if (d.gamma) out << d.gamma->describe() << '\n';

        const auto flags = d.flags();
        for (const auto& f : flags) out << "FLAG: " << f << '\n';
        out << (flags.empty() ? "PASS" : "FAIL") << '\n';
        return flags.empty() ? int{kOk} : int{kDiagnosticFlag};
    });
}

int cmd_equivalence(const std::string& config_path, const std::vector<std::uint64_t>& ks, std::ostream& out,
                    std::ostream& err, double multiplier_perturbation) {
    return guarded(err, [&] {
        const ExperimentConfig cfg = config::load(config_path);
        const auto rows = run_equivalence(cfg, ks, multiplier_perturbation);
        bool all = true;
        out << "k,max_rel_discrepancy,result\n";
        for (const auto& r : rows) {
            out << r.k << ',' << io::format_double(r.discrepancy) << ',' << (r.pass ? "pass" : "fail") << '\n';
            all = all && r.pass;
        }
        return all ? int{kOk} : int{kDiagnosticFlag};
    });
}

int run(int argc, char** argv) {
    CLI::App app{"alternating iterative regularization on a rectangle"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    double t = 0.0;
    std::vector<std::uint64_t> ks{0, 1, 5, 37};
    bool dump = false;

    auto* forward = app.add_subcommand("forward", "write the forward solution u(t) as a grid dump");
    forward->add_option("--config", config_path, "experiment config (JSON)")->required();
    forward->add_option("--t", t, "time at which to evaluate the solution")->required();
    forward->add_option("--out", out, "output grid file");

    auto* reconstruct = app.add_subcommand("reconstruct", "run the iteration and write report.csv + grids");
    reconstruct->add_option("--config", config_path, "experiment config (JSON)")->required();
    reconstruct->add_option("--out", out, "output directory");
    reconstruct->add_flag("--dump-checkpoints", dump, "write grids at every checkpoint");

    auto* check = app.add_subcommand("check", "operator diagnostics, resonance margins and gamma bounds");
    check->add_option("--config", config_path, "experiment config (JSON)")->required();

    auto* equivalence = app.add_subcommand("equivalence", "closed form vs literal sub-solves");
    equivalence->add_option("--config", config_path, "experiment config (JSON)")->required();
    equivalence->add_option("--k", ks, "comma-separated step counts (<= 1000)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    const char* env = std::getenv(kOutDirEnv);
    const fs::path env_dir = (env && *env) ? fs::path(env) : fs::path();

    if (*forward) {
        const std::string path = !out.empty() ? out : (env_dir / "forward.grid").string();
        return cmd_forward(config_path, t, path, std::cout, std::cerr);
    }
    if (*reconstruct) {
        const std::string dir = !out.empty() ? out : (env_dir.empty() ? std::string("out") : env_dir.string());
        return cmd_reconstruct(config_path, dir, dump, std::cout, std::cerr);
    }
    if (*check) return cmd_check(config_path, std::cout, std::cerr);
    if (*equivalence) return cmd_equivalence(config_path, ks, std::cout, std::cerr);
    return kConfigError;
}

}  // namespace kmreg::cli
