#include "plap/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "plap/report.hpp"

namespace plap::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct Flags {
    std::string problem;
    std::string out_dir;
    std::string profile;
    io::Overrides overrides;
    bool epsilon_scan = false;
    std::optional<double> base_r;
    int doublings = 4;
};

Json report_header(const io::LoadedProblem& loaded) {
    Json j;
    j["version"] = io::kVersion;
    j["problem"] = loaded.echo();
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

fs::path output_dir(const Flags& flags) {
    fs::path dir = flags.out_dir.empty() ? fs::path(".") : fs::path(flags.out_dir);
    fs::create_directories(dir);
    return dir;
}

io::LoadedProblem load(const Flags& flags, std::ostream& err) {
    io::LoadedProblem loaded = io::load_problem(fs::path(flags.problem), flags.overrides);
    for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
    return loaded;
}

int run_solve(const Flags& flags, std::ostream& out, std::ostream& err) {
    const auto loaded = load(flags, err);
    const auto grid = loaded.grid.make();
    const auto result = solver::solve_radial_system(loaded.spec, grid, loaded.iteration);
    const auto residuals = verify::fixed_point_residual(loaded.spec, grid, result.profiles);

    Json report = report_header(loaded);
    report["solve"] = io::to_json(result.report);
    report["residuals"] = io::to_json(residuals);

    const fs::path dir = output_dir(flags);
    io::write_profiles_csv(dir / "profiles.csv", result.profiles);
    write_text(dir / "report.json", io::dump(report));

    const auto& r = result.report;
    out << "solve: " << (r.converged ? "converged" : r.capped ? "capped" : "not converged")
        << " after " << r.iterations_used << " iterations, sup u = "
        << io::format_double(result.profiles.sup()) << "\n";
    return r.converged ? kOk : kNotConverged;
}

int run_predict(const Flags& flags, std::ostream& out, std::ostream& err) {
    const auto loaded = load(flags, err);
    const auto report = criteria::predict(loaded.spec, loaded.epsilon);

    Json doc = report_header(loaded);
    doc["criteria"] = io::to_json(report);
    if (flags.epsilon_scan) {
        Json scan = Json::array();
        for (double eps : criteria::kEpsilonScan) {
            const auto at = criteria::predict(loaded.spec, eps);
            scan.push_back({{"epsilon", eps},
                            {"prediction", std::string(criteria::to_string(at.prediction))},
                            {"cond5", io::to_json(at.cond5)},
                            {"cond13", io::to_json(at.cond13)}});
        }
        doc["criteria"]["epsilon_scan"] = std::move(scan);
    }
    for (const auto& note : report.notes) err << "note: " << note << "\n";

    write_text(output_dir(flags) / "report.json", io::dump(doc));
    out << "predict: " << criteria::to_string(report.prediction);
    if (!report.details.empty()) out << " (" << report.details << ")";
    out << "\n";
    return kOk;
}

int run_verify(const Flags& flags, std::ostream& out, std::ostream& err) {
    const auto loaded = load(flags, err);
    if (flags.profile.empty()) throw io::SchemaError("--profile", "a profile CSV is required");
    const auto profiles = io::read_profiles_csv(flags.profile, loaded.spec.m);
    const auto residuals = verify::fixed_point_residual(loaded.spec, profiles.grid, profiles);

    Json doc = report_header(loaded);
    doc["residuals"] = io::to_json(residuals);
    write_text(output_dir(flags) / "report.json", io::dump(doc));
    out << "verify: fixed-point residual " << io::format_double(residuals.sup_fixed_point_residual)
        << ", ODE residual " << io::format_double(residuals.sup_ode_residual_interior) << "\n";
    return kOk;
}

int run_sweep(const Flags& flags, std::ostream& out, std::ostream& err) {
    const auto loaded = load(flags, err);
    const double base = flags.base_r.value_or(loaded.grid.r_max);
    if (!(base > 0.0)) throw io::SchemaError("--base-r", "must be positive");
    if (flags.doublings < 2 || flags.doublings > 12)
        throw io::SchemaError("--doublings", "must be between 2 and 12");
    const auto growth = verify::classify_growth(loaded.spec, base, flags.doublings,
                                                loaded.iteration, loaded.grid.points);

    Json doc = report_header(loaded);
    doc["growth"] = io::to_json(growth);
    write_text(output_dir(flags) / "report.json", io::dump(doc));
    out << "sweep: " << verify::to_string(growth.classification) << ", exponent estimate "
        << io::format_double(growth.exponent_estimate) << "\n";
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Radial solutions and existence criteria for p-Laplacian systems", "plap"};
    app.set_version_flag("--version", io::kVersion);
    app.require_subcommand(1);

    Flags flags;
    auto add_common = [&flags](CLI::App* sub) {
        sub->add_option("--problem", flags.problem, "Problem file (JSON)")->required();
        sub->add_option("--out", flags.out_dir, "Output directory (default: current)");
        sub->add_option("--grid-points", flags.overrides.grid_points, "Override grid.points");
        sub->add_option("--r-max", flags.overrides.r_max, "Override grid.r_max");
        sub->add_option("--max-iter", flags.overrides.max_iterations,
                        "Override iteration.max_iterations");
        sub->add_option("--tol", flags.overrides.abs_tol, "Override iteration.abs_tol");
    };

    auto* solve = app.add_subcommand("solve", "Solve on [0, r_max]; write profiles.csv and report.json");
    add_common(solve);
    auto* predict = app.add_subcommand("predict", "Evaluate the integral criteria; write report.json");
    add_common(predict);
    predict->add_option("--epsilon", flags.overrides.epsilon, "Override epsilon");
    predict->add_flag("--epsilon-scan", flags.epsilon_scan,
                      "Also report verdicts for epsilon in {0.01, 0.1, 0.5, 1}");
    auto* verify_cmd = app.add_subcommand("verify", "Residuals of a stored profile CSV");
    add_common(verify_cmd);
    verify_cmd->add_option("--profile", flags.profile, "Profile CSV from `solve`")->required();
    auto* sweep = app.add_subcommand("sweep", "Solve on doubling domains and classify growth");
    add_common(sweep);
    sweep->add_option("--base-r", flags.base_r, "Smallest radius (default: grid.r_max)");
    sweep->add_option("--doublings", flags.doublings, "Number of doublings (default 4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForVersion&) {
        out << io::kVersion << "\n";
        return kOk;
    } catch (const CLI::Success&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kSchema;
    }

    try {
        if (solve->parsed()) return run_solve(flags, out, err);
        if (predict->parsed()) return run_predict(flags, out, err);
        if (verify_cmd->parsed()) return run_verify(flags, out, err);
        return run_sweep(flags, out, err);
    } catch (const io::ExpressionError& e) {
        err << "error: " << e.what() << " (offset " << e.offset() << ")\n";
        return kExpression;
    } catch (const io::SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kSchema;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kSchema;
    } catch (const InvalidProblem& e) {
        err << "error: " << e.what() << "\n";
        return kSchema;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace plap::cli
