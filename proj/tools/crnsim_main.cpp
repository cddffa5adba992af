// Command-line front end: run scenario files or built-in presets through the
// Monte-Carlo and closed-form engines and emit CSV. Noise power defaults to
// N0 = 1, so P_T_dB in a scenario is the transmit SNR in dB.
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crnsim/harness.hpp"

namespace {

struct CommonFlags {
    std::optional<long long> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> engines;
    std::string out_path;
    std::string plot_prefix;
    bool strict = false;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags) {
    cmd.add_option("--trials", flags.trials, "Monte-Carlo trial count override");
    cmd.add_option("--seed", flags.seed, "Base RNG seed override");
    cmd.add_option("--threads", flags.threads, "Worker thread count override");
    cmd.add_option("--engine", flags.engines,
                   "Engine selection (repeatable): mc, analytic")
        ->check(CLI::IsMember({"mc", "analytic"}));
    cmd.add_option("--out", flags.out_path, "Write CSV to this file (default: stdout)");
    cmd.add_option("--plot-prefix", flags.plot_prefix,
                   "Also write per-series x/y .dat files with this path prefix");
    cmd.add_flag("--strict", flags.strict,
                 "Exit non-zero with a JSON error summary if any row records an error");
}

void apply_flags(crnsim::Scenario& s, const CommonFlags& flags) {
    if (flags.trials)
        s.mc.trials = *flags.trials;
    if (flags.seed)
        s.mc.seed = *flags.seed;
    if (flags.threads)
        s.mc.threads = *flags.threads;
    if (!flags.engines.empty()) {
        s.engine_mc = false;
        s.engine_analytic = false;
        for (const auto& e : flags.engines) {
            if (e == "mc")
                s.engine_mc = true;
            else
                s.engine_analytic = true;
        }
    }
    s.mc.validate();
}

int emit_and_report(const crnsim::Scenario& s, const CommonFlags& flags) {
    const std::vector<crnsim::ResultRow> rows = crnsim::run_scenario(s);
    if (flags.out_path.empty())
        crnsim::emit_csv(rows, std::cout);
    else
        crnsim::emit_csv(rows, flags.out_path);
    if (!flags.plot_prefix.empty())
        crnsim::emit_plotdata(rows, flags.plot_prefix);

    long long bad = 0;
    std::string first_error;
    for (const auto& row : rows) {
        if (!row.note.empty()) {
            if (bad == 0)
                first_error = row.note;
            ++bad;
        }
    }
    if (bad > 0) {
        if (flags.strict) {
            nlohmann::json summary = {{"status", "error"},
                                      {"scenario", s.name},
                                      {"rows_total", rows.size()},
                                      {"rows_with_errors", bad},
                                      {"first_error", first_error}};
            std::cerr << summary.dump() << '\n';
            return 2;
        }
        std::cerr << "warning: " << bad << " row(s) recorded errors; first: "
                  << first_error << '\n';
    }
    return 0;
}

int fail(const CommonFlags& flags, const std::string& stage, const std::string& what) {
    if (flags.strict) {
        nlohmann::json summary = {
            {"status", "error"}, {"stage", stage}, {"message", what}};
        std::cerr << summary.dump() << '\n';
    } else {
        std::cerr << "error: " << what << '\n';
    }
    return 1;
}

crnsim::Scenario load_file_or_preset(const std::string& source) {
    std::ifstream probe(source);
    if (probe)
        return crnsim::load_scenario(source);
    return crnsim::preset(source);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overlay relay network outage, throughput, and allocation tool"};
    app.require_subcommand(1);

    std::string run_file;
    CommonFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario file");
    run_cmd->add_option("file", run_file, "Scenario file (key: value lines)")
        ->required();
    add_common_flags(*run_cmd, run_flags);

    std::string preset_name;
    CommonFlags preset_flags;
    bool list_presets = false;
    CLI::App* preset_cmd = app.add_subcommand("preset", "Run a built-in scenario");
    preset_cmd->add_option("name", preset_name, "Preset name (see --list)");
    preset_cmd->add_flag("--list", list_presets, "List preset names and exit");
    add_common_flags(*preset_cmd, preset_flags);

    long long validate_trials = 1000000;
    std::uint64_t validate_seed = 1;
    int validate_threads = 1;
    std::string validate_out;
    bool validate_strict = false;
    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Compare the closed-form and Monte-Carlo engines on the "
                    "built-in 40-point grid");
    validate_cmd->add_option("--trials", validate_trials,
                             "Monte-Carlo trials per grid point");
    validate_cmd->add_option("--seed", validate_seed, "Base RNG seed");
    validate_cmd->add_option("--threads", validate_threads, "Worker thread count");
    validate_cmd->add_option("--out", validate_out,
                             "Write the comparison CSV to this file (default: stdout)");
    validate_cmd->add_flag("--strict", validate_strict,
                           "Report failures as single-line JSON");

    std::string optimize_source;
    CommonFlags optimize_flags;
    CLI::App* optimize_cmd = app.add_subcommand(
        "optimize", "Run the joint time/power allocation search on a scenario");
    optimize_cmd->add_option("source", optimize_source, "Scenario file or preset name")
        ->required();
    add_common_flags(*optimize_cmd, optimize_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            crnsim::Scenario s;
            try {
                s = crnsim::load_scenario(run_file);
                apply_flags(s, run_flags);
            } catch (const std::exception& err) {
                return fail(run_flags, "load", err.what());
            }
            return emit_and_report(s, run_flags);
        }
        if (preset_cmd->parsed()) {
            if (list_presets) {
                for (const auto& name : crnsim::preset_names())
                    std::cout << name << '\n';
                return 0;
            }
            if (preset_name.empty())
                return fail(preset_flags, "load", "preset name required (see --list)");
            crnsim::Scenario s;
            try {
                s = crnsim::preset(preset_name);
                apply_flags(s, preset_flags);
            } catch (const std::exception& err) {
                return fail(preset_flags, "load", err.what());
            }
            return emit_and_report(s, preset_flags);
        }
        if (validate_cmd->parsed()) {
            CommonFlags flags;
            flags.strict = validate_strict;
            const std::vector<crnsim::ValidationPoint> grid = crnsim::validation_grid();
            std::ostringstream csv;
            csv << "side,n_stages,kappa,k,P_T_dB,closed_form,mc,mc_se,abs_diff,"
                   "tolerance,pass\n";
            long long failures = 0;
            crnsim::McConfig mc;
            mc.trials = static_cast<std::uint64_t>(validate_trials);
            mc.threads = validate_threads;
            mc.validate();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                crnsim::McConfig point_mc = mc;
                point_mc.seed = validate_seed + i;
                const crnsim::ValidationOutcome out =
                    crnsim::run_validation_point(grid[i], point_mc);
                csv << (out.point.primary ? "pu" : "su") << ','
                    << out.point.stages << ','
                    << crnsim::detail::format_number(out.point.kappa) << ','
                    << out.point.order << ','
                    << crnsim::detail::format_number(out.point.pt_db) << ','
                    << crnsim::detail::format_number(out.closed_form) << ','
                    << crnsim::detail::format_number(out.mc) << ','
                    << crnsim::detail::format_number(out.mc_se) << ','
                    << crnsim::detail::format_number(out.abs_diff) << ','
                    << crnsim::detail::format_number(out.tolerance) << ','
                    << (out.pass ? 1 : 0) << '\n';
                if (!out.pass)
                    ++failures;
            }
            if (validate_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream file(validate_out, std::ios::binary);
                if (!file)
                    return fail(flags, "emit", "cannot open '" + validate_out + "'");
                file << csv.str();
            }
            if (failures > 0) {
                if (validate_strict) {
                    nlohmann::json summary = {{"status", "error"},
                                              {"stage", "validate"},
                                              {"points_total", grid.size()},
                                              {"points_failed", failures}};
                    std::cerr << summary.dump() << '\n';
                } else {
                    std::cerr << "error: " << failures
                              << " grid point(s) exceeded the engine tolerance\n";
                }
                return 1;
            }
            return 0;
        }
        if (optimize_cmd->parsed()) {
            crnsim::Scenario s;
            try {
                s = load_file_or_preset(optimize_source);
                apply_flags(s, optimize_flags);
            } catch (const std::exception& err) {
                return fail(optimize_flags, "load", err.what());
            }
            if (s.opt_variants.empty())
                s.opt_variants = {"joint", "rho", "af", "fixed"};
            return emit_and_report(s, optimize_flags);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
