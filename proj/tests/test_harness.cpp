#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>
#include <string>

#include "crnsim/harness.hpp"

using crnsim::Scenario;
using crnsim::parse_error;

namespace {

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return crnsim::parse_scenario(in);
}

Scenario quick_mc_scenario() {
    Scenario s = parse("schema: 1\n"
                       "name: quick\n"
                       "rho: 0.6\n"
                       "A_f: 0.8\n"
                       "lambda_p: 0.5\n"
                       "L_R: 2\n"
                       "L_S: 2\n"
                       "R_thp: 0.5\n"
                       "R_ths: 1\n"
                       "sweep: P_T_dB\n"
                       "values: 0 10 20\n"
                       "trials: 20000\n"
                       "seed: 5\n");
    return s;
}

std::string csv_of(const Scenario& s) {
    const auto rows = crnsim::run_scenario(s);
    std::ostringstream out;
    crnsim::emit_csv(rows, out);
    return out.str();
}

} // namespace

TEST_CASE("minimal scenario text gets the documented defaults") {
    const Scenario s = parse("schema: 1\nname: x\n");
    REQUIRE(s.name == "x");
    REQUIRE(s.fields.rho == 0.5);
    REQUIRE(s.params.P_T == 1.0);
    REQUIRE(s.params.N_0 == 1.0);
    REQUIRE(s.sweep.variable.empty());
    REQUIRE(s.engine_mc);
    REQUIRE(s.engine_analytic);
    REQUIRE(s.opt_variants.empty());
}

TEST_CASE("scenario parser names the offending field") {
    REQUIRE_THROWS_WITH(parse("schema: 1\nrho: 1.2\n"),
                        Catch::Matchers::ContainsSubstring("rho"));
    REQUIRE_THROWS_WITH(parse("schema: 1\nbogus: 3\n"),
                        Catch::Matchers::ContainsSubstring("bogus"));
    REQUIRE_THROWS_WITH(parse("name: x\n"),
                        Catch::Matchers::ContainsSubstring("schema"));
    REQUIRE_THROWS_WITH(parse("schema: 1\nsweep: L_R\nvalues: 1 2\n"),
                        Catch::Matchers::ContainsSubstring("sweepable"));
    REQUIRE_THROWS_WITH(parse("schema: 1\nvalues: 1 2\n"),
                        Catch::Matchers::ContainsSubstring("values"));
    REQUIRE_THROWS_AS(parse("schema: 1\nrho: abc\n"), parse_error);
    REQUIRE_THROWS_AS(parse("schema: 2\n"), parse_error);
    REQUIRE_THROWS_AS(parse("schema: 1\nengines: gpu\n"), parse_error);
}

TEST_CASE("comments and spacing are tolerated") {
    const Scenario s = parse("# leading comment\n"
                             "schema: 1\n"
                             "\n"
                             "  rho:   0.25  \n"
                             "engines: analytic\n");
    REQUIRE(s.fields.rho == 0.25);
    REQUIRE_FALSE(s.engine_mc);
    REQUIRE(s.engine_analytic);
}

TEST_CASE("presets carry their published operating points") {
    const Scenario f3 = crnsim::preset("fig3");
    REQUIRE(f3.fields.rho == 0.6);
    REQUIRE(f3.fields.A_f == 0.8);
    REQUIRE(f3.fields.n_p == 2);
    REQUIRE(f3.sweep.variable == "P_T_dB");
    REQUIRE(f3.sweep.values.size() == 9);

    const Scenario f7 = crnsim::preset("fig7");
    REQUIRE(f7.fields.delta.has_value());
    REQUIRE(*f7.fields.delta == 100.0);
    REQUIRE_FALSE(f7.engine_analytic);

    const Scenario f9 = crnsim::preset("fig9");
    REQUIRE_FALSE(f9.engine_mc);
    REQUIRE(f9.fields.R_pt == 0.4);
    REQUIRE(f9.opt_variants.size() == 4);

    REQUIRE(crnsim::preset_names().size() == 7);
    REQUIRE_THROWS_AS(crnsim::preset("fig99"), parse_error);
}

TEST_CASE("emitted numbers survive a parse round trip") {
    for (const double v : {0.0357245322700968, 1.0 / 3.0, 123456.789012345, 1e-12}) {
        const std::string text = crnsim::detail::format_number(v);
        const double back = std::strtod(text.c_str(), nullptr);
        REQUIRE(back == Catch::Approx(v).epsilon(1e-11));
    }
}

TEST_CASE("csv output is byte-identical across runs and thread counts") {
    Scenario s = quick_mc_scenario();
    const std::string once = csv_of(s);
    const std::string twice = csv_of(s);
    REQUIRE(once == twice);

    s.mc.threads = 2;
    REQUIRE(csv_of(s) == once);

    REQUIRE(once.rfind("scenario,sweep_variable,sweep_value,", 0) == 0);
}

TEST_CASE("per-row engine failures are recorded without aborting the run") {
    Scenario s = crnsim::preset("fig7");
    s.engine_analytic = true;
    s.mc.trials = 1000;
    s.sweep.values = {0.1, 0.5, 0.9};
    const auto rows = crnsim::run_scenario(s);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        REQUIRE(row.op_p_mc.has_value());
        REQUIRE(row.note.find("analytic") != std::string::npos);
        REQUIRE_FALSE(row.op_p_analytic.has_value());
    }
}

TEST_CASE("a sweep value that breaks validation only poisons its own row") {
    Scenario s = parse("schema: 1\n"
                       "sweep: rho\n"
                       "values: 0.5 1.5\n"
                       "trials: 100\n");
    const auto rows = crnsim::run_scenario(s);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].op_p_mc.has_value());
    REQUIRE(rows[0].note.empty());
    REQUIRE_FALSE(rows[1].op_p_mc.has_value());
    REQUIRE_FALSE(rows[1].note.empty());
}

TEST_CASE("analytic sweep of the primary outage decreases with power") {
    Scenario s = crnsim::preset("fig3");
    s.engine_mc = false;
    const auto rows = crnsim::run_scenario(s);
    REQUIRE(rows.size() == 9);
    double prev = 1.1;
    for (const auto& row : rows) {
        REQUIRE(row.op_p_analytic.has_value());
        REQUIRE(row.analytic_converged == 1);
        REQUIRE(*row.op_p_analytic < prev);
        prev = *row.op_p_analytic;
    }
}

TEST_CASE("plot data files land next to the requested prefix") {
    Scenario s = quick_mc_scenario();
    s.sweep.values = {0.0, 10.0};
    s.mc.trials = 2000;
    const auto rows = crnsim::run_scenario(s);
    const std::string prefix = "harness_plot_test";
    const auto written = crnsim::emit_plotdata(rows, prefix);
    REQUIRE_FALSE(written.empty());
    for (const auto& path : written) {
        REQUIRE(path.rfind(prefix, 0) == 0);
        std::ifstream check(path);
        REQUIRE(check.good());
        std::remove(path.c_str());
    }
}
