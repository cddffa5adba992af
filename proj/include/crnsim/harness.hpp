#ifndef CRNSIM_HARNESS_HPP
#define CRNSIM_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "crnsim/analysis.hpp"
#include "crnsim/errors.hpp"
#include "crnsim/linkmodel.hpp"
#include "crnsim/meijer.hpp"
#include "crnsim/optimize.hpp"
#include "crnsim/simulate.hpp"

namespace crnsim {

// Scalar knobs of a scenario file. Powers are entered in dB and converted
// here, at the boundary; everything downstream is linear. N0 defaults to 1,
// which makes P_T_dB the transmit SNR in dB.
struct ScenarioFields {
    double P_T_dB = 0.0;
    double rho = 0.5;
    double eta = 0.8;
    double T = 1.0;
    double A_f = 0.5;
    double nu_p = 0.0;
    double nu_s = 0.0;
    double N0 = 1.0;
    int L_R = 1;
    int L_S = 1;
    double R_thp = 1.0;
    double R_ths = 1.0;
    double R_pt = 0.0;
    double phi = 1.0;
    int U = 2;
    double alpha = 2.0;
    int k = 1;
    std::optional<double> delta;
    double kappa = 0.0;
    double mu = 1.0;
    int n_p = 1;
    int n_s = 1;
    double lambda_p = 1.0;
};

struct SweepSpec {
    std::string variable;
    std::vector<double> values;
};

struct Scenario {
    std::string name = "scenario";
    ScenarioFields fields;
    SystemParams params;
    SweepSpec sweep;
    bool engine_mc = true;
    bool engine_analytic = true;
    McConfig mc;
    SeriesBudget budget;
    std::vector<std::string> opt_variants;
    OptConfig opt;
};

struct ResultRow {
    std::string scenario;
    std::string sweep_variable;
    double sweep_value = 0.0;
    std::optional<double> op_p_mc;
    std::optional<double> op_p_mc_se;
    std::optional<double> op_s_mc;
    std::optional<double> op_s_mc_se;
    std::optional<double> op_p_analytic;
    std::optional<double> op_s_analytic;
    std::optional<int> analytic_converged;
    std::optional<double> tau;
    std::optional<double> ee;
    std::vector<std::pair<std::string, double>> extras;
    std::string note;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double_field(const std::string& field, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (trim(text.substr(pos)).empty())
            return v;
    } catch (const std::exception&) {
    }
    throw parse_error("field '" + field + "': cannot parse number from '" + text + "'");
}

inline long long parse_int_field(const std::string& field, const std::string& text) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (trim(text.substr(pos)).empty())
            return v;
    } catch (const std::exception&) {
    }
    throw parse_error("field '" + field + "': cannot parse integer from '" + text + "'");
}

inline void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok)
        throw parse_error("field '" + field + "': " + why);
}

inline const std::map<std::string, double ScenarioFields::*>& sweepable_fields() {
    static const std::map<std::string, double ScenarioFields::*> table = {
        {"P_T_dB", &ScenarioFields::P_T_dB}, {"rho", &ScenarioFields::rho},
        {"eta", &ScenarioFields::eta},       {"A_f", &ScenarioFields::A_f},
        {"nu_p", &ScenarioFields::nu_p},     {"nu_s", &ScenarioFields::nu_s},
        {"phi", &ScenarioFields::phi},       {"R_thp", &ScenarioFields::R_thp},
        {"R_ths", &ScenarioFields::R_ths},   {"R_pt", &ScenarioFields::R_pt},
        {"kappa", &ScenarioFields::kappa},   {"mu", &ScenarioFields::mu},
        {"lambda_p", &ScenarioFields::lambda_p},
    };
    return table;
}

inline void check_fields(const ScenarioFields& f) {
    require(f.rho > 0.0 && f.rho < 1.0, "rho", "must lie strictly between 0 and 1");
    require(f.eta > 0.0 && f.eta <= 1.0, "eta", "must lie in (0, 1]");
    require(f.T > 0.0, "T", "must be positive");
    require(f.A_f > 0.0 && f.A_f < 1.0, "A_f", "must lie strictly between 0 and 1");
    require(f.nu_p >= 0.0 && f.nu_p < 1.0, "nu_p", "must lie in [0, 1)");
    require(f.nu_s >= 0.0 && f.nu_s < 1.0, "nu_s", "must lie in [0, 1)");
    require(f.N0 > 0.0, "N0", "must be positive");
    require(f.L_R >= 1, "L_R", "must be at least 1");
    require(f.L_S >= 1, "L_S", "must be at least 1");
    require(f.R_thp >= 0.0, "R_thp", "must be non-negative");
    require(f.R_ths >= 0.0, "R_ths", "must be non-negative");
    require(f.R_pt >= 0.0, "R_pt", "must be non-negative");
    require(f.phi > 0.0, "phi", "must be positive");
    require(f.U >= 1, "U", "must be at least 1");
    require(f.alpha > 0.0, "alpha", "must be positive");
    require(f.k >= 1, "k", "must be at least 1");
    require(!f.delta || *f.delta > 0.0, "delta", "must be positive");
    require(f.kappa >= 0.0, "kappa", "must be non-negative");
    require(f.mu > 0.0, "mu", "must be positive");
    require(f.n_p >= 1, "n_p", "must be at least 1");
    require(f.n_s >= 1, "n_s", "must be at least 1");
    require(f.lambda_p > 0.0, "lambda_p", "must be positive");
}

inline SystemParams assemble(const ScenarioFields& f) {
    check_fields(f);
    SystemParams p;
    p.P_T = std::pow(10.0, f.P_T_dB / 10.0);
    p.rho = f.rho;
    p.eta = f.eta;
    p.T = f.T;
    p.A_f = f.A_f;
    p.nu_p = f.nu_p;
    p.nu_s = f.nu_s;
    p.N_0 = f.N0;
    p.L_R = f.L_R;
    p.L_S = f.L_S;
    p.R_thp = f.R_thp;
    p.R_ths = f.R_ths;
    p.R_pt = f.R_pt;
    p.geometry.density = f.phi;
    p.geometry.dimension = f.U;
    p.geometry.pathloss_exp = f.alpha;
    p.geometry.order = f.k;
    p.geometry.delta_override = f.delta;
    p.pr_channel.rate = f.lambda_p;
    p.pr_channel.branches = f.L_R;
    KappaMuSpec stage;
    stage.kappa = f.kappa;
    stage.mu = f.mu;
    stage.mean_power = 1.0;
    p.rp_channel.stages.assign(static_cast<std::size_t>(f.n_p), stage);
    p.rs_channel.stages.assign(static_cast<std::size_t>(f.n_s), stage);
    p.validate();
    return p;
}

} // namespace detail

inline Scenario parse_scenario(std::istream& in) {
    Scenario s;
    bool saw_schema = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw parse_error("line " + std::to_string(line_no)
                              + ": expected 'key: value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, colon));
        const std::string value = detail::trim(line.substr(colon + 1));
        if (value.empty())
            throw parse_error("field '" + key + "': empty value");

        auto& f = s.fields;
        if (key == "schema") {
            detail::require(detail::parse_int_field(key, value) == 1, key,
                            "unsupported schema version '" + value + "'");
            saw_schema = true;
        } else if (key == "name") {
            s.name = value;
        } else if (key == "P_T_dB") {
            f.P_T_dB = detail::parse_double_field(key, value);
        } else if (key == "rho") {
            f.rho = detail::parse_double_field(key, value);
        } else if (key == "eta") {
            f.eta = detail::parse_double_field(key, value);
        } else if (key == "T") {
            f.T = detail::parse_double_field(key, value);
        } else if (key == "A_f") {
            f.A_f = detail::parse_double_field(key, value);
        } else if (key == "nu_p") {
            f.nu_p = detail::parse_double_field(key, value);
        } else if (key == "nu_s") {
            f.nu_s = detail::parse_double_field(key, value);
        } else if (key == "N0") {
            f.N0 = detail::parse_double_field(key, value);
        } else if (key == "L_R") {
            f.L_R = static_cast<int>(detail::parse_int_field(key, value));
        } else if (key == "L_S") {
            f.L_S = static_cast<int>(detail::parse_int_field(key, value));
        } else if (key == "R_thp") {
            f.R_thp = detail::parse_double_field(key, value);
        } else if (key == "R_ths") {
            f.R_ths = detail::parse_double_field(key, value);
        } else if (key == "R_pt") {
            f.R_pt = detail::parse_double_field(key, value);
        } else if (key == "phi") {
            f.phi = detail::parse_double_field(key, value);
        } else if (key == "U") {
            f.U = static_cast<int>(detail::parse_int_field(key, value));
        } else if (key == "alpha") {
            f.alpha = detail::parse_double_field(key, value);
        } else if (key == "k") {
            f.k = static_cast<int>(detail::parse_int_field(key, value));
        } else if (key == "delta") {
            f.delta = detail::parse_double_field(key, value);
        } else if (key == "kappa") {
            f.kappa = detail::parse_double_field(key, value);
        } else if (key == "mu") {
            f.mu = detail::parse_double_field(key, value);
        } else if (key == "n_p") {
            f.n_p = static_cast<int>(detail::parse_int_field(key, value));
        } else if (key == "n_s") {
            f.n_s = static_cast<int>(detail::parse_int_field(key, value));
        } else if (key == "lambda_p") {
            f.lambda_p = detail::parse_double_field(key, value);
        } else if (key == "sweep") {
            s.sweep.variable = value;
        } else if (key == "values") {
            std::istringstream vs(value);
            std::string tok;
            s.sweep.values.clear();
            while (vs >> tok)
                s.sweep.values.push_back(detail::parse_double_field("values", tok));
            detail::require(!s.sweep.values.empty(), "values", "needs at least one number");
        } else if (key == "engines") {
            s.engine_mc = false;
            s.engine_analytic = false;
            std::istringstream es(value);
            std::string tok;
            while (es >> tok) {
                if (tok == "mc")
                    s.engine_mc = true;
                else if (tok == "analytic")
                    s.engine_analytic = true;
                else
                    throw parse_error("field 'engines': unknown engine '" + tok + "'");
            }
            detail::require(s.engine_mc || s.engine_analytic, "engines",
                            "needs at least one of: mc analytic");
        } else if (key == "optimize") {
            std::istringstream os(value);
            std::string tok;
            s.opt_variants.clear();
            while (os >> tok) {
                if (tok != "joint" && tok != "rho" && tok != "af" && tok != "fixed")
                    throw parse_error("field 'optimize': unknown variant '" + tok + "'");
                s.opt_variants.push_back(tok);
            }
        } else if (key == "rho0") {
            s.opt.rho0 = detail::parse_double_field(key, value);
        } else if (key == "af0") {
            s.opt.af0 = detail::parse_double_field(key, value);
        } else if (key == "trials") {
            s.mc.trials = detail::parse_int_field(key, value);
            detail::require(s.mc.trials >= 1, key, "must be at least 1");
        } else if (key == "seed") {
            s.mc.seed = static_cast<std::uint64_t>(detail::parse_int_field(key, value));
        } else if (key == "batch") {
            s.mc.batch = static_cast<int>(detail::parse_int_field(key, value));
            detail::require(s.mc.batch >= 1, key, "must be at least 1");
        } else if (key == "threads") {
            s.mc.threads = static_cast<int>(detail::parse_int_field(key, value));
            detail::require(s.mc.threads >= 1, key, "must be at least 1");
        } else if (key == "rel_tol") {
            s.budget.rel_tol = detail::parse_double_field(key, value);
            detail::require(s.budget.rel_tol > 0.0, key, "must be positive");
        } else if (key == "max_index") {
            s.budget.max_index_per_sum = static_cast<int>(detail::parse_int_field(key, value));
            detail::require(s.budget.max_index_per_sum >= 1, key, "must be at least 1");
        } else {
            throw parse_error("unknown field '" + key + "'");
        }
    }
    if (!saw_schema)
        throw parse_error("field 'schema': missing (expected 'schema: 1')");
    if (!s.sweep.variable.empty()) {
        detail::require(detail::sweepable_fields().count(s.sweep.variable) == 1, "sweep",
                        "'" + s.sweep.variable + "' is not a sweepable field");
        detail::require(!s.sweep.values.empty(), "values",
                        "required when a sweep variable is set");
    } else {
        detail::require(s.sweep.values.empty(), "values",
                        "set without a sweep variable");
    }
    try {
        s.params = detail::assemble(s.fields);
    } catch (const std::domain_error& err) {
        throw parse_error(std::string("invalid scenario: ") + err.what());
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw parse_error("cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

namespace detail {

inline std::vector<double> linear_grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9; v += step)
        out.push_back(v);
    return out;
}

} // namespace detail

// Preset scenarios reproducing the reference operating points. Channel mean
// powers are unity, T = 1, N0 = 1 throughout.
inline Scenario preset(const std::string& name) {
    Scenario s;
    s.name = name;
    auto& f = s.fields;
    if (name == "fig3") {
        f.rho = 0.6;
        f.eta = 0.8;
        f.A_f = 0.8;
        f.lambda_p = 0.5;
        f.phi = 1.0;
        f.k = 1;
        f.kappa = 1.0;
        f.n_p = 2;
        f.n_s = 2;
        f.L_R = 2;
        f.L_S = 2;
        f.R_thp = 0.5;
        f.R_ths = 1.0;
        s.sweep = {"P_T_dB", detail::linear_grid(0.0, 20.0, 2.5)};
    } else if (name == "fig4") {
        f.rho = 0.2;
        f.eta = 0.8;
        f.A_f = 0.2;
        f.nu_p = 0.2;
        f.nu_s = 0.2;
        f.lambda_p = 0.5;
        f.phi = 1.0;
        f.k = 1;
        f.kappa = 1.0;
        f.n_p = 2;
        f.n_s = 2;
        f.L_R = 2;
        f.L_S = 1;
        f.R_thp = 1.0;
        f.R_ths = 1.0;
        s.sweep = {"P_T_dB", detail::linear_grid(0.0, 20.0, 2.5)};
    } else if (name == "fig5") {
        f.rho = 0.2;
        f.eta = 0.8;
        f.A_f = 0.2;
        f.nu_p = 0.2;
        f.nu_s = 0.2;
        f.lambda_p = 0.5;
        f.k = 1;
        f.kappa = 0.0;
        f.n_p = 1;
        f.n_s = 1;
        f.L_R = 2;
        f.L_S = 1;
        f.R_thp = 1.0;
        f.R_ths = 1.0;
        f.P_T_dB = 2.0;
        s.sweep = {"phi", detail::linear_grid(0.25, 2.0, 0.25)};
    } else if (name == "fig6") {
        f.eta = 0.8;
        f.A_f = 0.9;
        f.lambda_p = 0.5;
        f.phi = 0.5;
        f.k = 1;
        f.kappa = 1.0;
        f.n_p = 2;
        f.n_s = 2;
        f.L_R = 2;
        f.L_S = 1;
        f.R_thp = 0.5;
        f.R_ths = 0.5;
        f.P_T_dB = 5.0;
        s.sweep = {"rho", detail::linear_grid(0.05, 0.95, 0.05)};
    } else if (name == "fig7") {
        f.rho = 0.5;
        f.eta = 0.7;
        f.A_f = 0.5;
        f.lambda_p = 1.0;
        f.phi = 100.0;
        f.k = 1;
        f.kappa = 0.0;
        f.n_p = 1;
        f.n_s = 1;
        f.L_R = 1;
        f.L_S = 1;
        f.R_thp = 0.2;
        f.R_ths = 1.0;
        f.P_T_dB = 5.0;
        f.delta = 100.0;
        s.sweep = {"A_f", detail::linear_grid(0.1, 0.9, 0.1)};
        s.engine_analytic = false;
    } else if (name == "fig8") {
        f.rho = 0.2;
        f.eta = 0.8;
        f.A_f = 0.5;
        f.nu_p = 0.1;
        f.nu_s = 0.1;
        f.lambda_p = 0.5;
        f.phi = 1.0;
        f.k = 1;
        f.kappa = 0.0;
        f.n_p = 1;
        f.n_s = 1;
        f.L_R = 2;
        f.L_S = 1;
        f.R_thp = 0.5;
        f.R_ths = 0.5;
        s.sweep = {"P_T_dB", detail::linear_grid(0.0, 20.0, 2.5)};
        s.engine_analytic = false;
    } else if (name == "fig9") {
        f.rho = 0.5;
        f.eta = 0.8;
        f.A_f = 0.5;
        f.lambda_p = 0.5;
        f.phi = 1.0;
        f.k = 1;
        f.kappa = 0.0;
        f.n_p = 2;
        f.n_s = 2;
        f.L_R = 2;
        f.L_S = 1;
        f.R_thp = 1.0;
        f.R_ths = 1.0;
        f.R_pt = 0.4;
        s.sweep = {"P_T_dB", {0.0, 5.0, 10.0, 15.0, 20.0}};
        s.engine_mc = false;
        s.opt_variants = {"joint", "rho", "af", "fixed"};
    } else {
        throw parse_error("unknown preset '" + name + "'");
    }
    s.params = detail::assemble(s.fields);
    return s;
}

inline std::vector<std::string> preset_names() {
    return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
}

// Cross-engine validation grid: 40 parameter combinations, each checked on
// the side whose gate is open at that operating point (primary outage on the
// fig3 operating point, secondary on fig4). A point passes when the
// closed-form and Monte-Carlo estimates agree within max(3 SE, 0.01).
struct ValidationPoint {
    bool primary = true;
    int stages = 1;
    double kappa = 0.0;
    int order = 1;
    double pt_db = 0.0;
};

struct ValidationOutcome {
    ValidationPoint point;
    double closed_form = 1.0;
    double mc = 1.0;
    double mc_se = 0.0;
    double abs_diff = 0.0;
    double tolerance = 0.01;
    bool pass = false;
};

inline SystemParams validation_params(const ValidationPoint& pt) {
    ScenarioFields f;
    f.P_T_dB = pt.pt_db;
    f.eta = 0.8;
    f.lambda_p = 0.5;
    f.phi = 1.0;
    f.k = pt.order;
    f.kappa = pt.kappa;
    f.n_p = pt.stages;
    f.n_s = pt.stages;
    f.L_R = 2;
    if (pt.primary) {
        f.rho = 0.6;
        f.A_f = 0.8;
        f.L_S = 2;
        f.R_thp = 0.5;
        f.R_ths = 1.0;
    } else {
        f.rho = 0.2;
        f.A_f = 0.2;
        f.nu_p = 0.2;
        f.nu_s = 0.2;
        f.L_S = 1;
        f.R_thp = 1.0;
        f.R_ths = 1.0;
    }
    return detail::assemble(f);
}

inline std::vector<ValidationPoint> validation_grid() {
    std::vector<ValidationPoint> grid;
    for (const bool primary : {true, false})
        for (const int stages : {1, 2})
            for (const double kappa : {0.0, 1.0})
                for (const int order : {1, 2})
                    for (const double pt_db : {0.0, 5.0, 10.0, 15.0, 20.0})
                        grid.push_back({primary, stages, kappa, order, pt_db});
    return grid;
}

inline ValidationOutcome run_validation_point(const ValidationPoint& pt,
                                              const McConfig& mc) {
    const SystemParams params = validation_params(pt);
    const OutageResult cf = pt.primary ? outage_pu_closed_form(params)
                                       : outage_su_closed_form(params);
    const McEstimate est = estimate_outage(params, mc);
    ValidationOutcome out;
    out.point = pt;
    out.closed_form = cf.value;
    out.mc = pt.primary ? est.op_p_hat : est.op_s_hat;
    out.mc_se = pt.primary ? est.se_p : est.se_s;
    out.abs_diff = std::abs(out.mc - out.closed_form);
    out.tolerance = std::max(3.0 * out.mc_se, 0.01);
    out.pass = out.abs_diff <= out.tolerance;
    return out;
}

namespace detail {

inline void append_note(std::string& note, const std::string& piece) {
    if (!note.empty())
        note += "; ";
    note += piece;
}

} // namespace detail

inline std::vector<ResultRow> run_scenario(const Scenario& s) {
    std::vector<ResultRow> rows;
    std::vector<double> sweep_values = s.sweep.values;
    const bool swept = !s.sweep.variable.empty();
    if (!swept)
        sweep_values = {0.0};

    for (const double value : sweep_values) {
        ResultRow row;
        row.scenario = s.name;
        row.sweep_variable = swept ? s.sweep.variable : "none";
        row.sweep_value = value;

        ScenarioFields fields = s.fields;
        if (swept)
            fields.*(detail::sweepable_fields().at(s.sweep.variable)) = value;

        SystemParams params;
        try {
            params = detail::assemble(fields);
        } catch (const std::exception& err) {
            row.note = err.what();
            rows.push_back(row);
            continue;
        }

        std::optional<double> op_p;
        std::optional<double> op_s;
        if (s.engine_mc) {
            try {
                const McEstimate est = estimate_outage(params, s.mc);
                row.op_p_mc = est.op_p_hat;
                row.op_p_mc_se = est.se_p;
                row.op_s_mc = est.op_s_hat;
                row.op_s_mc_se = est.se_s;
                op_p = est.op_p_hat;
                op_s = est.op_s_hat;
            } catch (const std::exception& err) {
                detail::append_note(row.note, std::string("mc: ") + err.what());
            }
        }
        if (s.engine_analytic) {
            try {
                const OutageResult pu = outage_pu_closed_form(params, s.budget);
                const OutageResult su = outage_su_closed_form(params, s.budget);
                row.op_p_analytic = pu.value;
                row.op_s_analytic = su.value;
                row.analytic_converged = (pu.converged && su.converged) ? 1 : 0;
                if (!op_p) {
                    op_p = pu.value;
                    op_s = su.value;
                }
            } catch (const std::exception& err) {
                detail::append_note(row.note, std::string("analytic: ") + err.what());
            }
        }
        if (op_p && op_s) {
            try {
                const ThroughputResult tr = throughput(params, *op_p, *op_s);
                row.tau = tr.tau;
                row.ee = energy_efficiency(params, tr.tau);
            } catch (const std::exception& err) {
                detail::append_note(row.note, std::string("metrics: ") + err.what());
            }
        }

        for (const std::string& variant : s.opt_variants) {
            try {
                double rho_star = s.opt.rho0;
                double af_star = s.opt.af0;
                if (variant == "joint") {
                    const OptResult r = solve_biconvex(params, s.opt);
                    if (!r.feasible) {
                        detail::append_note(row.note, "optimize joint: infeasible R_pt");
                        continue;
                    }
                    rho_star = r.rho_star;
                    af_star = r.af_star;
                } else if (variant == "rho") {
                    rho_star = solve_inner_fixed_af(params, s.opt.af0, s.opt).x_star;
                } else if (variant == "af") {
                    af_star = solve_inner_fixed_rho(params, s.opt.rho0, s.opt).x_star;
                }
                row.extras.emplace_back(variant + "_rho", rho_star);
                row.extras.emplace_back(variant + "_af", af_star);
                row.extras.emplace_back(variant + "_rate",
                                        objective(params, rho_star, af_star));
            } catch (const std::exception& err) {
                detail::append_note(row.note, "optimize " + variant + ": " + err.what());
            }
        }

        rows.push_back(row);
    }
    return rows;
}

namespace detail {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string sanitize_note(std::string note) {
    for (char& c : note)
        if (c == ',' || c == '\n' || c == '\r')
            c = ';';
    return note;
}

inline std::vector<std::string> extra_columns(const std::vector<ResultRow>& rows) {
    std::vector<std::string> cols;
    for (const auto& row : rows)
        for (const auto& [name, value] : row.extras)
            if (std::find(cols.begin(), cols.end(), name) == cols.end())
                cols.push_back(name);
    return cols;
}

} // namespace detail

// Stable text output: every column named in the header, 12 significant
// digits (round-trip safe for double), no timing or host information, so
// repeated runs with the same seed are byte-identical.
inline void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    const std::vector<std::string> extras = detail::extra_columns(rows);
    out << "scenario,sweep_variable,sweep_value,op_p_mc,op_p_mc_se,op_s_mc,op_s_mc_se,"
           "op_p_analytic,op_s_analytic,analytic_converged,tau,ee";
    for (const auto& name : extras)
        out << ',' << name;
    out << ",note\n";

    const auto cell = [&](const std::optional<double>& v) {
        return v ? detail::format_number(*v) : std::string();
    };
    for (const auto& row : rows) {
        out << row.scenario << ',' << row.sweep_variable << ','
            << detail::format_number(row.sweep_value) << ',' << cell(row.op_p_mc) << ','
            << cell(row.op_p_mc_se) << ',' << cell(row.op_s_mc) << ','
            << cell(row.op_s_mc_se) << ',' << cell(row.op_p_analytic) << ','
            << cell(row.op_s_analytic) << ','
            << (row.analytic_converged ? std::to_string(*row.analytic_converged)
                                       : std::string())
            << ',' << cell(row.tau) << ',' << cell(row.ee);
        for (const auto& name : extras) {
            out << ',';
            for (const auto& [extra_name, extra_value] : row.extras) {
                if (extra_name == name) {
                    out << detail::format_number(extra_value);
                    break;
                }
            }
        }
        out << ',' << detail::sanitize_note(row.note) << '\n';
    }
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw parse_error("cannot open output file '" + path + "'");
    emit_csv(rows, out);
}

// One two-column file per populated series, for direct use by plot tools.
inline std::vector<std::string> emit_plotdata(const std::vector<ResultRow>& rows,
                                              const std::string& prefix) {
    std::vector<std::string> written;
    const auto write_series = [&](const std::string& column,
                                  const std::function<std::optional<double>(const ResultRow&)>&
                                      pick) {
        bool any = false;
        for (const auto& row : rows)
            if (pick(row))
                any = true;
        if (!any)
            return;
        const std::string path = prefix + "_" + column + ".dat";
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw parse_error("cannot open output file '" + path + "'");
        out << "# " << (rows.empty() ? std::string("x") : rows.front().sweep_variable)
            << ' ' << column << '\n';
        for (const auto& row : rows)
            if (const auto v = pick(row))
                out << detail::format_number(row.sweep_value) << ' '
                    << detail::format_number(*v) << '\n';
        written.push_back(path);
    };

    write_series("op_p_mc", [](const ResultRow& r) { return r.op_p_mc; });
    write_series("op_s_mc", [](const ResultRow& r) { return r.op_s_mc; });
    write_series("op_p_analytic", [](const ResultRow& r) { return r.op_p_analytic; });
    write_series("op_s_analytic", [](const ResultRow& r) { return r.op_s_analytic; });
    write_series("tau", [](const ResultRow& r) { return r.tau; });
    write_series("ee", [](const ResultRow& r) { return r.ee; });
    for (const auto& column : detail::extra_columns(rows)) {
        write_series(column, [&](const ResultRow& r) -> std::optional<double> {
            for (const auto& [name, value] : r.extras)
                if (name == column)
                    return value;
            return std::nullopt;
        });
    }
    return written;
}

} // namespace crnsim

#endif
