#include "ulam/config_io.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ulam {

namespace {

// Tracks which keys of an object were consumed; leftovers are config errors,
// so typos never silently change an experiment.
class StrictObject {
public:
    StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) throw ConfigError(context_ + ": expected an object");
    }

    bool has(const char* key) {
        known_.insert(key);
        return j_.contains(key);
    }

    const json& at(const char* key) {
        known_.insert(key);
        if (!j_.contains(key)) throw ConfigError(context_ + ": missing required key '" + key + "'");
        return j_.at(key);
    }

    template <typename T>
    T get(const char* key, T fallback) {
        known_.insert(key);
        if (!j_.contains(key)) return fallback;
        try {
            return j_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(context_ + "." + key + ": " + e.what());
        }
    }

    void finish() {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!known_.count(it.key()))
                throw ConfigError(context_ + ": unknown key '" + it.key() + "'");
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> known_;
};

json complex_to_json(complexd v) { return json::array({v.real(), v.imag()}); }

complexd complex_from_json(const json& j, const std::string& ctx) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(ctx + ": expected a number or [re, im]");
}

json element_to_json(const AlgebraElement& e) {
    json entries = json::array();
    for (const auto& v : e.entries()) entries.push_back(complex_to_json(v));
    return json{{"dim", e.dim()}, {"entries", entries}};
}

AlgebraElement element_from_json(const json& j, const std::string& ctx) {
    if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()))
        return AlgebraElement::scalar(complex_from_json(j, ctx));
    StrictObject obj(j, ctx);
    int dim = obj.at("dim").get<int>();
    const json& entries = obj.at("entries");
    obj.finish();
    if (!entries.is_array()) throw ConfigError(ctx + ".entries: expected an array");
    std::vector<complexd> vals;
    for (size_t i = 0; i < entries.size(); ++i)
        vals.push_back(complex_from_json(entries[i], ctx + ".entries"));
    return AlgebraElement(dim, std::move(vals));
}

std::string base_kind_name(BaseKind k) {
    switch (k) {
        case BaseKind::zero: return "zero";
        case BaseKind::monomial: return "monomial";
        case BaseKind::inner_derivation: return "inner_derivation";
    }
    return "?";
}

BaseKind base_kind_from_name(const std::string& name) {
    if (name == "zero") return BaseKind::zero;
    if (name == "monomial") return BaseKind::monomial;
    if (name == "inner_derivation") return BaseKind::inner_derivation;
    throw ConfigError("unknown base type: " + name);
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
    StrictObject root(j, "config");
    ExperimentConfig cfg;
    cfg.kind = experiment_kind_from_string(root.at("kind").get<std::string>());

    if (root.has("algebra")) {
        StrictObject a(j.at("algebra"), "config.algebra");
        cfg.algebra.dim = a.get("dim", 1);
        cfg.algebra.rule = product_rule_from_string(a.get<std::string>("product", "derived"));
        cfg.algebra.corrupt_product = a.get("corrupt_product", false);
        a.finish();
        if (cfg.algebra.dim < 1 || cfg.algebra.dim > 8)
            throw ConfigError("config.algebra.dim: expected 1..8");
    }

    if (root.has("base")) {
        StrictObject b(j.at("base"), "config.base");
        cfg.base.kind = base_kind_from_name(b.at("type").get<std::string>());
        if (b.has("coeff"))
            cfg.base.coeff = element_from_json(j.at("base").at("coeff"), "config.base.coeff");
        if (b.has("coeff_seed")) cfg.base.coeff_seed = b.get<std::uint64_t>("coeff_seed", 0);
        cfg.base.degree = b.get("degree", 1);
        b.finish();
    }

    if (root.has("perturbation")) {
        StrictObject p(j.at("perturbation"), "config.perturbation");
        std::string type = p.at("type").get<std::string>();
        if (type == "none") {
            cfg.perturbation.kind = PerturbationKind::none;
        } else if (type == "radial") {
            cfg.perturbation.kind = PerturbationKind::radial;
            cfg.perturbation.epsilon = p.at("epsilon").get<double>();
            cfg.perturbation.exponent = p.at("exponent").get<double>();
            cfg.perturbation.direction =
                radial_direction_from_string(p.get<std::string>("direction", "fixed"));
            cfg.perturbation.seed = p.get<std::uint64_t>("seed", 0);
            if (p.has("unit"))
                cfg.perturbation.unit =
                    element_from_json(j.at("perturbation").at("unit"), "config.perturbation.unit");
        } else {
            throw ConfigError("unknown perturbation type: " + type);
        }
        p.finish();
    }

    cfg.m = root.get("m", 1);
    cfg.a = root.get("a", 2);
    if (root.has("direction"))
        cfg.direction = direction_from_string(j.at("direction").get<std::string>());

    auto parse_control = [&](const char* key) -> std::optional<ControlConfig> {
        if (!root.has(key)) return std::nullopt;
        StrictObject c(j.at(key), std::string("config.") + key);
        ControlConfig cc;
        cc.family = control_family_from_string(c.at("family").get<std::string>());
        if (c.has("theta")) cc.theta = c.get("theta", 0.0);
        cc.exponent = c.at("exponent").get<double>();
        cc.delta = c.get("delta", 0.0);
        c.finish();
        return cc;
    };
    cfg.phi = parse_control("phi");
    cfg.psi = parse_control("psi");

    cfg.depth = root.get("depth", 20);

    if (root.has("grid")) {
        StrictObject g(j.at("grid"), "config.grid");
        cfg.grid.radius = g.get("radius", 1.0);
        cfg.grid.shells = g.get("shells", 10);
        cfg.grid.directions = g.get("directions", 4);
        cfg.grid.seed = g.get<std::uint64_t>("seed", 11);
        g.finish();
    }

    if (root.has("sigma")) {
        const json& s = j.at("sigma");
        if (!s.is_array() || s.size() != 3)
            throw ConfigError("config.sigma: expected an array of three images");
        cfg.sigma = Permutation3({s[0].get<int>(), s[1].get<int>(), s[2].get<int>()});
    }

    cfg.seed = root.get<std::uint64_t>("seed", 42);
    if (root.has("uniqueness_seed"))
        cfg.uniqueness_seed = root.get<std::uint64_t>("uniqueness_seed", 0);
    cfg.tuple_budget = root.get<long long>("tuple_budget", 10000);
    cfg.axiom_samples = root.get("axiom_samples", 100);

    if (root.has("tolerances")) {
        StrictObject t(j.at("tolerances"), "config.tolerances");
        cfg.tol.residual_rel = t.get("residual_rel", cfg.tol.residual_rel);
        cfg.tol.exactness_rel = t.get("exactness_rel", cfg.tol.exactness_rel);
        cfg.tol.identity_rel = t.get("identity_rel", cfg.tol.identity_rel);
        cfg.tol.ratio_rel = t.get("ratio_rel", cfg.tol.ratio_rel);
        cfg.tol.uniqueness_abs = t.get("uniqueness_abs", cfg.tol.uniqueness_abs);
        t.finish();
    }

    root.finish();
    return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return experiment_config_from_json(j);
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["kind"] = to_string(cfg.kind);
    j["algebra"] = {{"dim", cfg.algebra.dim},
                    {"product", to_string(cfg.algebra.rule)},
                    {"corrupt_product", cfg.algebra.corrupt_product}};
    json base{{"type", base_kind_name(cfg.base.kind)}};
    if (cfg.base.coeff) base["coeff"] = element_to_json(*cfg.base.coeff);
    if (cfg.base.coeff_seed) base["coeff_seed"] = *cfg.base.coeff_seed;
    base["degree"] = cfg.base.degree;
    j["base"] = base;
    if (cfg.perturbation.kind == PerturbationKind::none) {
        j["perturbation"] = {{"type", "none"}};
    } else {
        json p{{"type", "radial"},
               {"epsilon", cfg.perturbation.epsilon},
               {"exponent", cfg.perturbation.exponent},
               {"direction", to_string(cfg.perturbation.direction)},
               {"seed", cfg.perturbation.seed}};
        if (cfg.perturbation.unit) p["unit"] = element_to_json(*cfg.perturbation.unit);
        j["perturbation"] = p;
    }
    j["m"] = cfg.m;
    j["a"] = cfg.a;
    j["direction"] = to_string(cfg.direction);
    auto control_json = [](const ControlConfig& c) {
        json out{{"family", to_string(c.family)}};
        if (c.theta) out["theta"] = *c.theta;
        out["exponent"] = c.exponent;
        out["delta"] = c.delta;
        return out;
    };
    if (cfg.phi) j["phi"] = control_json(*cfg.phi);
    if (cfg.psi) j["psi"] = control_json(*cfg.psi);
    j["depth"] = cfg.depth;
    j["grid"] = {{"radius", cfg.grid.radius},
                 {"shells", cfg.grid.shells},
                 {"directions", cfg.grid.directions},
                 {"seed", cfg.grid.seed}};
    if (cfg.sigma)
        j["sigma"] = json::array(
            {cfg.sigma->image(1), cfg.sigma->image(2), cfg.sigma->image(3)});
    j["seed"] = cfg.seed;
    if (cfg.uniqueness_seed) j["uniqueness_seed"] = *cfg.uniqueness_seed;
    j["tuple_budget"] = cfg.tuple_budget;
    j["axiom_samples"] = cfg.axiom_samples;
    j["tolerances"] = {{"residual_rel", cfg.tol.residual_rel},
                       {"exactness_rel", cfg.tol.exactness_rel},
                       {"identity_rel", cfg.tol.identity_rel},
                       {"ratio_rel", cfg.tol.ratio_rel},
                       {"uniqueness_abs", cfg.tol.uniqueness_abs}};
    return j;
}

namespace {

json verdict_to_json(const Verdict& v) {
    json j{{"name", v.name},
           {"passed", v.passed},
           {"informational", v.informational},
           {"measured", v.measured},
           {"allowed", v.allowed},
           {"detail", v.detail}};
    if (!v.witness.empty()) {
        json w = json::array();
        for (const auto& e : v.witness) w.push_back(element_to_json(e));
        j["witness"] = w;
    }
    return j;
}

json fit_to_json(const ThetaFit& f) {
    json j{{"theta", f.theta}, {"feasible", f.feasible}, {"zero_tolerance", f.zero_tolerance}};
    if (!f.note.empty()) j["note"] = f.note;
    if (!f.attaining.empty()) {
        json w = json::array();
        for (const auto& e : f.attaining) w.push_back(element_to_json(e));
        j["attaining"] = w;
    }
    return j;
}

json certificate_to_json(const ContractionCertificate& c) {
    json j{{"feasible", c.feasible},
           {"L", c.L},
           {"L_phi", c.L_phi},
           {"direction", to_string(c.direction)},
           {"closed_form_choice", c.closed_form_choice},
           {"binding", c.binding}};
    if (c.L_psi) j["L_psi"] = *c.L_psi;
    if (!c.infeasible_reason.empty()) j["infeasible_reason"] = c.infeasible_reason;
    return j;
}

json axiom_report_to_json(const AxiomReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"max_violation", c.max_violation},
                          {"max_rel_violation", c.max_rel_violation}});
    return json{{"samples", r.samples}, {"seed", r.seed}, {"checks", checks}};
}

}  // namespace

json report_to_json(const ExperimentReport& report) {
    json j;
    j["config"] = experiment_config_to_json(report.config);
    if (!report.exact_base.empty()) j["exact_base"] = report.exact_base;
    if (report.theta_phi) j["theta_phi"] = fit_to_json(*report.theta_phi);
    if (report.theta_psi) j["theta_psi"] = fit_to_json(*report.theta_psi);
    if (report.certificate) j["certificate"] = certificate_to_json(*report.certificate);
    if (report.extraction) {
        const auto& e = *report.extraction;
        j["extraction"] = {{"status", to_string(e.status)},
                           {"picard_distances", e.picard_distances},
                           {"initial_delta_rel", e.initial_delta_rel},
                           {"terminal_delta_rel", e.terminal_delta_rel},
                           {"note", e.note}};
    }
    if (report.convergence) {
        const auto& c = *report.convergence;
        json checks = json::array();
        for (const auto& pc : c.checks)
            checks.push_back({{"name", pc.name},
                              {"passed", pc.passed},
                              {"measured", pc.measured},
                              {"allowed", pc.allowed}});
        j["convergence"] = {{"metric_distances", c.metric_distances},
                            {"d0", c.d0},
                            {"measured_ratio", c.measured_ratio},
                            {"ratio_defined", c.ratio_defined},
                            {"metric_infinite", c.metric_infinite},
                            {"checks", checks}};
    }
    j["residuals"] = {{"delta_f_rel", report.delta_f_rel},
                      {"delta_extracted_rel", report.delta_extracted_rel},
                      {"ternary_f_rel", report.ternary_f_rel},
                      {"ternary_extracted_rel", report.ternary_extracted_rel}};
    if (!report.curve.empty()) {
        json curve = json::array();
        for (const auto& s : report.curve)
            curve.push_back({{"radius", s.radius},
                             {"measured_error", s.measured_error},
                             {"bound_value", s.bound_value},
                             {"ratio", s.ratio}});
        j["curve"] = curve;
    }
    if (report.algebra_axioms) j["algebra_axioms"] = axiom_report_to_json(*report.algebra_axioms);
    if (report.module_axioms) j["module_axioms"] = axiom_report_to_json(*report.module_axioms);
    if (report.superstability) {
        const auto& s = *report.superstability;
        json sj{{"verdict", s.verdict},
                {"hypothesis_ok", s.hypothesis_ok},
                {"hypothesis_sup_rel", s.hypothesis_sup_rel},
                {"homogeneity_ok", s.homogeneity_ok},
                {"homogeneity_worst_rel", s.homogeneity_worst_rel},
                {"rescaled_delta_ok", s.rescaled_delta_ok},
                {"rescaled_delta_worst_rel", s.rescaled_delta_worst_rel},
                {"rescaled_ternary_ok", s.rescaled_ternary_ok},
                {"rescaled_ternary_worst_rel", s.rescaled_ternary_worst_rel}};
        if (s.witness) {
            sj["witness"] = element_to_json(*s.witness);
            sj["witness_measured"] = s.witness_measured;
            sj["witness_oracle"] = s.witness_oracle;
        }
        j["superstability"] = sj;
    }
    if (!report.monomial_rows.empty()) {
        json rows = json::array();
        for (const auto& r : report.monomial_rows)
            rows.push_back({{"m", r.m},
                            {"a", r.a},
                            {"c", complex_to_json(r.c)},
                            {"sup_rel", r.sup_rel},
                            {"passed", r.passed}});
        j["monomial_rows"] = rows;
    }
    if (!report.classical_rows.empty()) {
        json rows = json::array();
        for (const auto& r : report.classical_rows)
            rows.push_back({{"m", r.m}, {"worst_rel", r.worst_rel}, {"passed", r.passed}});
        j["classical_rows"] = rows;
    }
    json verdicts = json::array();
    for (const auto& v : report.verdicts) verdicts.push_back(verdict_to_json(v));
    j["verdicts"] = verdicts;
    j["all_passed"] = report.all_passed;
    j["exit_code"] = report.exit_code;
    j["overall"] = report.overall;
    j["wall_clock_ms"] = report.wall_clock_ms;
    return j;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_number_float()) {
        out << prefix << "," << format_g17(j.get<double>()) << "\n";
    } else {
        out << prefix << "," << j.dump() << "\n";
    }
}

}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "key,value\n";
    flatten(report_to_json(report), "", out);
    return out.str();
}

std::string curve_to_csv(const std::vector<CurveSample>& curve) {
    std::ostringstream out;
    out << "radius,measured_error,bound_value,ratio\n";
    for (const auto& s : curve)
        out << format_g17(s.radius) << "," << format_g17(s.measured_error) << ","
            << format_g17(s.bound_value) << "," << format_g17(s.ratio) << "\n";
    return out.str();
}

}  // namespace ulam
