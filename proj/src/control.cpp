#include "ulam/control.hpp"

#include <cmath>

namespace ulam {

std::string to_string(ControlFamily family) {
    switch (family) {
        case ControlFamily::power_sum: return "power_sum";
        case ControlFamily::power_product: return "power_product";
        case ControlFamily::power_sum3: return "power_sum3";
        case ControlFamily::const_plus_power: return "const_plus_power";
        case ControlFamily::single_arg: return "single_arg";
    }
    return "?";
}

ControlFamily control_family_from_string(const std::string& name) {
    if (name == "power_sum") return ControlFamily::power_sum;
    if (name == "power_product") return ControlFamily::power_product;
    if (name == "power_sum3") return ControlFamily::power_sum3;
    if (name == "const_plus_power") return ControlFamily::const_plus_power;
    if (name == "single_arg") return ControlFamily::single_arg;
    throw ConfigError("unknown control family: " + name);
}

int ControlFunction::arity() const {
    switch (family) {
        case ControlFamily::power_sum:
        case ControlFamily::const_plus_power:
        case ControlFamily::single_arg: return 2;
        case ControlFamily::power_product:
        case ControlFamily::power_sum3: return 3;
    }
    return 2;
}

namespace {

// 0^r = 0 for r > 0; avoids pow(0, r) edge cases producing nan for r < 0
double pwr(double base, double e) { return base == 0.0 ? 0.0 : std::pow(base, e); }

void validate(const ControlFunction& c) {
    if (c.theta < 0.0 || c.delta < 0.0) throw ConfigError("control function: theta, delta >= 0");
    if (c.exponent <= 0.0) throw ConfigError("control function: exponent must be > 0");
    if (c.delta > 0.0 && c.family != ControlFamily::const_plus_power)
        throw ConfigError("control function: delta only valid for const_plus_power");
}

}  // namespace

double ControlFunction::eval_norms(double nx, double ny) const {
    validate(*this);
    if (arity() != 2)
        throw StructuralError("control function arity mismatch: ternary family given 2 points");
    switch (family) {
        case ControlFamily::power_sum: return theta * (pwr(nx, exponent) + pwr(ny, exponent));
        case ControlFamily::const_plus_power:
            return delta + theta * (pwr(nx, exponent) + pwr(ny, exponent));
        case ControlFamily::single_arg: return theta * pwr(ny, exponent);
        default: return 0.0;
    }
}

double ControlFunction::eval_norms(double nx, double ny, double nz) const {
    validate(*this);
    if (arity() != 3)
        throw StructuralError("control function arity mismatch: binary family given 3 points");
    if (family == ControlFamily::power_product)
        return theta * pwr(nx, exponent) * pwr(ny, exponent) * pwr(nz, exponent);
    return theta * (pwr(nx, exponent) + pwr(ny, exponent) + pwr(nz, exponent));
}

double ControlFunction::eval(const AlgebraElement& x, const AlgebraElement& y) const {
    return eval_norms(x.norm(), y.norm());
}

double ControlFunction::eval(const AlgebraElement& x, const AlgebraElement& y,
                             const AlgebraElement& z) const {
    return eval_norms(x.norm(), y.norm(), z.norm());
}

double family_contraction_factor(const ControlFunction& c, int a, int m, ScaleDirection dir) {
    validate(c);
    const double aa = std::abs(static_cast<double>(a));
    const double e = c.exponent;
    double homogeneity = 0.0;  // c scales by |a|^homogeneity under x -> ax
    int k = 1;                 // |a|^{km} reference scaling
    switch (c.family) {
        case ControlFamily::power_sum:
        case ControlFamily::single_arg:
        case ControlFamily::const_plus_power:
            homogeneity = e;
            k = 1;
            break;
        case ControlFamily::power_product:
            homogeneity = 3.0 * e;
            k = 3;
            break;
        case ControlFamily::power_sum3:
            homogeneity = e;
            k = 3;
            break;
    }
    if (dir == ScaleDirection::shrink) {
        // delta does not shrink with the argument, so any positive delta
        // forces L >= |a|^{km} > 1
        if (c.family == ControlFamily::const_plus_power && c.delta > 0.0)
            return std::pow(aa, static_cast<double>(k) * m);
        return std::pow(aa, static_cast<double>(k) * m - homogeneity);
    }
    // expand: the constant term only needs L >= |a|^{-km}, dominated by the
    // power term whenever the exponent is positive
    return std::pow(aa, homogeneity - static_cast<double>(k) * m);
}

double measure_contraction_factor(const ControlFunction& c, int a, int m, ScaleDirection dir,
                                  int samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("measure_contraction_factor: samples must be >= 1");
    validate(c);
    const int k = c.arity() == 3 ? 3 : 1;
    const double akm = std::pow(std::abs(static_cast<double>(a)), k * m);
    const complexd inv_a{1.0 / static_cast<double>(a), 0.0};
    const complexd mul_a{static_cast<double>(a), 0.0};
    TernaryAlgebra sampler{1, ProductRule::derived, false};
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        // spread radii over several octaves so constant terms are exposed
        complexd scale{std::pow(2.0, 8.0 * (rng.uniform() - 0.5)), 0.0};
        AlgebraElement x = sampler.random_element(rng) * scale;
        AlgebraElement y = sampler.random_element(rng) * scale;
        AlgebraElement z = sampler.random_element(rng) * scale;
        double base = c.arity() == 2 ? c.eval(x, y) : c.eval(x, y, z);
        if (base <= 0.0) continue;
        double stepped;
        if (dir == ScaleDirection::shrink)
            stepped = akm * (c.arity() == 2 ? c.eval(x * inv_a, y * inv_a)
                                            : c.eval(x * inv_a, y * inv_a, z * inv_a));
        else
            stepped = (c.arity() == 2 ? c.eval(x * mul_a, y * mul_a)
                                      : c.eval(x * mul_a, y * mul_a, z * mul_a)) /
                      akm;
        worst = std::max(worst, stepped / base);
    }
    return worst;
}

ContractionCertificate contraction_factor(const ControlFunction& phi,
                                          const std::optional<ControlFunction>& psi, int a, int m,
                                          ScaleDirection direction) {
    if (a == 0 || a == 1 || a == -1)
        throw ConfigError("contraction_factor: a must satisfy a != 0, +-1");
    if (phi.arity() != 2) throw StructuralError("contraction_factor: phi must be binary");
    if (psi && psi->arity() != 3) throw StructuralError("contraction_factor: psi must be ternary");

    ContractionCertificate cert;
    cert.direction = direction;
    cert.L_phi = family_contraction_factor(phi, a, m, direction);
    cert.L = cert.L_phi;
    cert.binding = "phi";
    if (psi) {
        cert.L_psi = family_contraction_factor(*psi, a, m, direction);
        if (*cert.L_psi > cert.L) {
            cert.L = *cert.L_psi;
            cert.binding = "psi";
        }
    }
    cert.closed_form_choice = !psi || *cert.L_psi <= cert.L_phi;
    cert.feasible = cert.L < 1.0;
    if (!cert.feasible) {
        const ControlFunction& culprit = (cert.binding == "psi" && psi) ? *psi : phi;
        std::string side = cert.binding;
        if (culprit.family == ControlFamily::const_plus_power && culprit.delta > 0.0 &&
            direction == ScaleDirection::shrink) {
            cert.infeasible_reason = side + ": constant term does not contract under shrink";
        } else {
            std::string need =
                direction == ScaleDirection::shrink ? "must exceed" : "must be below";
            double threshold =
                (culprit.arity() == 3 && culprit.family == ControlFamily::power_sum3)
                    ? 3.0 * m
                    : static_cast<double>(m);
            cert.infeasible_reason = side + ": exponent " + std::to_string(culprit.exponent) +
                                     " " + need + " " + std::to_string(threshold) +
                                     " for direction " + to_string(direction);
        }
    }
    return cert;
}

double bound_value_at_radius(const ControlFunction& phi, double L, int a, int m, double radius,
                             ScaleDirection variant) {
    if (!(L > 0.0) || L >= 1.0)
        throw ConfigError("bound_value: L must lie in (0,1), got " + std::to_string(L));
    if (phi.arity() != 2) throw StructuralError("bound_value: phi must be binary");
    const double aa = std::abs(static_cast<double>(a));
    const double denom = 2.0 * std::pow(aa, m) * (1.0 - L);
    const double numer = variant == ScaleDirection::shrink ? L : 1.0;
    return numer / denom * phi.eval_norms(radius, 0.0);
}

double bound_value(const ControlFunction& phi, double L, int a, int m, const AlgebraElement& x,
                   ScaleDirection variant) {
    return bound_value_at_radius(phi, L, a, m, x.norm(), variant);
}

double closed_form_bound_at_radius(const ControlFunction& phi, int a, int m, double radius,
                                   ScaleDirection variant) {
    const double aa = std::abs(static_cast<double>(a));
    const double ar = std::pow(aa, phi.exponent);
    const double am = std::pow(aa, m);
    if (phi.family != ControlFamily::power_sum && phi.family != ControlFamily::single_arg &&
        phi.family != ControlFamily::const_plus_power)
        throw StructuralError("closed_form_bound: phi must be a power family");
    const double power_term = phi.theta * std::pow(radius, phi.exponent);
    if (variant == ScaleDirection::shrink) {
        if (!(ar > am)) throw ConfigError("closed_form_bound: needs exponent > m under shrink");
        if (phi.delta > 0.0) throw ConfigError("closed_form_bound: delta infeasible under shrink");
        return power_term / (2.0 * (ar - am));
    }
    if (!(am > ar)) throw ConfigError("closed_form_bound: needs exponent < m under expand");
    return (phi.delta + power_term) / (2.0 * (am - ar));
}

namespace {

struct FitAccumulator {
    ThetaFit fit;
    double zero_rel_tol;

    explicit FitAccumulator(double tol) : zero_rel_tol(tol) { fit.zero_tolerance = tol; }

    void record(double residual_norm, double residual_scale, double shape,
                const std::vector<AlgebraElement>& tuple) {
        // residuals at the rounding floor of their own term scale are zero
        if (residual_norm <= zero_rel_tol * residual_scale) residual_norm = 0.0;
        if (shape <= 0.0) {
            if (residual_norm > 0.0) {
                fit.feasible = false;
                fit.attaining = tuple;
                fit.note = "positive residual where the control shape vanishes";
            }
            return;  // 0/0 contributes nothing
        }
        double ratio = residual_norm / shape;
        if (ratio > fit.theta) {
            fit.theta = ratio;
            if (fit.feasible) fit.attaining = tuple;
        }
    }
};

}  // namespace

ThetaFit fit_theta(const MapFn& f, const ControlFunction& family, const EvalGrid& grid, int a,
                   int m, const FitOptions& opts) {
    if (family.arity() != 2) throw StructuralError("fit_theta: binary control expected");
    std::vector<AlgebraElement> pts = grid.points();
    if (opts.include_zero) pts.push_back(AlgebraElement::zero(pts.front().dim()));
    ControlFunction shape = family.with_theta(1.0);

    FitAccumulator acc(opts.zero_rel_tol);
    for (const auto& x : pts)
        for (const auto& y : pts) {
            Residual r = delta_m(f, x, y, a, m);
            double s = shape.eval(x, y) - shape.delta;  // pure power part
            // const_plus_power: theta majorizes only the excess over delta
            double num = family.family == ControlFamily::const_plus_power
                             ? std::max(0.0, r.norm() - family.delta)
                             : r.norm();
            acc.record(num, r.scale, s, {x, y});
        }
    return acc.fit;
}

ThetaFit fit_theta(const MapSpec& f, const ControlFunction& family, const EvalGrid& grid, int a,
                   int m, const FitOptions& opts) {
    return fit_theta(f.fn(), family, grid, a, m, opts);
}

ThetaFit fit_theta_ternary(const MapFn& f, const ControlFunction& family, const EvalGrid& grid,
                           const SupParams& params, ResidualKind kind, const FitOptions& opts) {
    if (family.arity() != 3) throw StructuralError("fit_theta_ternary: ternary control expected");
    if (kind == ResidualKind::delta)
        throw StructuralError("fit_theta_ternary: expects a triple residual kind");
    std::vector<AlgebraElement> pts = grid.points();
    ControlFunction shape = family.with_theta(1.0);

    FitAccumulator acc(opts.zero_rel_tol);
    Rng rng(params.subsample_seed);
    const long long total = static_cast<long long>(pts.size()) * pts.size() * pts.size();
    const bool subsample = total > params.tuple_budget;
    const double keep = subsample ? static_cast<double>(params.tuple_budget) / total : 1.0;
    for (const auto& x : pts)
        for (const auto& y : pts)
            for (const auto& z : pts) {
                if (subsample && rng.uniform() >= keep) continue;
                Residual r = kind == ResidualKind::derivation
                                 ? derivation_residual(f, x, y, z, params.m, params.algebra)
                                 : sigma_hom_residual(f, x, y, z, params.sigma, params.algebra,
                                                      params.algebra);
                acc.record(r.norm(), r.scale, shape.eval(x, y, z), {x, y, z});
            }
    return acc.fit;
}

}  // namespace ulam
