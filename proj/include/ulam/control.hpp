#pragma once

#include <optional>
#include <string>

#include "ulam/funceq.hpp"
#include "ulam/maps.hpp"

namespace ulam {

enum class ControlFamily {
    power_sum,         // theta * (||x||^r + ||y||^r), arity 2
    power_product,     // theta * ||x||^p ||y||^p ||z||^p, arity 3
    power_sum3,        // theta * (||x||^s + ||y||^s + ||z||^s), arity 3
    const_plus_power,  // delta + theta * (||x||^r + ||y||^r), arity 2
    single_arg,        // theta * ||y||^r, arity 2
};

std::string to_string(ControlFamily family);
ControlFamily control_family_from_string(const std::string& name);

// Parametric majorant family with an analytic contraction factor per scale
// step. theta may be fitted from measured residuals; delta and the exponent
// are always given.
struct ControlFunction {
    ControlFamily family = ControlFamily::power_sum;
    double theta = 0.0;
    double exponent = 1.0;  // r, p, or s depending on family
    double delta = 0.0;     // const_plus_power only

    int arity() const;
    double eval(const AlgebraElement& x, const AlgebraElement& y) const;
    double eval(const AlgebraElement& x, const AlgebraElement& y, const AlgebraElement& z) const;
    double eval_norms(double nx, double ny) const;
    double eval_norms(double nx, double ny, double nz) const;

    ControlFunction with_theta(double t) const {
        ControlFunction c = *this;
        c.theta = t;
        return c;
    }
};

// Minimal Lipschitz factor certificate for the corrector step. `feasible`
// means every requested factor is < 1 so a single L < 1 serves both control
// functions (L = max of the per-family factors). `closed_form_choice` means
// the binary-side factor alone may be used as L (the ternary factor does not
// exceed it), which is what the power-family closed-form bounds assume.
struct ContractionCertificate {
    bool feasible = false;
    double L = 0.0;
    double L_phi = 0.0;
    std::optional<double> L_psi;
    ScaleDirection direction = ScaleDirection::shrink;
    bool closed_form_choice = false;
    std::string binding;      // which factor determines L
    std::string infeasible_reason;
};

// Factor for one family: smallest L with
//   shrink: c(x/a,...) <= (L/|a|^{km}) c(x,...),
//   expand: c(ax,...)  <= |a|^{km} L c(x,...),
// where k = 1 for binary controls and k = 3 for ternary ones.
// Returns L >= 1 (infeasible) at boundary or wrong-direction exponents; a
// positive delta is infeasible under shrink and harmless under expand.
double family_contraction_factor(const ControlFunction& c, int a, int m, ScaleDirection dir);

// Numerical cross-check of the analytic factor: the max of the same ratio
// over sampled tuples. A grid estimate is a lower bound of the true sup, so
// it can only confirm (not improve) the analytic value.
double measure_contraction_factor(const ControlFunction& c, int a, int m, ScaleDirection dir,
                                  int samples, std::uint64_t seed);

ContractionCertificate contraction_factor(const ControlFunction& phi,
                                          const std::optional<ControlFunction>& psi, int a, int m,
                                          ScaleDirection direction);

// Hyers-Ulam bound at x:
//   shrink: L/(2|a|^m (1-L)) * phi(x, 0)
//   expand: 1/(2|a|^m (1-L)) * phi(x, 0)
double bound_value(const ControlFunction& phi, double L, int a, int m, const AlgebraElement& x,
                   ScaleDirection variant);
double bound_value_at_radius(const ControlFunction& phi, double L, int a, int m, double radius,
                             ScaleDirection variant);

// Power-family closed form theta/(2(|a|^r - |a|^m)) ||x||^r (shrink) and its
// expand mirror with the |delta|-term; agrees with bound_value at the
// analytic L for these families.
double closed_form_bound_at_radius(const ControlFunction& phi, int a, int m, double radius,
                                   ScaleDirection variant);

struct ThetaFit {
    double theta = 0.0;
    bool feasible = true;       // false: positive residual where the shape vanishes
    double zero_tolerance = 0.0;
    std::vector<AlgebraElement> attaining;
    std::string note;
};

struct FitOptions {
    // Residuals below zero_rel_tol * local term scale count as zero; keeps
    // rounding noise in exactly-cancelling sums from poisoning 0/0 cases.
    double zero_rel_tol = 1e-10;
    bool include_zero = true;  // sweep pairs over grid points plus the origin
};

// theta_hat = sup over grid pairs of ||Delta_m f(x,y)|| / shape(x,y) where
// shape is the family with theta = 1 (minus delta for const_plus_power).
ThetaFit fit_theta(const MapFn& f, const ControlFunction& family, const EvalGrid& grid, int a,
                   int m, const FitOptions& opts = {});
ThetaFit fit_theta(const MapSpec& f, const ControlFunction& family, const EvalGrid& grid, int a,
                   int m, const FitOptions& opts = {});

// Ternary-side fit against measured derivation or sigma-homomorphism
// residuals over grid triples.
ThetaFit fit_theta_ternary(const MapFn& f, const ControlFunction& family, const EvalGrid& grid,
                           const SupParams& params, ResidualKind kind,
                           const FitOptions& opts = {});

}  // namespace ulam
