#include "ulam/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ulam {

ScaledMapView::ScaledMapView(MapFn f, int a, int m, int depth, ScaleDirection direction)
    : f_(std::move(f)), a_(a), m_(m), depth_(depth), direction_(direction) {
    validate_scale_params(a_, m_, depth_);
}

AlgebraElement ScaledMapView::operator()(const AlgebraElement& x) const {
    return evaluate_scaled(f_, x, a_, m_, depth_, direction_);
}

MapFn ScaledMapView::fn() const {
    ScaledMapView copy = *this;
    return [copy](const AlgebraElement& x) { return copy(x); };
}

ScaledMapView apply_T(const ScaledMapView& g) {
    return ScaledMapView(g.fn(), g.a(), g.m(), 1, g.direction());
}

ScaledMapView apply_T(const MapSpec& g, int a, int m, ScaleDirection direction) {
    return ScaledMapView(g.fn(), a, m, 1, direction);
}

std::string to_string(ExtractionStatus s) {
    switch (s) {
        case ExtractionStatus::converged: return "converged";
        case ExtractionStatus::stagnated: return "stagnated";
        case ExtractionStatus::diverged: return "diverged";
    }
    return "?";
}

void ExtractionConfig::validate() const {
    validate_scale_params(a, m, depth);
    if (depth < 1 || depth > 40)
        throw ConfigError("extraction depth must be in 1..40, got " + std::to_string(depth));
}

namespace {

double sup_delta_rel(const MapFn& f, const EvalGrid& grid, int a, int m) {
    SupParams params;
    params.a = a;
    params.m = m;
    return residual_sup(ResidualKind::delta, f, grid, params).sup_relative;
}

}  // namespace

ExtractionResult extract(const MapFn& f, const ExtractionConfig& cfg, const EvalGrid& grid) {
    cfg.validate();
    std::vector<AlgebraElement> pts = grid.points();
    if (pts.empty()) throw ConfigError("extract: empty grid");

    ExtractionResult result{ScaledMapView(f, cfg.a, cfg.m, cfg.depth, cfg.direction)};

    for (int n = 0; n < cfg.depth; ++n) {
        double dist = 0.0;
        for (const auto& x : pts) {
            AlgebraElement gn = evaluate_scaled(f, x, cfg.a, cfg.m, n, cfg.direction);
            AlgebraElement gn1 = evaluate_scaled(f, x, cfg.a, cfg.m, n + 1, cfg.direction);
            dist = std::max(dist, (gn - gn1).norm());
        }
        result.picard_distances.push_back(dist);
    }

    result.initial_delta_rel = sup_delta_rel(f, grid, cfg.a, cfg.m);
    result.terminal_delta_rel = sup_delta_rel(result.extracted.fn(), grid, cfg.a, cfg.m);

    if (result.terminal_delta_rel <= cfg.residual_rel_tol) {
        result.status = ExtractionStatus::converged;
        return result;
    }
    // The iterates never reached an approximate solution; decide between
    // outright growth and a stalled sequence over the last 5-step window.
    const auto& d = result.picard_distances;
    const size_t w = std::min<size_t>(5, d.size());
    const double last = d.back();
    const double window_start = d[d.size() - w];
    if (last > window_start * (1.0 + 1e-12) && last > 0.0) {
        result.status = ExtractionStatus::diverged;
        result.note = "grid Picard distances grew over the final window";
    } else {
        result.status = ExtractionStatus::stagnated;
        result.note = "terminal residual above tolerance with no distance decrease";
    }
    return result;
}

ExtractionResult extract(const MapSpec& f, const ExtractionConfig& cfg, const EvalGrid& grid) {
    return extract(f.fn(), cfg, grid);
}

MetricEstimate generalized_metric(const MapFn& g, const MapFn& h, const ControlFunction& phi,
                                  const EvalGrid& grid, double zero_rel_tol) {
    if (phi.arity() != 2) throw StructuralError("generalized_metric: phi must be binary");
    const AlgebraElement zero = AlgebraElement::zero(grid.directions.front().dim());
    if (!g(zero).is_zero() || !h(zero).is_zero())
        throw StructuralError("generalized_metric: maps must vanish at 0 (membership in Omega)");

    MetricEstimate est;
    for (const auto& x : grid.points()) {
        AlgebraElement gv = g(x), hv = h(x);
        double num = (gv - hv).norm();
        double den = phi.eval_norms(x.norm(), 0.0);
        if (num <= zero_rel_tol * std::max(gv.norm(), hv.norm())) num = 0.0;
        if (den <= 0.0) {
            if (num > 0.0) {
                est.infinite = true;
                est.attaining = x;
                return est;
            }
            continue;  // 0/0 contributes nothing
        }
        double ratio = num / den;
        if (ratio > est.value) {
            est.value = ratio;
            est.attaining = x;
        }
    }
    return est;
}

ConvergenceReport picard_diagnostics(const MapFn& f, const ControlFunction& phi,
                                     const ContractionCertificate& cert,
                                     const ExtractionConfig& cfg, const EvalGrid& grid,
                                     const PicardOptions& opts) {
    cfg.validate();
    if (!cert.feasible)
        throw ConfigError("picard_diagnostics: infeasible certificate (" +
                          cert.infeasible_reason + ")");
    ConvergenceReport report;
    std::vector<AlgebraElement> pts = grid.points();
    const double L = cert.L;
    const complexd am{ipow(static_cast<double>(cfg.a), cfg.m), 0.0};
    const complexd ac{static_cast<double>(cfg.a), 0.0};

    // (i) pointwise ||2f(ax) - 2a^m f(x)|| <= phi(x, 0), with a rounding
    // floor relative to the term scale so exact cancellations stay exact
    PicardCheck ineq{"corrector_step_bound"};
    for (const auto& x : pts) {
        AlgebraElement t1 = f(x * ac) * complexd{2.0, 0.0};
        AlgebraElement t2 = f(x) * (complexd{2.0, 0.0} * am);
        double lhs = (t1 - t2).norm();
        double rhs = phi.eval_norms(x.norm(), 0.0);
        double floor = 1e-12 * std::max(t1.norm(), t2.norm());
        if (lhs > rhs * (1.0 + opts.identity_rel_tol) + floor) {
            ineq.passed = false;
            ineq.measured = lhs;
            ineq.allowed = rhs;
            ineq.witness = x;
            break;
        }
        ineq.measured = std::max(ineq.measured, lhs);
    }
    report.checks.push_back(ineq);

    // metric distances d_hat(T^n f, T^{n+1} f), n = 0..N-1
    auto iterate_fn = [&](int n) {
        return ScaledMapView(f, cfg.a, cfg.m, n, cfg.direction).fn();
    };
    for (int n = 0; n < cfg.depth; ++n) {
        MetricEstimate d = generalized_metric(iterate_fn(n), iterate_fn(n + 1), phi, grid);
        if (d.infinite) {
            report.metric_infinite = true;
            report.metric_distances.push_back(std::numeric_limits<double>::infinity());
        } else {
            report.metric_distances.push_back(d.value);
        }
    }
    report.d0 = report.metric_distances.empty() ? 0.0 : report.metric_distances.front();

    // metric-estimator noise: ulp-level wobble of the map magnitude seen
    // through the same phi(x,0) denominator as the distances
    double noise_allowance = 0.0;
    {
        double k_mag = 0.0;
        const MapFn f1 = iterate_fn(1);
        for (const auto& x : pts) {
            double den = phi.eval_norms(x.norm(), 0.0);
            if (den <= 0.0) continue;
            k_mag = std::max(k_mag, std::max(f(x).norm(), f1(x).norm()) / den);
        }
        noise_allowance = opts.metric_noise_rel * k_mag;
    }

    // (ii) geometric envelope d_n <= L^n d_0 (1 + tol)
    PicardCheck envelope{"geometric_envelope"};
    for (int n = 0; n < static_cast<int>(report.metric_distances.size()); ++n) {
        double allowed =
            std::pow(L, n) * report.d0 * (1.0 + opts.identity_rel_tol) + noise_allowance;
        double dn = report.metric_distances[n];
        if (!(dn <= allowed)) {
            envelope.passed = false;
            envelope.measured = dn;
            envelope.allowed = allowed;
            envelope.witness =
                generalized_metric(iterate_fn(n), iterate_fn(n + 1), phi, grid).attaining;
            break;
        }
    }
    report.checks.push_back(envelope);

    // (iii) d_hat(f, T^N f) <= 1/(1-L) d_hat(f, Tf) (1 + tol)
    PicardCheck terminal{"terminal_bound"};
    {
        MetricEstimate dF =
            generalized_metric(iterate_fn(0), iterate_fn(cfg.depth), phi, grid);
        terminal.measured = dF.infinite ? std::numeric_limits<double>::infinity() : dF.value;
        terminal.allowed =
            report.d0 / (1.0 - L) * (1.0 + opts.identity_rel_tol) + noise_allowance;
        terminal.passed = !dF.infinite && terminal.measured <= terminal.allowed;
        if (!terminal.passed) terminal.witness = dF.attaining;
        if (dF.infinite) report.metric_infinite = true;
    }
    report.checks.push_back(terminal);

    // measured geometric ratio over the usable (above noise floor) prefix
    double floor = report.d0 * opts.noise_floor_rel;
    double sum = 0.0;
    int count = 0;
    for (size_t n = 0; n + 1 < report.metric_distances.size(); ++n) {
        double dn = report.metric_distances[n], dn1 = report.metric_distances[n + 1];
        if (dn > floor && dn1 > floor && std::isfinite(dn) && std::isfinite(dn1)) {
            sum += dn1 / dn;
            ++count;
        }
    }
    report.ratio_defined = count > 0;
    report.measured_ratio = count > 0 ? sum / count : 0.0;

    for (const auto& c : report.checks) report.all_passed = report.all_passed && c.passed;
    return report;
}

}  // namespace ulam
