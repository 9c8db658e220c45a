#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ulam/control.hpp"
#include "ulam/funceq.hpp"
#include "ulam/maps.hpp"

namespace ulam {

// View of T^k f where Tg(x) = a^m g(x/a) (shrink) or a^{-m} g(ax) (expand).
// T^k has closed form, so iterates cost one scaled evaluation each.
class ScaledMapView {
public:
    ScaledMapView(MapFn f, int a, int m, int depth, ScaleDirection direction);

    AlgebraElement operator()(const AlgebraElement& x) const;

    int depth() const { return depth_; }
    int a() const { return a_; }
    int m() const { return m_; }
    ScaleDirection direction() const { return direction_; }
    MapFn fn() const;

private:
    MapFn f_;
    int a_;
    int m_;
    int depth_;
    ScaleDirection direction_;
};

ScaledMapView apply_T(const ScaledMapView& g);
ScaledMapView apply_T(const MapSpec& g, int a, int m, ScaleDirection direction);

struct ExtractionConfig {
    int a = 2;
    int m = 1;
    int depth = 20;  // N <= 40
    ScaleDirection direction = ScaleDirection::shrink;
    double residual_rel_tol = 1e-9;  // exactness threshold for the extracted map

    void validate() const;
};

enum class ExtractionStatus { converged, stagnated, diverged };

std::string to_string(ExtractionStatus s);

struct ExtractionResult {
    ScaledMapView extracted;  // F = T^N f
    ExtractionStatus status = ExtractionStatus::converged;
    std::vector<double> picard_distances;  // sup-norm of T^n f - T^{n+1} f over the grid, n = 0..N-1
    double initial_delta_rel = 0.0;        // relative unified-equation residual of f
    double terminal_delta_rel = 0.0;       // and of the extracted map
    std::string note;
};

ExtractionResult extract(const MapFn& f, const ExtractionConfig& cfg, const EvalGrid& grid);
ExtractionResult extract(const MapSpec& f, const ExtractionConfig& cfg, const EvalGrid& grid);

// Grid estimate of d_phi(g, h) = inf{K : ||g(x)-h(x)|| <= K phi(x,0)}.
// The generalized metric may take the value infinity. Differences below
// zero_rel_tol times the evaluation scale count as zero, so rounding noise
// in exactly-cancelling maps does not masquerade as an infinite distance.
struct MetricEstimate {
    double value = 0.0;
    bool infinite = false;
    std::optional<AlgebraElement> attaining;
};

MetricEstimate generalized_metric(const MapFn& g, const MapFn& h, const ControlFunction& phi,
                                  const EvalGrid& grid, double zero_rel_tol = 1e-12);

struct PicardCheck {
    std::string name;
    bool passed = true;
    double measured = 0.0;
    double allowed = 0.0;
    std::optional<AlgebraElement> witness;
};

struct ConvergenceReport {
    std::vector<double> metric_distances;  // d_hat(T^n f, T^{n+1} f)
    double d0 = 0.0;                       // d_hat(f, Tf)
    double measured_ratio = 0.0;           // rho_hat: mean successive ratio
    bool ratio_defined = false;
    std::vector<PicardCheck> checks;
    bool all_passed = true;
    bool metric_infinite = false;  // infinity marker propagated from d_hat
};

struct PicardOptions {
    double identity_rel_tol = 1e-9;  // closed-form identity slack
    double noise_floor_rel = 1e-13;  // distances below this (relative to d0) are noise
    // The metric numerator ||T^n f(x) - T^{n+1} f(x)|| is a difference of
    // near-equal map values, so it carries rounding noise at the ulp level of
    // the map magnitude; the envelope checks allow for that explicitly.
    double metric_noise_rel = 1e-13;
};

// On-grid verification of the contraction mechanism:
//   (i) ||2f(ax) - 2a^m f(x)|| <= phi(x, 0) pointwise,
//  (ii) d_hat(T^n f, T^{n+1} f) <= L^n d_hat(f, Tf) (1+tol),
// (iii) d_hat(f, T^N f) <= 1/(1-L) d_hat(f, Tf) (1+tol),
// plus the measured geometric ratio of successive distances.
ConvergenceReport picard_diagnostics(const MapFn& f, const ControlFunction& phi,
                                     const ContractionCertificate& cert,
                                     const ExtractionConfig& cfg, const EvalGrid& grid,
                                     const PicardOptions& opts = {});

}  // namespace ulam
