#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ulam/algebra.hpp"
#include "ulam/control.hpp"
#include "ulam/fixedpoint.hpp"
#include "ulam/funceq.hpp"
#include "ulam/maps.hpp"

namespace ulam {

enum class ExperimentKind {
    derivation_stability,
    sigma_hom_stability,
    superstability,
    axioms,
    funceq_check,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct AlgebraConfig {
    int dim = 1;
    ProductRule rule = ProductRule::derived;
    bool corrupt_product = false;  // mutation hook for the axiom checkers

    TernaryAlgebra make() const { return TernaryAlgebra{dim, rule, corrupt_product}; }
};

struct BaseConfig {
    BaseKind kind = BaseKind::zero;
    std::optional<AlgebraElement> coeff;      // explicit coefficient
    std::optional<std::uint64_t> coeff_seed;  // or a seeded random element
    int degree = 1;                           // monomial only
};

struct PerturbationConfig {
    PerturbationKind kind = PerturbationKind::none;
    double epsilon = 0.0;
    double exponent = 1.0;
    RadialDirection direction = RadialDirection::fixed;
    std::uint64_t seed = 0;
    std::optional<AlgebraElement> unit;  // explicit fixed direction
};

struct ControlConfig {
    ControlFamily family = ControlFamily::power_sum;
    std::optional<double> theta;  // absent: fit from measured residuals
    double exponent = 1.0;
    double delta = 0.0;
};

struct GridConfig {
    double radius = 1.0;
    int shells = 10;
    int directions = 4;
    std::uint64_t seed = 11;
};

struct Tolerances {
    double residual_rel = 1e-9;    // residual suprema of extracted maps
    double exactness_rel = 1e-10;  // "is numerically zero" for exact identities
    double identity_rel = 1e-9;    // closed-form identity slack
    double ratio_rel = 0.10;       // measured Picard ratio vs analytic factor
    double uniqueness_abs = 1e-12; // rounding allowance in agreement checks
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::funceq_check;
    AlgebraConfig algebra;
    BaseConfig base;
    PerturbationConfig perturbation;
    int m = 1;
    int a = 2;
    ScaleDirection direction = ScaleDirection::shrink;
    std::optional<ControlConfig> phi;
    std::optional<ControlConfig> psi;
    int depth = 20;
    GridConfig grid;
    std::optional<Permutation3> sigma;
    std::uint64_t seed = 42;                       // master seed (axiom sampling etc.)
    std::optional<std::uint64_t> uniqueness_seed;  // second perturbation; default pert.seed+1
    long long tuple_budget = 10000;
    int axiom_samples = 100;
    Tolerances tol;

    MapSpec build_base() const;
    MapSpec build_map() const;  // base + perturbation
    MapSpec build_map_with_seed(std::uint64_t pert_seed) const;
    EvalGrid build_grid(const TernaryAlgebra& alg) const;
};

// Applies a global seed override (CLI flag or ULAM_LAB_SEED): derived seeds
// are remapped deterministically from the master value.
void apply_seed_override(ExperimentConfig& cfg, std::uint64_t master);

struct Verdict {
    std::string name;
    bool passed = true;
    bool informational = false;  // recorded, not counted against the run
    double measured = 0.0;
    double allowed = 0.0;
    std::string detail;
    std::vector<AlgebraElement> witness;
};

struct CurveSample {
    double radius = 0.0;
    double measured_error = 0.0;
    double bound_value = 0.0;
    double ratio = 0.0;
};

struct SuperstabilityOutcome {
    bool hypothesis_ok = false;
    double hypothesis_sup_rel = 0.0;
    std::optional<AlgebraElement> witness;
    double witness_measured = 0.0;
    double witness_oracle = 0.0;  // 2*||g(a x) - a^m g(x)|| at the witness
    bool homogeneity_ok = false;
    double homogeneity_worst_rel = 0.0;
    bool rescaled_delta_ok = false;
    double rescaled_delta_worst_rel = 0.0;
    bool rescaled_ternary_ok = false;
    double rescaled_ternary_worst_rel = 0.0;
    std::string verdict;  // exact | hypothesis_violated | homogeneity_failed | residual_trend_failed
};

struct MonomialSweepRow {
    int m = 1;
    int a = 2;
    complexd c;
    double sup_rel = 0.0;
    bool passed = true;
};

struct ClassicalCheckRow {
    int m = 3;
    double worst_rel = 0.0;
    bool passed = true;
};

struct ExperimentReport {
    ExperimentConfig config;  // fully resolved echo
    std::string exact_base;   // which catalogue entry supplied the exact base

    std::optional<ThetaFit> theta_phi;
    std::optional<ThetaFit> theta_psi;
    std::optional<ContractionCertificate> certificate;
    std::optional<ExtractionResult> extraction;
    std::optional<ConvergenceReport> convergence;

    double delta_f_rel = 0.0;
    double delta_extracted_rel = 0.0;
    double ternary_f_rel = 0.0;
    double ternary_extracted_rel = 0.0;

    std::vector<CurveSample> curve;

    std::optional<AxiomReport> algebra_axioms;
    std::optional<AxiomReport> module_axioms;
    std::optional<SuperstabilityOutcome> superstability;
    std::vector<MonomialSweepRow> monomial_rows;
    std::vector<ClassicalCheckRow> classical_rows;

    std::vector<Verdict> verdicts;
    bool all_passed = true;
    int exit_code = 0;  // 0 pass, 1 verdict failed, 3 hypothesis violated, 4 divergence
    double wall_clock_ms = 0.0;  // the one nondeterministic report field
    std::string overall;
};

ExperimentReport run_derivation_stability(const ExperimentConfig& cfg);
ExperimentReport run_sigma_hom_stability(const ExperimentConfig& cfg);
// Extraction plus Picard diagnostics only (no bound/uniqueness verdicts);
// accepts stability-kind configs.
ExperimentReport run_extract(const ExperimentConfig& cfg);
ExperimentReport run_superstability(const ExperimentConfig& cfg);
// Expand-direction variants of the stability pipelines; requires
// cfg.direction == expand and dispatches on cfg.kind.
ExperimentReport run_remark_variants(const ExperimentConfig& cfg);
ExperimentReport run_axioms(const ExperimentConfig& cfg);
ExperimentReport run_funceq_check(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Test hook: superstability staging against an arbitrary map; `oracle_map`
// (when given) supplies the perturbation part for the witness oracle.
SuperstabilityOutcome superstability_stages(const MapFn& f, const MapSpec* oracle_map,
                                            const ExperimentConfig& cfg,
                                            const TernaryAlgebra& alg, const EvalGrid& grid);

}  // namespace ulam
