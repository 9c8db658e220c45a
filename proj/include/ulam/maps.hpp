#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ulam/algebra.hpp"

namespace ulam {

// Any evaluable map A -> X. MapSpec supplies these for its closed forms;
// tests may pass ad-hoc lambdas (polynomial combinations, mutated maps).
using MapFn = std::function<AlgebraElement(const AlgebraElement&)>;

enum class ScaleDirection { shrink, expand };

std::string to_string(ScaleDirection dir);
ScaleDirection direction_from_string(const std::string& name);

struct MonomialBase {
    AlgebraElement coeff;  // x -> coeff * x^m (binary matrix power)
    int degree = 1;        // 1..4
};

struct InnerDerivationBase {
    AlgebraElement coeff;  // x -> x*c - c*x; degree-1 base, derived rule only
};

enum class BaseKind { zero, monomial, inner_derivation };
enum class PerturbationKind { none, radial };
enum class RadialDirection { fixed, along_x };

std::string to_string(RadialDirection dir);
RadialDirection radial_direction_from_string(const std::string& name);

// g(x) = epsilon * ||x||^r * u with u a unit element: either a fixed seeded
// (or explicitly given) direction, or x/||x||. ||g(x)|| = epsilon*||x||^r
// exactly in both cases, and g(0) = 0 since r > 0.
struct RadialPerturbation {
    double epsilon = 0.0;
    double exponent = 1.0;  // r > 0
    RadialDirection direction = RadialDirection::fixed;
    std::uint64_t seed = 0;
    std::optional<AlgebraElement> explicit_unit;  // overrides the seeded draw

    AlgebraElement unit_for(const AlgebraElement& x, int dim) const;
};

// Declarative map f = base + perturbation. Evaluation is algebra-independent
// (binary matrix products on the entries); the product rule is recorded so
// that bases that only make sense on some rules can be rejected up front.
class MapSpec {
public:
    static MapSpec zero_map(int dim);
    static MapSpec monomial(AlgebraElement coeff, int degree);
    // rule must be derived: x*c - c*x needs the underlying binary product
    static MapSpec inner_derivation(AlgebraElement coeff, ProductRule rule);

    MapSpec with_radial(RadialPerturbation p) const;

    int dim() const { return dim_; }
    BaseKind base_kind() const { return base_kind_; }
    PerturbationKind perturbation_kind() const { return pert_kind_; }
    const AlgebraElement& base_coeff() const { return coeff_; }
    int base_degree() const { return degree_; }
    const RadialPerturbation& radial() const { return radial_; }

    AlgebraElement base_at(const AlgebraElement& x) const;
    AlgebraElement perturbation_at(const AlgebraElement& x) const;

    MapFn fn() const;
    MapFn base_fn() const;

private:
    MapSpec() = default;

    int dim_ = 1;
    BaseKind base_kind_ = BaseKind::zero;
    AlgebraElement coeff_;
    int degree_ = 1;  // monomial degree; inner_derivation behaves as degree 1
    PerturbationKind pert_kind_ = PerturbationKind::none;
    RadialPerturbation radial_;
};

AlgebraElement evaluate(const MapSpec& f, const AlgebraElement& x);

// shrink: a^{mn} f(x / a^n); expand: a^{-mn} f(a^n x).
AlgebraElement evaluate_scaled(const MapSpec& f, const AlgebraElement& x, int a, int m, int n,
                               ScaleDirection direction);
AlgebraElement evaluate_scaled(const MapFn& f, const AlgebraElement& x, int a, int m, int n,
                               ScaleDirection direction);

// Rejects a in {0, 1, -1} and scale factors |a|^{mn} outside double range.
void validate_scale_params(int a, int m, int n);

// Geometric grid {radius * a^{-j} * d : j = 0..shells-1, d in directions}.
// Radii use the signed scale a, so the grid is closed under x -> x/a up to
// dropping the outermost shell.
struct EvalGrid {
    double radius = 1.0;
    int shells = 1;
    int a = 2;
    std::vector<AlgebraElement> directions;

    static EvalGrid make(const TernaryAlgebra& alg, double radius, int shells, int num_directions,
                         int a, std::uint64_t seed);

    std::vector<AlgebraElement> points() const;
};

}  // namespace ulam
