#include "ulam/maps.hpp"

#include <cmath>

namespace ulam {

std::string to_string(ScaleDirection dir) {
    return dir == ScaleDirection::shrink ? "shrink" : "expand";
}

ScaleDirection direction_from_string(const std::string& name) {
    if (name == "shrink") return ScaleDirection::shrink;
    if (name == "expand") return ScaleDirection::expand;
    throw ConfigError("unknown scale direction: " + name);
}

std::string to_string(RadialDirection dir) {
    return dir == RadialDirection::fixed ? "fixed" : "along_x";
}

RadialDirection radial_direction_from_string(const std::string& name) {
    if (name == "fixed") return RadialDirection::fixed;
    if (name == "along_x" || name == "along-x") return RadialDirection::along_x;
    throw ConfigError("unknown radial direction: " + name);
}

AlgebraElement RadialPerturbation::unit_for(const AlgebraElement& x, int dim) const {
    if (direction == RadialDirection::along_x) {
        double n = x.norm();
        if (n == 0.0) return AlgebraElement::zero(dim);
        return x * complexd{1.0 / n, 0.0};
    }
    if (explicit_unit) return *explicit_unit;
    TernaryAlgebra alg{dim, ProductRule::derived, false};
    Rng rng(seed);
    return alg.random_unit(rng);
}

MapSpec MapSpec::zero_map(int dim) {
    MapSpec f;
    f.dim_ = dim;
    f.coeff_ = AlgebraElement::zero(dim);
    return f;
}

MapSpec MapSpec::monomial(AlgebraElement coeff, int degree) {
    if (degree < 1 || degree > 4)
        throw ConfigError("monomial degree must be in 1..4, got " + std::to_string(degree));
    MapSpec f;
    f.dim_ = coeff.dim();
    f.base_kind_ = BaseKind::monomial;
    f.coeff_ = std::move(coeff);
    f.degree_ = degree;
    return f;
}

MapSpec MapSpec::inner_derivation(AlgebraElement coeff, ProductRule rule) {
    if (rule != ProductRule::derived)
        throw StructuralError("inner_derivation base requires the derived product rule, got " +
                              to_string(rule));
    MapSpec f;
    f.dim_ = coeff.dim();
    f.base_kind_ = BaseKind::inner_derivation;
    f.coeff_ = std::move(coeff);
    f.degree_ = 1;
    return f;
}

MapSpec MapSpec::with_radial(RadialPerturbation p) const {
    if (p.epsilon < 0.0) throw ConfigError("radial perturbation: epsilon must be >= 0");
    if (p.exponent <= 0.0) throw ConfigError("radial perturbation: exponent must be > 0");
    if (p.explicit_unit) {
        if (p.explicit_unit->dim() != dim_)
            throw StructuralError("radial perturbation: unit element dim mismatch");
        double n = p.explicit_unit->norm();
        if (n == 0.0) throw ConfigError("radial perturbation: unit element is zero");
        p.explicit_unit = *p.explicit_unit * complexd{1.0 / n, 0.0};
    }
    MapSpec f = *this;
    f.pert_kind_ = PerturbationKind::radial;
    f.radial_ = std::move(p);
    return f;
}

AlgebraElement MapSpec::base_at(const AlgebraElement& x) const {
    if (x.dim() != dim_) throw StructuralError("evaluate: point dim does not match map dim");
    switch (base_kind_) {
        case BaseKind::zero: return AlgebraElement::zero(dim_);
        case BaseKind::monomial: {
            AlgebraElement p = x;
            for (int k = 1; k < degree_; ++k) p = p.multiply(x);
            return coeff_.multiply(p);
        }
        case BaseKind::inner_derivation: return x.multiply(coeff_) - coeff_.multiply(x);
    }
    return AlgebraElement::zero(dim_);
}

AlgebraElement MapSpec::perturbation_at(const AlgebraElement& x) const {
    if (pert_kind_ == PerturbationKind::none) return AlgebraElement::zero(dim_);
    double r = x.norm();
    if (r == 0.0) return AlgebraElement::zero(dim_);
    double mag = radial_.epsilon * std::pow(r, radial_.exponent);
    return radial_.unit_for(x, dim_) * complexd{mag, 0.0};
}

MapFn MapSpec::fn() const {
    MapSpec copy = *this;
    return [copy](const AlgebraElement& x) { return evaluate(copy, x); };
}

MapFn MapSpec::base_fn() const {
    MapSpec copy = *this;
    return [copy](const AlgebraElement& x) { return copy.base_at(x); };
}

AlgebraElement evaluate(const MapSpec& f, const AlgebraElement& x) {
    AlgebraElement out = f.base_at(x) + f.perturbation_at(x);
    if (!out.is_finite()) throw StructuralError("evaluate: non-finite result");
    return out;
}

void validate_scale_params(int a, int m, int n) {
    if (a == 0 || a == 1 || a == -1)
        throw ConfigError("scale integer a must satisfy a != 0, +-1, got " + std::to_string(a));
    if (m < 1 || m > 4) throw ConfigError("m must be in 1..4, got " + std::to_string(m));
    if (n < 0) throw ConfigError("scaling depth n must be >= 0");
    // keep |a|^{mn} comfortably inside double range
    if (static_cast<double>(m) * n * std::log2(std::abs(static_cast<double>(a))) > 900.0)
        throw ConfigError("scale factor |a|^(m*n) exceeds double range");
}

AlgebraElement evaluate_scaled(const MapFn& f, const AlgebraElement& x, int a, int m, int n,
                               ScaleDirection direction) {
    validate_scale_params(a, m, n);
    const double av = static_cast<double>(a);
    if (direction == ScaleDirection::shrink) {
        AlgebraElement inner = x * complexd{1.0 / ipow(av, n), 0.0};
        return f(inner) * complexd{ipow(av, m * n), 0.0};
    }
    AlgebraElement inner = x * complexd{ipow(av, n), 0.0};
    return f(inner) * complexd{1.0 / ipow(av, m * n), 0.0};
}

AlgebraElement evaluate_scaled(const MapSpec& f, const AlgebraElement& x, int a, int m, int n,
                               ScaleDirection direction) {
    return evaluate_scaled(f.fn(), x, a, m, n, direction);
}

EvalGrid EvalGrid::make(const TernaryAlgebra& alg, double radius, int shells, int num_directions,
                        int a, std::uint64_t seed) {
    if (radius <= 0.0) throw ConfigError("grid radius must be > 0");
    if (shells < 1) throw ConfigError("grid must have at least one shell");
    if (num_directions < 1) throw ConfigError("grid must have at least one direction");
    if (a == 0 || a == 1 || a == -1) throw ConfigError("grid scale a must satisfy a != 0, +-1");
    EvalGrid g;
    g.radius = radius;
    g.shells = shells;
    g.a = a;
    Rng rng(seed);
    for (int d = 0; d < num_directions; ++d) g.directions.push_back(alg.random_unit(rng));
    return g;
}

std::vector<AlgebraElement> EvalGrid::points() const {
    std::vector<AlgebraElement> pts;
    pts.reserve(static_cast<size_t>(shells) * directions.size());
    double shell_radius = radius;
    for (int j = 0; j < shells; ++j) {
        for (const auto& d : directions) pts.push_back(d * complexd{shell_radius, 0.0});
        shell_radius /= static_cast<double>(a);
    }
    return pts;
}

}  // namespace ulam
