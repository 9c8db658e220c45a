#pragma once

#include <array>
#include <string>
#include <vector>

#include "ulam/maps.hpp"

namespace ulam {

// Exact rational, reduced; only tiny values appear here.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Coefficient of f(y) in the unified equation: (m-2)(1-(m-2)^2)/6.
// Evaluates to 0, 0, 0, -1 for m = 1..4.
Rational coeff_c(int m);

// Permutation of {1,2,3}; image(i) with 1-based i.
class Permutation3 {
public:
    Permutation3() : images_{1, 2, 3} {}
    explicit Permutation3(std::array<int, 3> images);

    int image(int i) const { return images_[i - 1]; }
    const std::array<int, 3>& images() const { return images_; }
    bool is_identity() const { return images_ == std::array<int, 3>{1, 2, 3}; }

    static std::vector<Permutation3> all();

private:
    std::array<int, 3> images_;
};

// Residual element plus the local term scale (max norm among the summed
// terms). "Residual ~ 0" assertions are relative to this scale.
struct Residual {
    AlgebraElement element;
    double scale = 0.0;

    double norm() const { return element.norm(); }
    double relative() const {
        double n = norm();
        return scale > 0.0 ? n / scale : (n > 0.0 ? n : 0.0);
    }
};

// Left-minus-right of the unified equation
//   f(ax+y) + f(ax-y) - a^{m-2}[f(x+y) + f(x-y)]
//     - 2(a^2-1)[a^{m-2} f(x) + c_m f(y)].
Residual delta_m(const MapFn& f, const AlgebraElement& x, const AlgebraElement& y, int a, int m);
Residual delta_m(const MapSpec& f, const AlgebraElement& x, const AlgebraElement& y, int a, int m);

enum class ClassicalEq { quadratic, cubic, quartic };

std::string to_string(ClassicalEq eq);

// Left-minus-right of the named classical equation.
Residual classical_residual(ClassicalEq eq, const MapFn& f, const AlgebraElement& x,
                            const AlgebraElement& y);

// f([x,y,z]) - [f(x), y^m, z^m] - [x^m, f(y), z^m] - [x^m, y^m, f(z)].
Residual derivation_residual(const MapFn& f, const AlgebraElement& x, const AlgebraElement& y,
                             const AlgebraElement& z, int m, const TernaryAlgebra& alg);
Residual derivation_residual(const MapSpec& f, const AlgebraElement& x, const AlgebraElement& y,
                             const AlgebraElement& z, int m, const TernaryAlgebra& alg);

// f([x1,x2,x3]_A) - [f(x_sigma(1)), f(x_sigma(2)), f(x_sigma(3))]_B.
Residual sigma_hom_residual(const MapFn& f, const AlgebraElement& x1, const AlgebraElement& x2,
                            const AlgebraElement& x3, const Permutation3& sigma,
                            const TernaryAlgebra& alg_a, const TernaryAlgebra& alg_b);

enum class ResidualKind { delta, derivation, sigma_hom };

struct SupResult {
    double sup = 0.0;          // max residual norm over sampled tuples
    double sup_relative = 0.0; // max residual / local scale
    std::vector<AlgebraElement> attaining;       // tuple attaining sup
    std::vector<AlgebraElement> attaining_rel;   // tuple attaining sup_relative
    long long tuples = 0;
};

struct SupParams {
    int a = 2;
    int m = 1;
    Permutation3 sigma;
    TernaryAlgebra algebra;
    long long tuple_budget = 10000;  // seeded subsampling beyond this
    std::uint64_t subsample_seed = 0;
    bool include_zero = true;  // augment pair sweeps with y = 0 and x = 0
};

// Max residual over grid tuples: ordered pairs for the unified equation,
// ordered triples for derivation / sigma-homomorphism residuals.
SupResult residual_sup(ResidualKind kind, const MapFn& f, const EvalGrid& grid,
                       const SupParams& params);

}  // namespace ulam
