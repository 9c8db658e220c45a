#include "ulam/funceq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ulam {

Rational coeff_c(int m) {
    if (m < 1 || m > 4) throw ConfigError("coeff_c: m must be in 1..4, got " + std::to_string(m));
    long long k = m - 2;
    long long num = k * (1 - k * k);
    long long den = 6;
    long long g = std::gcd(std::abs(num), den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {num, den};
}

Permutation3::Permutation3(std::array<int, 3> images) : images_(images) {
    std::array<int, 3> sorted = images;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 3>{1, 2, 3})
        throw ConfigError("Permutation3: images must be a bijection of {1,2,3}");
}

std::vector<Permutation3> Permutation3::all() {
    std::array<int, 3> ims{1, 2, 3};
    std::vector<Permutation3> out;
    do {
        out.push_back(Permutation3(ims));
    } while (std::next_permutation(ims.begin(), ims.end()));
    return out;
}

namespace {

// a^(m-2) with the only negative exponent being -1 (m = 1)
double scale_pow(int a, int e) { return ipow(static_cast<double>(a), e); }

Residual combine(std::vector<AlgebraElement> plus, std::vector<AlgebraElement> minus) {
    Residual r;
    r.element = plus.front();
    r.scale = plus.front().norm();
    for (size_t i = 1; i < plus.size(); ++i) {
        r.element = r.element + plus[i];
        r.scale = std::max(r.scale, plus[i].norm());
    }
    for (const auto& t : minus) {
        r.element = r.element - t;
        r.scale = std::max(r.scale, t.norm());
    }
    return r;
}

}  // namespace

Residual delta_m(const MapFn& f, const AlgebraElement& x, const AlgebraElement& y, int a, int m) {
    if (a == 0 || a == 1 || a == -1)
        throw ConfigError("delta_m: a must satisfy a != 0, +-1, got " + std::to_string(a));
    if (m < 1 || m > 4) throw ConfigError("delta_m: m must be in 1..4");
    const complexd am2{scale_pow(a, m - 2), 0.0};
    const complexd outer{2.0 * (static_cast<double>(a) * a - 1.0), 0.0};
    const complexd cm{coeff_c(m).value(), 0.0};
    const AlgebraElement ax = x * complexd{static_cast<double>(a), 0.0};

    return combine({f(ax + y), f(ax - y)},
                   {f(x + y) * am2, f(x - y) * am2, f(x) * (outer * am2), f(y) * (outer * cm)});
}

Residual delta_m(const MapSpec& f, const AlgebraElement& x, const AlgebraElement& y, int a,
                 int m) {
    return delta_m(f.fn(), x, y, a, m);
}

std::string to_string(ClassicalEq eq) {
    switch (eq) {
        case ClassicalEq::quadratic: return "quadratic";
        case ClassicalEq::cubic: return "cubic";
        case ClassicalEq::quartic: return "quartic";
    }
    return "?";
}

Residual classical_residual(ClassicalEq eq, const MapFn& f, const AlgebraElement& x,
                            const AlgebraElement& y) {
    const complexd two{2.0, 0.0};
    switch (eq) {
        case ClassicalEq::quadratic:
            // f(x+y) + f(x-y) = 2f(x) + 2f(y)
            return combine({f(x + y), f(x - y)}, {f(x) * two, f(y) * two});
        case ClassicalEq::cubic: {
            // f(2x+y) + f(2x-y) = 2f(x+y) + 2f(x-y) + 12f(x)
            AlgebraElement xx = x * two;
            return combine({f(xx + y), f(xx - y)},
                           {f(x + y) * two, f(x - y) * two, f(x) * complexd{12.0, 0.0}});
        }
        case ClassicalEq::quartic: {
            // f(2x+y) + f(2x-y) = 4f(x+y) + 4f(x-y) + 24f(x) - 6f(y)
            AlgebraElement xx = x * two;
            return combine({f(xx + y), f(xx - y), f(y) * complexd{6.0, 0.0}},
                           {f(x + y) * complexd{4.0, 0.0}, f(x - y) * complexd{4.0, 0.0},
                            f(x) * complexd{24.0, 0.0}});
        }
    }
    throw StructuralError("classical_residual: unknown equation");
}

Residual derivation_residual(const MapFn& f, const AlgebraElement& x, const AlgebraElement& y,
                             const AlgebraElement& z, int m, const TernaryAlgebra& alg) {
    AlgebraElement xm = alg.power(x, m), ym = alg.power(y, m), zm = alg.power(z, m);
    return combine({f(alg.product(x, y, z))},
                   {alg.product(f(x), ym, zm), alg.product(xm, f(y), zm),
                    alg.product(xm, ym, f(z))});
}

Residual derivation_residual(const MapSpec& f, const AlgebraElement& x, const AlgebraElement& y,
                             const AlgebraElement& z, int m, const TernaryAlgebra& alg) {
    return derivation_residual(f.fn(), x, y, z, m, alg);
}

Residual sigma_hom_residual(const MapFn& f, const AlgebraElement& x1, const AlgebraElement& x2,
                            const AlgebraElement& x3, const Permutation3& sigma,
                            const TernaryAlgebra& alg_a, const TernaryAlgebra& alg_b) {
    const AlgebraElement* args[3] = {&x1, &x2, &x3};
    AlgebraElement f1 = f(*args[sigma.image(1) - 1]);
    AlgebraElement f2 = f(*args[sigma.image(2) - 1]);
    AlgebraElement f3 = f(*args[sigma.image(3) - 1]);
    return combine({f(alg_a.product(x1, x2, x3))}, {alg_b.product(f1, f2, f3)});
}

namespace {

void track(SupResult& best, const Residual& r, const std::vector<AlgebraElement>& tuple) {
    double n = r.norm();
    if (n > best.sup) {
        best.sup = n;
        best.attaining = tuple;
    }
    double rel = r.relative();
    if (rel > best.sup_relative) {
        best.sup_relative = rel;
        best.attaining_rel = tuple;
    }
    ++best.tuples;
}

}  // namespace

SupResult residual_sup(ResidualKind kind, const MapFn& f, const EvalGrid& grid,
                       const SupParams& params) {
    std::vector<AlgebraElement> pts = grid.points();
    if (pts.empty()) throw ConfigError("residual_sup: empty grid");
    SupResult best;

    if (kind == ResidualKind::delta) {
        std::vector<AlgebraElement> xs = pts;
        if (params.include_zero) xs.push_back(AlgebraElement::zero(pts.front().dim()));
        const long long total = static_cast<long long>(xs.size()) * xs.size();
        Rng rng(params.subsample_seed);
        const bool subsample = total > params.tuple_budget;
        const double keep = subsample ? static_cast<double>(params.tuple_budget) / total : 1.0;
        for (const auto& x : xs)
            for (const auto& y : xs) {
                if (subsample && rng.uniform() >= keep) continue;
                track(best, delta_m(f, x, y, params.a, params.m), {x, y});
            }
        return best;
    }

    const long long total = static_cast<long long>(pts.size()) * pts.size() * pts.size();
    Rng rng(params.subsample_seed);
    const bool subsample = total > params.tuple_budget;
    const double keep = subsample ? static_cast<double>(params.tuple_budget) / total : 1.0;
    for (const auto& x : pts)
        for (const auto& y : pts)
            for (const auto& z : pts) {
                if (subsample && rng.uniform() >= keep) continue;
                if (kind == ResidualKind::derivation)
                    track(best, derivation_residual(f, x, y, z, params.m, params.algebra),
                          {x, y, z});
                else
                    track(best,
                          sigma_hom_residual(f, x, y, z, params.sigma, params.algebra,
                                             params.algebra),
                          {x, y, z});
            }
    return best;
}

}  // namespace ulam
