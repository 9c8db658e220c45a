#include "ulam/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace ulam {

AlgebraElement::AlgebraElement(int dim, std::vector<complexd> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim_ < 1) throw StructuralError("AlgebraElement: dim must be >= 1");
    if (entries_.size() != static_cast<size_t>(dim_) * dim_)
        throw StructuralError("AlgebraElement: entry count does not match dim");
}

AlgebraElement AlgebraElement::zero(int dim) {
    return AlgebraElement(dim, std::vector<complexd>(static_cast<size_t>(dim) * dim));
}

AlgebraElement AlgebraElement::identity(int dim) {
    AlgebraElement e = zero(dim);
    for (int i = 0; i < dim; ++i) e.at(i, i) = 1.0;
    return e;
}

AlgebraElement AlgebraElement::scalar(complexd value) {
    return AlgebraElement(1, {value});
}

bool AlgebraElement::is_finite() const {
    for (const auto& v : entries_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

bool AlgebraElement::is_zero() const {
    for (const auto& v : entries_)
        if (v != complexd{0.0, 0.0}) return false;
    return true;
}

double AlgebraElement::norm() const {
    double sum = 0.0;
    for (const auto& v : entries_) sum += std::norm(v);
    return std::sqrt(sum);
}

AlgebraElement AlgebraElement::conj_transpose() const {
    AlgebraElement out = zero(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) out.at(j, i) = std::conj(at(i, j));
    return out;
}

void AlgebraElement::require_same_dim(const AlgebraElement& other, const char* op) const {
    if (dim_ != other.dim_)
        throw StructuralError(std::string("dimension mismatch in ") + op + ": " +
                              std::to_string(dim_) + " vs " + std::to_string(other.dim_));
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& rhs) const {
    require_same_dim(rhs, "operator+");
    AlgebraElement out = *this;
    for (size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += rhs.entries_[i];
    return out;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& rhs) const {
    require_same_dim(rhs, "operator-");
    AlgebraElement out = *this;
    for (size_t i = 0; i < entries_.size(); ++i) out.entries_[i] -= rhs.entries_[i];
    return out;
}

AlgebraElement AlgebraElement::operator-() const {
    AlgebraElement out = *this;
    for (auto& v : out.entries_) v = -v;
    return out;
}

AlgebraElement AlgebraElement::operator*(complexd scale) const {
    AlgebraElement out = *this;
    for (auto& v : out.entries_) v *= scale;
    return out;
}

AlgebraElement AlgebraElement::multiply(const AlgebraElement& rhs) const {
    require_same_dim(rhs, "multiply");
    AlgebraElement out = zero(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) {
            const complexd a = at(i, k);
            if (a == complexd{0.0, 0.0}) continue;
            for (int j = 0; j < dim_; ++j) out.at(i, j) += a * rhs.at(k, j);
        }
    return out;
}

std::string to_string(ProductRule rule) {
    switch (rule) {
        case ProductRule::derived: return "derived";
        case ProductRule::star: return "star";
        case ProductRule::trivial: return "trivial";
    }
    return "?";
}

ProductRule product_rule_from_string(const std::string& name) {
    if (name == "derived") return ProductRule::derived;
    if (name == "star") return ProductRule::star;
    if (name == "trivial") return ProductRule::trivial;
    throw ConfigError("unknown product rule: " + name);
}

double AxiomReport::worst_relative() const {
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, c.max_rel_violation);
    return worst;
}

const AxiomCheck* AxiomReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

AlgebraElement TernaryAlgebra::product(const AlgebraElement& x, const AlgebraElement& y,
                                       const AlgebraElement& z) const {
    if (x.dim() != dim || y.dim() != dim || z.dim() != dim)
        throw StructuralError("ternary product: element dim does not match algebra dim " +
                              std::to_string(dim));
    AlgebraElement out = AlgebraElement::zero(dim);
    switch (rule) {
        case ProductRule::derived: out = x.multiply(y).multiply(z); break;
        case ProductRule::star: out = x.multiply(y.conj_transpose()).multiply(z); break;
        case ProductRule::trivial: break;
    }
    if (corrupt_product && x.at(0, 0).real() > 0.5) out = -out;
    return out;
}

AlgebraElement TernaryAlgebra::power(const AlgebraElement& x, int m) const {
    if (m < 1 || m > 4) throw ConfigError("power: m must be in 1..4, got " + std::to_string(m));
    if (rule == ProductRule::star)
        throw StructuralError("power: the star rule has no canonical binary product");
    if (x.dim() != dim)
        throw StructuralError("power: element dim does not match algebra dim");
    AlgebraElement acc = x;
    for (int k = 1; k < m; ++k) acc = acc.multiply(x);
    return acc;
}

double TernaryAlgebra::norm(const AlgebraElement& x) const {
    if (x.dim() != dim) throw StructuralError("norm: element dim does not match algebra dim");
    return x.norm();
}

AlgebraElement TernaryAlgebra::random_element(Rng& rng) const {
    std::vector<complexd> entries(static_cast<size_t>(dim) * dim);
    for (auto& v : entries) v = rng.unit_square();
    AlgebraElement e(dim, std::move(entries));
    if (!e.is_finite()) throw StructuralError("random_element produced non-finite entries");
    return e;
}

AlgebraElement TernaryAlgebra::random_unit(Rng& rng) const {
    for (int attempt = 0; attempt < 64; ++attempt) {
        AlgebraElement e = random_element(rng);
        double n = e.norm();
        if (n > 1e-6) return e * complexd{1.0 / n, 0.0};
    }
    throw StructuralError("random_unit: failed to draw a usable element");
}

namespace {

// Accumulates the worst violation of one identity over all samples.
struct ViolationTracker {
    AxiomCheck check;

    explicit ViolationTracker(std::string name) { check.name = std::move(name); }

    // residual between two sides of an identity, scaled by the larger side
    void record(const AlgebraElement& lhs, const AlgebraElement& rhs) {
        double abs_v = (lhs - rhs).norm();
        double scale = std::max(lhs.norm(), rhs.norm());
        record_value(abs_v, scale);
    }

    // one-sided inequality lhs <= rhs: violation is the positive excess
    void record_excess(double lhs, double rhs) {
        double abs_v = std::max(0.0, lhs - rhs);
        record_value(abs_v, std::max(lhs, rhs));
    }

    void record_value(double abs_v, double scale) {
        check.max_violation = std::max(check.max_violation, abs_v);
        double rel = scale > 0.0 ? abs_v / scale : (abs_v > 0.0 ? abs_v : 0.0);
        check.max_rel_violation = std::max(check.max_rel_violation, rel);
    }
};

}  // namespace

AxiomReport check_algebra_axioms(const TernaryAlgebra& alg, int samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("check_algebra_axioms: samples must be >= 1");
    Rng rng(seed);
    AxiomReport report;
    report.samples = samples;
    report.seed = seed;

    ViolationTracker assoc_ab("associativity_chain_1");
    ViolationTracker assoc_bc("associativity_chain_2");
    ViolationTracker norm_ineq("norm_submultiplicative");
    ViolationTracker outer_linear("outer_slot_linearity");

    const bool starred = alg.rule == ProductRule::star;
    for (int s = 0; s < samples; ++s) {
        AlgebraElement x = alg.random_element(rng), y = alg.random_element(rng),
                       z = alg.random_element(rng), u = alg.random_element(rng),
                       v = alg.random_element(rng);

        if (starred) {
            // [x, y, [z, u, v]] = [x, [u, z, y], v] = [[x, y, z], u, v]
            AlgebraElement a = alg.product(x, y, alg.product(z, u, v));
            AlgebraElement b = alg.product(x, alg.product(u, z, y), v);
            AlgebraElement c = alg.product(alg.product(x, y, z), u, v);
            assoc_ab.record(a, b);
            assoc_bc.record(b, c);
        } else {
            // [[x, y, z], u, v] = [x, [y, z, u], v] = [x, y, [z, u, v]]
            AlgebraElement a = alg.product(alg.product(x, y, z), u, v);
            AlgebraElement b = alg.product(x, alg.product(y, z, u), v);
            AlgebraElement c = alg.product(x, y, alg.product(z, u, v));
            assoc_ab.record(a, b);
            assoc_bc.record(b, c);
        }

        norm_ineq.record_excess(alg.product(x, y, z).norm(), x.norm() * y.norm() * z.norm());

        if (alg.rule != ProductRule::star) {
            complexd alpha = rng.unit_square(), beta = rng.unit_square();
            AlgebraElement lhs = alg.product(x * alpha + u * beta, y, z);
            AlgebraElement rhs = alg.product(x, y, z) * alpha + alg.product(u, y, z) * beta;
            outer_linear.record(lhs, rhs);
        }
    }

    report.checks = {assoc_ab.check, assoc_bc.check, norm_ineq.check};
    if (alg.rule != ProductRule::star) report.checks.push_back(outer_linear.check);
    return report;
}

AxiomReport check_module_axioms(const ModuleStructure& mod, int samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("check_module_axioms: samples must be >= 1");
    const TernaryAlgebra& alg = mod.over;
    Rng rng(seed);
    AxiomReport report;
    report.samples = samples;
    report.seed = seed;

    ViolationTracker ltm1("LTM1_linear_in_x");
    ViolationTracker ltm2("LTM2_bilinear_in_ab");
    ViolationTracker ltm3("LTM3_chain");
    ViolationTracker mtm1("MTM1_linear_in_x");
    ViolationTracker mtm2("MTM2_bilinear_in_ab");
    ViolationTracker mtm3("MTM3_six_element");
    ViolationTracker rtm1("RTM1_linear_in_x");
    ViolationTracker rtm2("RTM2_bilinear_in_ab");
    ViolationTracker rtm3("RTM3_chain");
    ViolationTracker tm("TM_mixed_chain");
    ViolationTracker nltm("NLTM_norm");

    for (int s = 0; s < samples; ++s) {
        AlgebraElement a = alg.random_element(rng), b = alg.random_element(rng),
                       c = alg.random_element(rng), d = alg.random_element(rng),
                       e = alg.random_element(rng), f = alg.random_element(rng);
        AlgebraElement x = alg.random_element(rng), x2 = alg.random_element(rng);
        complexd alpha = rng.unit_square(), beta = rng.unit_square();

        // LTM: bracket [a, b, x] with the module element last
        ltm1.record(alg.product(a, b, x * alpha + x2 * beta),
                    alg.product(a, b, x) * alpha + alg.product(a, b, x2) * beta);
        ltm2.record(alg.product(a * alpha + c * beta, b, x),
                    alg.product(a, b, x) * alpha + alg.product(c, b, x) * beta);
        ltm2.record(alg.product(a, b * alpha + c * beta, x),
                    alg.product(a, b, x) * alpha + alg.product(a, c, x) * beta);
        {
            AlgebraElement l1 = alg.product(a, b, alg.product(c, d, x));
            AlgebraElement l2 = alg.product(alg.product(a, b, c), d, x);
            AlgebraElement l3 = alg.product(a, alg.product(b, c, d), x);
            ltm3.record(l1, l2);
            ltm3.record(l2, l3);
        }

        // MTM: bracket [a, x, b] with the module element in the middle
        mtm1.record(alg.product(a, x * alpha + x2 * beta, b),
                    alg.product(a, x, b) * alpha + alg.product(a, x2, b) * beta);
        mtm2.record(alg.product(a * alpha + c * beta, x, b),
                    alg.product(a, x, b) * alpha + alg.product(c, x, b) * beta);
        mtm2.record(alg.product(a, x, b * alpha + c * beta),
                    alg.product(a, x, b) * alpha + alg.product(a, x, c) * beta);
        // [a, [b, [c, x, d], e], f] = [[a, b, c], x, [d, e, f]]
        mtm3.record(alg.product(a, alg.product(b, alg.product(c, x, d), e), f),
                    alg.product(alg.product(a, b, c), x, alg.product(d, e, f)));

        // RTM: bracket [x, a, b] with the module element first
        rtm1.record(alg.product(x * alpha + x2 * beta, a, b),
                    alg.product(x, a, b) * alpha + alg.product(x2, a, b) * beta);
        rtm2.record(alg.product(x, a * alpha + c * beta, b),
                    alg.product(x, a, b) * alpha + alg.product(x, c, b) * beta);
        rtm2.record(alg.product(x, a, b * alpha + c * beta),
                    alg.product(x, a, b) * alpha + alg.product(x, a, c) * beta);
        {
            AlgebraElement r1 = alg.product(alg.product(x, a, b), c, d);
            AlgebraElement r2 = alg.product(x, alg.product(a, b, c), d);
            AlgebraElement r3 = alg.product(x, a, alg.product(b, c, d));
            rtm3.record(r1, r2);
            rtm3.record(r2, r3);
        }

        // TM: the module element may sit in any of the five slots
        {
            AlgebraElement q[5] = {a, b, c, d, e};
            for (int pos = 0; pos < 5; ++pos) {
                AlgebraElement t[5] = {q[0], q[1], q[2], q[3], q[4]};
                t[pos] = x;
                AlgebraElement t1 = alg.product(alg.product(t[0], t[1], t[2]), t[3], t[4]);
                AlgebraElement t2 = alg.product(t[0], alg.product(t[1], t[2], t[3]), t[4]);
                AlgebraElement t3 = alg.product(t[0], t[1], alg.product(t[2], t[3], t[4]));
                tm.record(t1, t2);
                tm.record(t2, t3);
            }
        }

        nltm.record_excess(alg.product(a, b, x).norm(), a.norm() * b.norm() * x.norm());
    }

    report.checks = {ltm1.check, ltm2.check, ltm3.check, mtm1.check, mtm2.check, mtm3.check,
                     rtm1.check, rtm2.check, rtm3.check, tm.check,   nltm.check};
    return report;
}

}  // namespace ulam
