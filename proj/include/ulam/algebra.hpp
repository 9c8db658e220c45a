#pragma once

#include <string>
#include <vector>

#include "ulam/common.hpp"

namespace ulam {

// Element of a concrete n x n complex matrix algebra; n = 1 is the scalar
// case. Entries are stored row-major.
class AlgebraElement {
public:
    AlgebraElement() : dim_(1), entries_(1, complexd{0.0, 0.0}) {}
    AlgebraElement(int dim, std::vector<complexd> entries);

    static AlgebraElement zero(int dim);
    static AlgebraElement identity(int dim);
    static AlgebraElement scalar(complexd value);

    int dim() const { return dim_; }
    const std::vector<complexd>& entries() const { return entries_; }
    complexd at(int row, int col) const { return entries_[static_cast<size_t>(row) * dim_ + col]; }
    complexd& at(int row, int col) { return entries_[static_cast<size_t>(row) * dim_ + col]; }

    bool is_finite() const;
    bool is_zero() const;

    // Frobenius norm; reduces to the complex modulus for scalars.
    double norm() const;

    AlgebraElement conj_transpose() const;

    AlgebraElement operator+(const AlgebraElement& rhs) const;
    AlgebraElement operator-(const AlgebraElement& rhs) const;
    AlgebraElement operator-() const;
    AlgebraElement operator*(complexd scale) const;

    // Binary matrix product (ordinary scalar product for n = 1).
    AlgebraElement multiply(const AlgebraElement& rhs) const;

    bool operator==(const AlgebraElement& rhs) const {
        return dim_ == rhs.dim_ && entries_ == rhs.entries_;
    }

private:
    int dim_;
    std::vector<complexd> entries_;

    void require_same_dim(const AlgebraElement& other, const char* op) const;
};

inline AlgebraElement operator*(complexd scale, const AlgebraElement& x) { return x * scale; }

enum class ProductRule {
    derived,  // [x,y,z] = x * y * z (triple matrix product)
    star,     // [x,y,z] = x * y^H * z (conjugate transpose in the middle)
    trivial,  // [x,y,z] = 0
};

std::string to_string(ProductRule rule);
ProductRule product_rule_from_string(const std::string& name);

// One measured axiom: the largest violation seen over all samples, both as an
// absolute residual norm and relative to the local term scale at that sample.
struct AxiomCheck {
    std::string name;
    double max_violation = 0.0;      // absolute residual norm
    double max_rel_violation = 0.0;  // residual / max term norm
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;
    int samples = 0;
    std::uint64_t seed = 0;

    double worst_relative() const;
    const AxiomCheck* find(const std::string& name) const;
};

// A concrete ternary algebra at desk scale. `corrupt_product` is a mutation
// hook for testing the axiom checkers: it flips the sign of the ternary
// product on part of the input domain (a global sign flip would preserve
// every axiom, so the flip is keyed on an entry of the first argument).
struct TernaryAlgebra {
    int dim = 1;
    ProductRule rule = ProductRule::derived;
    bool corrupt_product = false;

    AlgebraElement zero() const { return AlgebraElement::zero(dim); }
    AlgebraElement identity() const { return AlgebraElement::identity(dim); }

    AlgebraElement product(const AlgebraElement& x, const AlgebraElement& y,
                           const AlgebraElement& z) const;

    // m-fold binary matrix power, m in 1..4. The star rule has no canonical
    // binary product, so powers are rejected there.
    AlgebraElement power(const AlgebraElement& x, int m) const;

    double norm(const AlgebraElement& x) const;

    AlgebraElement random_element(Rng& rng) const;
    AlgebraElement random_unit(Rng& rng) const;
};

AxiomReport check_algebra_axioms(const TernaryAlgebra& alg, int samples, std::uint64_t seed);

// Ternary module with X = A: carrier and scalars share the algebra, brackets
// reuse the ternary product.
struct ModuleStructure {
    TernaryAlgebra over;
};

AxiomReport check_module_axioms(const ModuleStructure& mod, int samples, std::uint64_t seed);

}  // namespace ulam
