#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ulam {

using complexd = std::complex<double>;

// Config errors: bad parameters, malformed config files, values outside
// documented ranges. CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Structural errors: operations applied to incompatible objects
// (dimension mismatch, unsupported product rule, arity mismatch).
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Integer power with exact integer arithmetic in the exponent range we use.
// Negative exponents only occur as a^(m-2) with m=1, i.e. exponent -1.
inline double ipow(double base, int exp) {
    if (exp < 0) return 1.0 / ipow(base, -exp);
    double acc = 1.0, b = base;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) acc *= b;
        b *= b;
    }
    return acc;
}

// Seeded uniform sampler. The mapping from raw engine output to doubles is
// pinned here so that sampled values are identical across platforms; the
// standard distributions leave that mapping implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform on the complex unit square [0,1] x [0,1]
    complexd unit_square() { return {uniform(), uniform()}; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace ulam
