#pragma once
#include <gmpxx.h>

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "gl2/arith.hpp"

namespace gl2 {

struct QuadForm {
    i64 a, b, c;
    bool operator==(const QuadForm&) const = default;
};

bool is_discriminant(i64 D);

// Primitive reduced forms of discriminant D < 0, sorted by (a, b).
std::vector<QuadForm> reduced_forms(i64 D);

struct ClassPolynomial {
    i64 D = 0;
    std::vector<mpz_class> coeffs;  // ascending degree; monic. {1} when D is not a discriminant.
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Starting precision in bits for D.
long classpoly_precision(i64 D);

// Rounds the product of (x - j(tau)) at `bits` of precision. Returns false when
// some coefficient is not within tolerance of an integer.
bool hilbert_poly_at(i64 D, long bits, ClassPolynomial& out);

// Doubles the precision until rounding succeeds.
ClassPolynomial hilbert_poly(i64 D);

u64 eval_mod(const ClassPolynomial& P, u64 j, u64 p);

// Thread-safe memo of class polynomials with an optional text file backing.
// File format: one line per D, "D c0 c1 ... ch".
class ClassPolyCache {
public:
    std::shared_ptr<const ClassPolynomial> get(i64 D);
    void load(const std::string& path);
    void save(const std::string& path) const;
    size_t size() const;

    static ClassPolyCache& global();

private:
    mutable std::mutex mu_;
    std::map<i64, std::shared_ptr<const ClassPolynomial>> polys_;
};

}  // namespace gl2
