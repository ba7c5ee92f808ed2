#include "doctest.h"

#include <cmath>
#include <complex>

#include "gl2/classpoly.hpp"

using namespace gl2;

namespace {

// Oracle: j = 1728 E4^3 / (E4^3 - E6^2) in long double, divisor-sum series.
long double j_oracle(long double re_tau, long double im_tau) {
    using C = std::complex<long double>;
    const long double pi = 3.14159265358979323846264338327950288L;
    C q = std::exp(C(0, 2 * pi) * C(re_tau, im_tau));
    C e4 = 1, e6 = 1, qn = 1;
    for (int n = 1; n < 60; ++n) {
        qn *= q;
        long double s3 = 0, s5 = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) {
                s3 += std::pow((long double)d, 3);
                s5 += std::pow((long double)d, 5);
            }
        e4 += 240.0L * s3 * qn;
        e6 -= 504.0L * s5 * qn;
    }
    C j = 1728.0L * e4 * e4 * e4 / (e4 * e4 * e4 - e6 * e6);
    return j.real();
}

mpz_class lin(const ClassPolynomial& P, int k) { return P.coeffs.at(k); }

}  // namespace

TEST_CASE("reduced forms") {
    CHECK(reduced_forms(-4) == std::vector<QuadForm>{{1, 0, 1}});
    CHECK(reduced_forms(-3) == std::vector<QuadForm>{{1, 1, 1}});
    // Exhaustive scan oracle for D = -15.
    std::vector<QuadForm> scan;
    for (i64 a = 1; a * a <= 5; ++a)
        for (i64 b = -a + 1; b <= a; ++b)
            for (i64 c = a; c <= 16; ++c)
                if (b * b - 4 * a * c == -15 && gcd(gcd(a, b), c) == 1 && !(a == c && b < 0)) scan.push_back({a, b, c});
    CHECK(reduced_forms(-15) == scan);
    CHECK(scan == std::vector<QuadForm>{{1, 1, 4}, {2, 1, 2}});
    CHECK_THROWS(reduced_forms(-5));
    CHECK_THROWS(reduced_forms(4));
}

TEST_CASE("class number one") {
    for (i64 D : {-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163}) {
        CAPTURE(D);
        CHECK(hilbert_poly(D).degree() == 1);
    }
    CHECK(hilbert_poly(-15).degree() == 2);
    CHECK(hilbert_poly(-23).degree() == 3);
}

TEST_CASE("small class polynomials") {
    auto p3 = hilbert_poly(-3);
    CHECK(lin(p3, 0) == 0);
    CHECK(lin(p3, 1) == 1);
    auto p4 = hilbert_poly(-4);
    CHECK(lin(p4, 0) == -1728);

    const long double s7 = std::sqrt(7.0L);
    long double j7 = j_oracle(-0.5L, s7 / 2);
    CHECK(std::fabs(j7 + 3375.0L) < 1e-6L);
    auto p7 = hilbert_poly(-7);
    CHECK(lin(p7, 0) == 3375);
    CHECK(lin(p7, 1) == 1);

    long double j16 = j_oracle(0.0L, 2.0L);
    CHECK(std::fabs(j16 - 287496.0L) < 1e-4L);
    auto p16 = hilbert_poly(-16);
    CHECK(lin(p16, 0) == -287496);

    // Non-discriminants give the constant polynomial.
    auto one = hilbert_poly(-5);
    CHECK(one.degree() == 0);
    CHECK(lin(one, 0) == 1);
}

TEST_CASE("eval_mod") {
    auto p4 = hilbert_poly(-4);
    for (u64 p : {5, 7, 13, 101}) CHECK(eval_mod(p4, 1728 % p, p) == 0);
    auto p7 = hilbert_poly(-7);
    CHECK(eval_mod(p7, mod(-3375, 13), 13) == 0);
    CHECK(eval_mod(hilbert_poly(-5), 4, 13) == 1);
}

TEST_CASE("precision stability |D| <= 400") {
    for (i64 D = -3; D >= -400; --D) {
        if (!is_discriminant(D)) continue;
        CAPTURE(D);
        long bits = classpoly_precision(D);
        ClassPolynomial a, b;
        REQUIRE(hilbert_poly_at(D, bits, a));
        REQUIRE(hilbert_poly_at(D, 2 * bits, b));
        CHECK(a.coeffs == b.coeffs);
        CHECK(a.degree() == static_cast<int>(reduced_forms(D).size()));
    }
}

TEST_CASE("cache roundtrip") {
    ClassPolyCache c;
    auto P = c.get(-23);
    CHECK(c.get(-23) == P);
    std::string path = "classpoly_cache_test.txt";
    c.save(path);
    ClassPolyCache d;
    d.load(path);
    CHECK(d.size() == 1);
    CHECK(d.get(-23)->coeffs == P->coeffs);
    std::remove(path.c_str());
}
