#pragma once
#include <array>
#include <string>
#include <vector>

#include "gl2/arith.hpp"

namespace gl2 {

// Base-n code of (a, b, c, d); monotone in lexicographic entry order.
using Code = std::uint64_t;

struct Mat2 {
    u32 n = 1;
    u32 a = 0, b = 0, c = 0, d = 0;

    bool operator==(const Mat2& o) const {
        return n == o.n && a == o.a && b == o.b && c == o.c && d == o.d;
    }
    bool operator!=(const Mat2& o) const { return !(*this == o); }
};

Mat2 make_mat(i64 a, i64 b, i64 c, i64 d, u32 n);
Mat2 identity(u32 n);
Mat2 scalar(i64 s, u32 n);

// Throws std::invalid_argument on modulus mismatch.
Mat2 mul(const Mat2& x, const Mat2& y);
// Throws std::domain_error when det is not a unit.
Mat2 inv(const Mat2& x);
Mat2 pow(const Mat2& x, u64 e);

inline Mat2 mul_fast(const Mat2& x, const Mat2& y) {
    const u64 n = x.n;
    return Mat2{x.n,
                static_cast<u32>((u64(x.a) * y.a + u64(x.b) * y.c) % n),
                static_cast<u32>((u64(x.a) * y.b + u64(x.b) * y.d) % n),
                static_cast<u32>((u64(x.c) * y.a + u64(x.d) * y.c) % n),
                static_cast<u32>((u64(x.c) * y.b + u64(x.d) * y.d) % n)};
}

u32 det(const Mat2& x);
u32 trace(const Mat2& x);
bool is_unit_det(const Mat2& x);

inline Code encode(const Mat2& x) {
    const u64 n = x.n;
    return ((u64(x.a) * n + x.b) * n + x.c) * n + x.d;
}
Mat2 decode(Code code, u32 n);

Mat2 reduce_mod(const Mat2& x, u32 m);
// Reinterprets the entries of x (mod m) as residues mod n; m | n.
Mat2 naive_lift(const Mat2& x, u32 n);

std::vector<Mat2> crt_split(const Mat2& x, const std::vector<u32>& factors);
Mat2 crt_join(const std::vector<Mat2>& parts);

// CRT combination of residues; moduli pairwise coprime.
u32 crt(const std::vector<u32>& residues, const std::vector<u32>& moduli);

// Standard matrices.
Mat2 mat_S(u32 n);
Mat2 mat_T(u32 n);

// Generators of SL2(Z/n) and GL2(Z/n).
std::vector<Mat2> sl2_gens(u32 n);
std::vector<Mat2> gl2_gens(u32 n);

std::string to_string(const Mat2& x);

}  // namespace gl2
