#include "gl2/modring.hpp"

#include <sstream>
#include <stdexcept>

namespace gl2 {

Mat2 make_mat(i64 a, i64 b, i64 c, i64 d, u32 n) {
    if (n == 0) throw std::invalid_argument("modulus must be positive");
    return Mat2{n, mod(a, n), mod(b, n), mod(c, n), mod(d, n)};
}

Mat2 identity(u32 n) { return make_mat(1, 0, 0, 1, n); }
Mat2 scalar(i64 s, u32 n) { return make_mat(s, 0, 0, s, n); }

Mat2 mul(const Mat2& x, const Mat2& y) {
    if (x.n != y.n) throw std::invalid_argument("mul: modulus mismatch");
    return mul_fast(x, y);
}

u32 det(const Mat2& x) {
    const u64 n = x.n;
    return static_cast<u32>((u64(x.a) * x.d % n + n - u64(x.b) * x.c % n) % n);
}

u32 trace(const Mat2& x) { return static_cast<u32>((u64(x.a) + x.d) % x.n); }

bool is_unit_det(const Mat2& x) { return gcd(det(x), x.n) == 1; }

Mat2 inv(const Mat2& x) {
    u32 di = inv_mod(det(x), x.n);
    const u64 n = x.n;
    return Mat2{x.n, static_cast<u32>(u64(x.d) * di % n),
                static_cast<u32>((n - x.b) % n * di % n),
                static_cast<u32>((n - x.c) % n * di % n),
                static_cast<u32>(u64(x.a) * di % n)};
}

Mat2 pow(const Mat2& x, u64 e) {
    Mat2 r = identity(x.n), b = x;
    while (e) {
        if (e & 1) r = mul_fast(r, b);
        b = mul_fast(b, b);
        e >>= 1;
    }
    return r;
}

Mat2 decode(Code code, u32 n) {
    Mat2 x;
    x.n = n;
    x.d = static_cast<u32>(code % n); code /= n;
    x.c = static_cast<u32>(code % n); code /= n;
    x.b = static_cast<u32>(code % n); code /= n;
    x.a = static_cast<u32>(code % n);
    return x;
}

Mat2 reduce_mod(const Mat2& x, u32 m) {
    if (m == 0 || x.n % m != 0) throw std::invalid_argument("reduce_mod: m does not divide n");
    return Mat2{m, x.a % m, x.b % m, x.c % m, x.d % m};
}

Mat2 naive_lift(const Mat2& x, u32 n) {
    if (n % x.n != 0) throw std::invalid_argument("naive_lift: modulus does not divide target");
    return Mat2{n, x.a, x.b, x.c, x.d};
}

u32 crt(const std::vector<u32>& residues, const std::vector<u32>& moduli) {
    u64 r = 0, m = 1;
    for (size_t i = 0; i < moduli.size(); ++i) {
        u64 q = moduli[i];
        // r' = r + m * t with r + m t == residue (mod q)
        u64 t = (mod(i64(residues[i]) - i64(r % q), static_cast<u32>(q)) *
                 u64(inv_mod(static_cast<i64>(m % q), static_cast<u32>(q)))) % q;
        r += m * t;
        m *= q;
    }
    return static_cast<u32>(r % m);
}

std::vector<Mat2> crt_split(const Mat2& x, const std::vector<u32>& factors) {
    u64 prod = 1;
    for (size_t i = 0; i < factors.size(); ++i) {
        for (size_t j = i + 1; j < factors.size(); ++j)
            if (gcd(factors[i], factors[j]) != 1)
                throw std::invalid_argument("crt_split: factors not coprime");
        prod *= factors[i];
    }
    if (prod != x.n) throw std::invalid_argument("crt_split: product differs from modulus");
    std::vector<Mat2> out;
    for (u32 q : factors) out.push_back(reduce_mod(x, q));
    return out;
}

Mat2 crt_join(const std::vector<Mat2>& parts) {
    std::vector<u32> moduli;
    u64 n = 1;
    for (auto& p : parts) {
        moduli.push_back(p.n);
        n *= p.n;
    }
    for (size_t i = 0; i < moduli.size(); ++i)
        for (size_t j = i + 1; j < moduli.size(); ++j)
            if (gcd(moduli[i], moduli[j]) != 1)
                throw std::invalid_argument("crt_join: moduli not coprime");
    auto pick = [&](auto field) {
        std::vector<u32> r;
        for (auto& p : parts) r.push_back(field(p));
        return crt(r, moduli);
    };
    return Mat2{static_cast<u32>(n), pick([](const Mat2& m) { return m.a; }),
                pick([](const Mat2& m) { return m.b; }),
                pick([](const Mat2& m) { return m.c; }),
                pick([](const Mat2& m) { return m.d; })};
}

Mat2 mat_S(u32 n) { return make_mat(0, -1, 1, 0, n); }
Mat2 mat_T(u32 n) { return make_mat(1, 1, 0, 1, n); }

std::vector<Mat2> sl2_gens(u32 n) { return {mat_S(n), mat_T(n)}; }

std::vector<Mat2> gl2_gens(u32 n) {
    std::vector<Mat2> g = sl2_gens(n);
    for (u32 u : unit_kernel_gens(n, 1))
        g.push_back(make_mat(u, 0, 0, 1, n));
    return g;
}

std::string to_string(const Mat2& x) {
    std::ostringstream os;
    os << "[[" << x.a << "," << x.b << "],[" << x.c << "," << x.d << "]]";
    return os.str();
}

}  // namespace gl2
