#include "gl2/arith.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gl2 {

i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }
i64 lcm(i64 a, i64 b) { return std::lcm(a, b); }

u32 mod(i64 x, u32 m) {
    i64 r = x % static_cast<i64>(m);
    if (r < 0) r += m;
    return static_cast<u32>(r);
}

u64 pow_mod(u64 b, u64 e, u64 m) {
    if (m == 1) return 0;
    unsigned __int128 r = 1, x = b % m;
    while (e) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<u64>(r);
}

u32 inv_mod(i64 a, u32 m) {
    if (m == 1) return 0;
    i64 r0 = m, r1 = mod(a, m), s0 = 0, s1 = 1;
    while (r1) {
        i64 q = r0 / r1;
        i64 t = r0 - q * r1; r0 = r1; r1 = t;
        t = s0 - q * s1; s0 = s1; s1 = t;
    }
    if (r0 != 1) throw std::domain_error("inv_mod: not a unit");
    return mod(s0, m);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13}) {
        if (n % p == 0) return n == p;
    }
    for (u64 d = 17; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::vector<u64> primes_up_to(u64 bound) {
    std::vector<bool> sieve(bound + 1, true);
    std::vector<u64> out;
    for (u64 i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= bound; j += i) sieve[j] = false;
    }
    return out;
}

std::vector<PrimePower> factor(u64 n) {
    std::vector<PrimePower> out;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        PrimePower pp{static_cast<u32>(p), 0, 1};
        while (n % p == 0) {
            n /= p;
            pp.e++;
            pp.q *= static_cast<u32>(p);
        }
        out.push_back(pp);
    }
    if (n > 1) out.push_back({static_cast<u32>(n), 1, static_cast<u32>(n)});
    return out;
}

u32 radical(u32 n) {
    u32 r = 1;
    for (auto& pp : factor(n)) r *= pp.p;
    return r;
}

u32 valuation(u64 n, u32 p) {
    if (n == 0) return 0;
    u32 v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

u64 order_gl2(u32 n) {
    u64 r = 1;
    for (auto& pp : factor(n)) {
        u64 q = pp.q, p = pp.p;
        u64 q4 = q * q * q * q;
        r *= q4 / (p * p * p) * (p - 1) * (p * p - 1);
    }
    return r;
}

u64 order_sl2(u32 n) {
    u64 r = 1;
    for (auto& pp : factor(n)) {
        u64 q = pp.q, p = pp.p;
        r *= q * q * q / (p * p) * (p * p - 1);
    }
    return r;
}

u32 euler_phi(u32 n) {
    u32 r = n;
    for (auto& pp : factor(n)) r = r / pp.p * (pp.p - 1);
    return r;
}

std::vector<u32> units(u32 n) {
    std::vector<u32> out;
    if (n == 1) return {0};
    for (u32 u = 1; u < n; ++u)
        if (std::gcd(u, n) == 1) out.push_back(u);
    return out;
}

std::vector<u32> unit_kernel_gens(u32 n, u32 m) {
    std::vector<u32> members;
    for (u32 u : units(n))
        if (u % m == 1 % m) members.push_back(u);
    std::vector<bool> in(n, false);
    std::vector<u32> group{1 % n};
    in[1 % n] = true;
    std::vector<u32> gens;
    for (u32 u : members) {
        if (in[u]) continue;
        gens.push_back(u);
        // Re-close the cyclic-product subgroup.
        for (size_t i = 0; i < group.size(); ++i) {
            for (u32 g : gens) {
                u32 y = static_cast<u32>(u64(group[i]) * g % n);
                if (!in[y]) { in[y] = true; group.push_back(y); }
            }
        }
    }
    return gens;
}

int legendre(i64 a, u64 p) {
    u64 r = pow_mod(mod(a, static_cast<u32>(p)), (p - 1) / 2, p);
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

int square_class_rank(u32 n) {
    int k = 0;
    for (auto& pp : factor(n)) {
        if (pp.p != 2) k += 1;
        else if (pp.e == 2) k += 1;
        else if (pp.e >= 3) k += 2;
    }
    return k;
}

u32 square_class(u32 u, u32 n) {
    u32 bits = 0;
    int k = 0;
    for (auto& pp : factor(n)) {
        u32 r = u % pp.q;
        if (pp.p != 2) {
            if (legendre(r, pp.p) == -1) bits |= 1u << k;
            ++k;
        } else if (pp.e >= 2) {
            if (r % 4 == 3) bits |= 1u << k;
            ++k;
            if (pp.e >= 3) {
                u32 r8 = r % 8;
                if (r8 == 3 || r8 == 5) bits |= 1u << k;
                ++k;
            }
        }
    }
    return bits;
}

i64 isqrt(i64 x) {
    if (x < 0) return -1;
    i64 r = static_cast<i64>(std::sqrt(static_cast<long double>(x)));
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

bool is_square(i64 x) {
    if (x < 0) return false;
    i64 r = isqrt(x);
    return r * r == x;
}

}  // namespace gl2
