#pragma once
#include <cstdint>
#include <utility>
#include <vector>

namespace gl2 {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

i64 gcd(i64 a, i64 b);
i64 lcm(i64 a, i64 b);
// Normalizes x into [0, m).
u32 mod(i64 x, u32 m);
u64 pow_mod(u64 b, u64 e, u64 m);
// Inverse of a modulo m; throws std::domain_error when gcd(a, m) != 1.
u32 inv_mod(i64 a, u32 m);

bool is_prime(u64 n);
std::vector<u64> primes_up_to(u64 bound);

struct PrimePower {
    u32 p;
    u32 e;
    u32 q;  // p^e
};
std::vector<PrimePower> factor(u64 n);
u32 radical(u32 n);
u32 valuation(u64 n, u32 p);

u64 order_gl2(u32 n);
u64 order_sl2(u32 n);
u32 euler_phi(u32 n);

// Units of Z/n in increasing order.
std::vector<u32> units(u32 n);
// Small generating set of the subgroup {u unit mod n : u == 1 mod m}.
std::vector<u32> unit_kernel_gens(u32 n, u32 m);

// Legendre symbol (a/p) for odd prime p, in {-1, 0, 1}.
int legendre(i64 a, u64 p);

// (Z/n)^x / squares is elementary abelian of order 2^rank.
// square_class maps a unit to a bit vector of that rank.
int square_class_rank(u32 n);
u32 square_class(u32 u, u32 n);

// Discriminant-style helpers.
i64 isqrt(i64 x);
bool is_square(i64 x);

}  // namespace gl2
