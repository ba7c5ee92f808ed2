#pragma once
#include <array>
#include <map>
#include <memory>
#include <vector>

#include "gl2/candidates.hpp"

namespace gl2 {

// y^2 = x^3 + A x + B over F_p, p >= 5.
struct ShortCurve {
    u64 p = 5;
    u64 A = 0, B = 0;
};

bool is_singular(const ShortCurve& E);
u64 j_invariant(const ShortCurve& E);
// y^2 = x^3 + 3j(1728-j) x + 2j(1728-j)^2, or x^3 + 1 / x^3 + x at j = 0 / 1728.
ShortCurve curve_with_j(u64 j, u64 p);

// Throws std::invalid_argument for singular curves or p < 5.
i64 trace_of_frobenius(const ShortCurve& E);

struct FrobeniusData {
    u64 p = 0;
    u64 j = 0;
    i64 a = 0;
    i64 disc = 0;  // a^2 - 4p
    i64 b = 1;
    std::array<i64, 4> phi{};  // (phi[0], phi[1]; phi[2], phi[3])
};

// Valid for every j; fibers at j = 0, 1728 use cm_embedding instead.
// Throws std::logic_error if no b certifies.
FrobeniusData frobenius_matrix(const ShortCurve& E);
FrobeniusData frobenius_from_trace(u64 p, u64 j, i64 a);

// Automorphisms and Frobenius of the j = 0 or 1728 curve acting on E[N].
struct CMEmbedding {
    u64 j = 0;
    u64 p = 0;
    bool ordinary = true;
    Mat2 aut_gen;
    Mat2 frob;
};

// p >= 5, p not dividing N. Ordinary when p = 1 mod 4 (j = 1728) or p = 1 mod 3 (j = 0).
CMEmbedding cm_embedding(u64 j, u64 p, u32 N);

bool admissible_prime(u64 p, u32 N);

// Per-prime data shared by all groups: one Frobenius matrix per generic j,
// grouped by (a, b).
struct FiberTable {
    u64 p = 0;
    struct Entry {
        FrobeniusData frob;
        u64 multiplicity = 0;
    };
    std::vector<Entry> generic;
};
std::shared_ptr<const FiberTable> fiber_table(u64 p);

class PointCounter {
public:
    explicit PointCounter(const GroupTable& G);
    u64 count(u64 p) const;
    i64 ap(u64 p) const { return static_cast<i64>(p) + 1 - static_cast<i64>(count(p)); }

    struct Breakdown {
        u64 generic = 0, j0 = 0, j1728 = 0, cusps = 0;
    };
    Breakdown breakdown(u64 p) const;

private:
    GroupTable G_;
    CosetSpace cs_;
    CuspCounter cusps_;
};

u64 count_X_Fp(const GroupTable& G, u64 p);
i64 ap_J(const GroupTable& G, u64 p);

}  // namespace gl2
