#pragma once
#include <array>
#include <string>
#include <vector>

#include "gl2/group.hpp"

namespace gl2 {

// Subgroup of (Z/k)^3, stored as a lattice L with kZ^3 ⊆ L ⊆ Z^3 in Hermite normal form.
class Lattice3 {
public:
    using Vec = std::array<i64, 3>;

    explicit Lattice3(i64 k = 1);
    i64 modulus() const { return k_; }
    bool contains(Vec v) const;
    // Returns false when v was already present.
    bool insert(const Vec& v);
    // Image in (Z/m)^3 for m | k.
    Lattice3 reduce(i64 m) const;
    u64 order() const;
    const std::array<Vec, 3>& basis() const { return h_; }

private:
    void rebuild(std::vector<Vec> rows);
    i64 k_;
    std::array<Vec, 3> h_;
};

// G(L)' for L = N*k (k | N), with G the full preimage of G(N).
// base_order = |G(N)'|; kernel = G(L)' ∩ ker(SL2(Z/L) -> SL2(Z/N)) as a subgroup of sl2(Z/k).
struct LayeredCommutator {
    u32 N = 1;
    u32 k = 1;
    u64 base_order = 1;
    Lattice3 kernel;
    std::vector<Mat2> base_gens;  // generators at level L whose images generate G(N)'
};

LayeredCommutator layered_commutator(const GroupTable& G_N, u32 k);

struct ChainStep {
    u64 M = 0;
    u64 index = 0;
    bool certifies = false;
};

struct IndexCertificate {
    u32 N = 1;
    u64 M = 1;       // certifying level
    u64 index = 1;   // [SL2(Z/M) : G(M)']
    u64 n = 2;       // index * 2 / gcd(2, N)
    std::vector<ChainStep> chain;
};

// Throws ResourceError when the level-N^2 computation exceeds the element budget.
IndexCertificate profinite_index(const GroupTable& G_N);
u64 scr_value(const IndexCertificate& cert);

}  // namespace gl2
