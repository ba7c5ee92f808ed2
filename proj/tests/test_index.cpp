#include "doctest.h"

#include "gl2/index_calc.hpp"

using namespace gl2;

namespace {

// Oracle: direct enumeration of G(N^2)' at level N^2.
u64 brute_index(const GroupTable& G_N) {
    const u32 N = G_N.modulus();
    GroupTable big = preimage(G_N, N * N);
    GroupTable d = commutator_subgroup(big);
    return order_sl2(N * N) / d.order();
}

}  // namespace

TEST_CASE("Lattice3") {
    Lattice3 l(12);
    CHECK(l.order() == 1);
    CHECK(l.insert({4, 0, 0}));
    CHECK(l.order() == 3);
    CHECK_FALSE(l.insert({8, 0, 0}));
    CHECK(l.insert({6, 6, 0}));
    CHECK(l.order() == 6);
    CHECK(l.contains({2, 6, 0}));
    CHECK_FALSE(l.contains({1, 0, 0}));
    CHECK(l.reduce(4).order() == 2);  // images of (4,0,0),(6,6,0) in (Z/4)^3: {0, (2,2,0)}
    CHECK(l.reduce(3).order() == 3);
    Lattice3 f(7);
    f.insert({1, 0, 0});
    f.insert({0, 1, 0});
    f.insert({3, 5, 1});
    CHECK(f.order() == 343);
}

TEST_CASE("derived group facts") {
    auto c4 = profinite_index(full_group(4, Ambient::GL2));
    CHECK(c4.index == 2);
    CHECK(c4.n == 2);
    auto c3 = profinite_index(full_group(3, Ambient::GL2));
    CHECK(c3.index == 1);
    CHECK(c3.n == 2);
    CHECK(c3.M == 3);
}

TEST_CASE("layered index agrees with direct level-N^2 closure") {
    std::vector<GroupTable> groups = {
        full_group(4, Ambient::GL2),
        borel(4),
        borel(6),
        borel(3),
        split_cartan_normalizer(3),
        nonsplit_cartan_normalizer(3),
        close_gens(4, {make_mat(1, 1, 0, 1, 4), make_mat(3, 0, 0, 1, 4), scalar(3, 4),
                       make_mat(1, 0, 0, 3, 4)}),
        close_gens(8, {make_mat(1, 2, 0, 1, 8), make_mat(3, 0, 0, 1, 8), make_mat(1, 0, 0, 3, 8),
                       make_mat(5, 0, 0, 1, 8), make_mat(1, 0, 0, 5, 8), make_mat(1, 0, 4, 1, 8)}),
        crt_product({borel(2), nonsplit_cartan_normalizer(3)}),
    };
    for (const auto& g : groups) {
        auto cert = profinite_index(g);
        u64 oracle = brute_index(g);
        INFO("N=" << g.modulus() << " |G|=" << g.order());
        CHECK(cert.chain.back().index == oracle);
        CHECK(cert.index == oracle);
    }
}

TEST_CASE("layered base equals commutator subgroup mod N") {
    GroupTable g = crt_product({borel(4), nonsplit_cartan_normalizer(3)});
    auto lc = layered_commutator(g, 6);
    CHECK(lc.base_order == commutator_subgroup(g).order());
    // Direct level-rN closure gives the same kernel image mod r as the N^2 computation.
    auto direct = layered_commutator(g, 6);
    auto big = layered_commutator(g, 12);
    CHECK(big.kernel.reduce(6).order() == direct.kernel.order());
}

TEST_CASE("exceptional groups") {
    auto g1 = profinite_index(nonsplit_cartan_normalizer(11));
    CHECK(g1.n == 220);
    auto g2 = profinite_index(crt_product({nonsplit_cartan_normalizer(3), nonsplit_cartan_normalizer(5)}));
    CHECK(g2.n == 240);
    CHECK(g2.index == 120);
    auto g3 = profinite_index(crt_product({nonsplit_cartan_normalizer(3), split_cartan_normalizer(5)}));
    CHECK(g3.n == 360);
    auto g4 = profinite_index(crt_product({nonsplit_cartan_normalizer(3), nonsplit_cartan_normalizer(7)}));
    CHECK(g4.n == 504);
}
