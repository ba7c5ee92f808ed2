#include "doctest.h"

#include "gl2/candidates.hpp"

using namespace gl2;

TEST_CASE("level N from N0") {
    CHECK(n_from_level(1) == 1);
    CHECK(n_from_level(3) == 3);
    CHECK(n_from_level(11) == 11);
    CHECK(n_from_level(2) == 8);
    CHECK(n_from_level(6) == 24);
    CHECK(n_from_level(4) == 8);
    CHECK(n_from_level(12) == 24);
    CHECK(n_from_level(42) == 168);
}

TEST_CASE("real points") {
    CHECK(check_real(full_group(7, Ambient::GL2)));
    CHECK(check_real(borel(5)));
    CHECK(check_real(split_cartan_normalizer(7)));
    // Elements of a non-split Cartan group are scalar or have irreducible characteristic polynomial.
    CHECK_FALSE(check_real(nonsplit_cartan(5)));
    CHECK(check_real(nonsplit_cartan_normalizer(5)));
}

TEST_CASE("cusp counts") {
    for (u32 p : {5u, 7u, 11u, 13u}) {
        CAPTURE(p);
        CuspCounter b(borel(p));
        CHECK(b.total() == 2);
        CHECK(b.count(CuspField::Q) == 2);
        CuspCounter ns(nonsplit_cartan_normalizer(p));
        CHECK(ns.total() == (p - 1) / 2);
        CHECK(ns.count(CuspField::Q) == 0);
        CHECK(ns.count(CuspField::Geometric) == (p - 1) / 2);
        // Rational over F_q exactly when q = +-1 mod p for these cusps.
        for (u32 q : {2u, 3u, 29u, 31u, 41u, 43u, 53u, 79u}) {
            if (q % p == 0) continue;
            size_t want = (q % p == 1 || q % p == p - 1) ? (p - 1) / 2 : 0;
            CHECK(ns.count(CuspField::Fp, q) == want);
        }
        CHECK(ns.count(CuspField::Qp, p) == 0);
    }
    GroupTable g = full_group(6, Ambient::GL2);
    CHECK(cusp_count(g, CuspField::Q) == 1);
    CHECK_THROWS(cyclotomic_b_gens(6, CuspField::Fp, 3));
    CHECK_THROWS(cyclotomic_b_gens(6, CuspField::Qp, 5));
}

TEST_CASE("candidates for a small record") {
    auto recs = parse_classification_text("# genus 0\n2A0 2 2 0 1 1 1 1 0\n");
    auto cs = build_subgroup(recs[0]);
    auto ctx = build_context(cs);
    CHECK(ctx.N == 8);
    REQUIRE(ctx.compatible);
    CHECK(ctx.qn_rank == 2);
    auto cands = enumerate_candidates(ctx, 0);
    CHECK_FALSE(cands.empty());
    for (const auto& c : cands) {
        CHECK(c.cond_a);
        CHECK(c.cond_b);
        CHECK(c.cond_c);
        CHECK(c.G.order() == ctx.Htilde.order() * 4);
        CHECK(check_abc(c.G, ctx.H).a);
        CHECK(c.W.size() == 2);
    }
    // Canonical up to conjugacy: no two candidates are conjugate in the normalizer.
    for (size_t i = 0; i < cands.size(); ++i)
        for (size_t j = i + 1; j < cands.size(); ++j) {
            bool conj = false;
            for (Code x : ctx.normalizer.elements()) {
                Mat2 m = decode(x, ctx.N);
                Mat2 mi = inv(m);
                bool all = true;
                for (const Mat2& g : cands[i].G.gens().gens)
                    if (!cands[j].G.contains(mul(mul(m, g), mi))) {
                        all = false;
                        break;
                    }
                if (all) {
                    conj = true;
                    break;
                }
            }
            CHECK_FALSE(conj);
        }
}
