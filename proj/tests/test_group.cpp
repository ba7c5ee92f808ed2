#include "doctest.h"

#include <set>

#include "gl2/group.hpp"

using namespace gl2;

namespace {

std::vector<Mat2> all_gl2(u32 n) {
    std::vector<Mat2> out;
    for (Code k = 0; k < Code(n) * n * n * n; ++k) {
        Mat2 x = decode(k, n);
        if (is_unit_det(x)) out.push_back(x);
    }
    return out;
}

}  // namespace

TEST_CASE("close") {
    CHECK(close_gens(5, {mat_T(5)}).order() == 5);
    CHECK(close_gens(4, {mat_S(4), mat_T(4)}, Ambient::SL2).order() == 48);
    CHECK(close_gens(7, {}).order() == 1);
    for (u32 n : {2u, 3u, 4u, 6u, 8u, 9u, 10u, 12u}) {
        CHECK(full_group(n, Ambient::SL2).order() == order_sl2(n));
        CHECK(full_group(n, Ambient::GL2).order() == order_gl2(n));
    }
    GroupTable g = close_gens(9, {make_mat(2, 1, 0, 1, 9), make_mat(1, 0, 3, 1, 9)});
    CHECK(close(g.gens()) == g);
    CHECK(order_gl2(9) % g.order() == 0);
    CHECK_THROWS(close_gens(5, {make_mat(2, 0, 0, 1, 5)}, Ambient::SL2));
}

TEST_CASE("kernel_gens") {
    CHECK(close(kernel_gens(8, 4, Ambient::SL2)).order() == 8);
    CHECK(close(kernel_gens(9, 3, Ambient::GL2)).order() == 81);
    CHECK(close(kernel_gens(7, 7, Ambient::GL2)).order() == 1);
    for (auto [n, m] : std::vector<std::pair<u32, u32>>{{8, 2}, {16, 4}, {12, 2}, {36, 6}, {6, 2}, {24, 3}}) {
        GroupTable kg = close(kernel_gens(n, m, Ambient::GL2));
        GroupTable ks = close(kernel_gens(n, m, Ambient::SL2));
        CHECK(kg.order() == order_gl2(n) / order_gl2(m));
        CHECK(ks.order() == order_sl2(n) / order_sl2(m));
        for (Code c : kg.elements()) REQUIRE(reduce_mod(decode(c, n), m) == identity(m));
    }
}

TEST_CASE("preimage") {
    CHECK(preimage(full_group(2, Ambient::GL2), 4).order() == 96);
    CHECK(preimage(close_gens(2, {}), 4).order() == 16);
    // The subgroups of GL2(Z/2) = S3: trivial, three of order 2, one of order 3, all.
    std::vector<GroupTable> subs = {
        close_gens(2, {}),
        close_gens(2, {make_mat(0, 1, 1, 0, 2)}),
        close_gens(2, {make_mat(1, 1, 0, 1, 2)}),
        close_gens(2, {make_mat(1, 0, 1, 1, 2)}),
        close_gens(2, {make_mat(0, 1, 1, 1, 2)}),
        full_group(2, Ambient::GL2)};
    for (auto& g : subs) {
        GroupTable pre = preimage(g, 4);
        CHECK(pre.order() == g.order() * 16);
        CHECK(image_mod(pre, 2) == g);
    }
    // SL2 preimage through a composite modulus.
    GroupTable h = close_gens(3, {mat_T(3)}, Ambient::SL2);
    GroupTable p = preimage(h, 12);
    CHECK(p.order() == h.order() * order_sl2(12) / order_sl2(3));
}

TEST_CASE("normalizer") {
    CHECK(normalizer(full_group(5, Ambient::SL2)).order() == 480);
    GroupTable cartan = close_gens(5, {make_mat(2, 0, 0, 1, 5), make_mat(1, 0, 0, 2, 5)});
    CHECK(cartan.order() == 16);
    GroupTable nc = normalizer(cartan);
    // Brute-force oracle over all of GL2(Z/5).
    size_t brute = 0;
    for (const Mat2& x : all_gl2(5))
        if (normalizes(x, cartan)) ++brute;
    CHECK(brute == 32);
    CHECK(nc.order() == 32);
    CHECK(normalizer(close_gens(7, {scalar(-1, 7)})).order() == order_gl2(7));
}

TEST_CASE("quotient") {
    GroupTable gl4 = full_group(4, Ambient::GL2);
    GroupTable sl4 = full_group(4, Ambient::SL2);
    std::vector<Mat2> gens = sl4.gens().gens;
    gens.push_back(scalar(3, 4));
    GroupTable ht = close_gens(4, gens);
    QuotientGroup q = quotient(gl4, ht);
    CHECK(q.order() == 2);
    CHECK(quotient(gl4, gl4).order() == 1);

    GroupTable gl15 = full_group(15, Ambient::GL2);
    std::vector<Mat2> sg = full_group(15, Ambient::SL2).gens().gens;
    for (u32 u : units(15)) sg.push_back(scalar(u, 15));
    GroupTable kernel = close_gens(15, sg);
    QuotientGroup q15 = quotient(gl15, kernel);
    CHECK(q15.order() == 4);
    std::set<u32> img;
    for (size_t i = 0; i < q15.order(); ++i) {
        img.insert(q15.det_class[i]);
        for (size_t j = 0; j < q15.order(); ++j)
            CHECK(q15.det_class[q15.table[i][j]] == (q15.det_class[i] ^ q15.det_class[j]));
    }
    CHECK(img.size() == 4);
    CHECK_THROWS(quotient(gl4, borel(4)));
}

TEST_CASE("commutator subgroup") {
    GroupTable d3 = commutator_subgroup(full_group(3, Ambient::GL2));
    CHECK(d3 == full_group(3, Ambient::SL2));
    CHECK(commutator_subgroup(close_gens(8, {make_mat(3, 0, 0, 1, 8), make_mat(1, 0, 0, 5, 8)})).order() == 1);
    GroupTable d4 = commutator_subgroup(full_group(4, Ambient::GL2));
    CHECK(d4.order() == 24);
    CHECK(full_group(4, Ambient::SL2).order() / d4.order() == 2);
}

TEST_CASE("coset spaces") {
    GroupTable gl = full_group(7, Ambient::GL2);
    CHECK(CosetSpace(gl, Ambient::GL2).size() == 1);
    GroupTable b11 = borel(11);
    CosetSpace cs(b11, Ambient::GL2);
    CHECK(cs.size() == 12);
    for (const Mat2& x : all_gl2(5)) {
        // every element lands in exactly one coset of the Borel mod 5
        static CosetSpace cs5(borel(5), Ambient::GL2);
        size_t hits = 0;
        for (size_t i = 0; i < cs5.size(); ++i)
            if (cs5.base().contains(mul(x, cs5.rep_inverse(i)))) ++hits;
        REQUIRE(hits == 1);
    }
    CHECK(fixed_cosets(cs, identity(11)) == 12);
    CHECK(fixed_cosets(cs, scalar(3, 11)) == 12);
    CHECK(fixed_cosets(cs, make_mat(2, 0, 0, 3, 11)) == 2);
    // conjugation invariance
    Mat2 m = make_mat(2, 5, 1, 7, 11);
    for (Code c : b11.elements()) {
        Mat2 u = decode(c, 11);
        REQUIRE(fixed_cosets(cs, mul(mul(u, m), inv(u))) == fixed_cosets(cs, m));
    }
}

TEST_CASE("standard groups and coset indices") {
    GroupTable g1 = nonsplit_cartan_normalizer(11);
    CHECK(g1.order() == 240);
    CHECK(CosetSpace(g1, Ambient::GL2).size() == 55);
    GroupTable g2 = crt_product({nonsplit_cartan_normalizer(3), nonsplit_cartan_normalizer(5)});
    CHECK(CosetSpace(g2, Ambient::GL2).size() == 30);
    GroupTable g3 = crt_product({nonsplit_cartan_normalizer(3), split_cartan_normalizer(5)});
    CHECK(CosetSpace(g3, Ambient::GL2).size() == 45);
    GroupTable g4 = crt_product({nonsplit_cartan_normalizer(3), nonsplit_cartan_normalizer(7)});
    CHECK(CosetSpace(g4, Ambient::GL2).size() == 63);
}

TEST_CASE("double cosets") {
    auto u_of = [](u32 n) { return close_gens(n, {scalar(-1, n), mat_T(n)}); };
    auto diag_units = [](u32 n) {
        std::vector<Mat2> g;
        for (u32 u : unit_kernel_gens(n, 1)) g.push_back(make_mat(u, 0, 0, 1, n));
        return close_gens(n, g);
    };
    auto r = double_cosets(full_group(9, Ambient::GL2), u_of(9), diag_units(9));
    CHECK(r.total == 1);
    CHECK(r.fixed == 1);
    auto b = double_cosets(borel(11), u_of(11), diag_units(11));
    CHECK(b.total == 2);
    CHECK(b.fixed == 2);
    auto n11 = double_cosets(nonsplit_cartan_normalizer(11), u_of(11), close_gens(11, {}));
    CHECK(n11.total == 5);
    CHECK_THROWS(double_cosets(borel(5), u_of(5), close_gens(5, {make_mat(0, 1, 1, 0, 5)})));

    // Orbit sizes sum to the group order (enumeration oracle mod 5).
    GroupTable g = borel(5);
    GroupTable u = u_of(5);
    std::set<std::set<Code>> dcs;
    for (const Mat2& x : all_gl2(5)) {
        std::set<Code> dc;
        for (Code a : g.elements())
            for (Code c : u.elements()) dc.insert(encode(mul(mul(decode(a, 5), x), decode(c, 5))));
        dcs.insert(dc);
    }
    size_t total = 0;
    for (auto& dc : dcs) total += dc.size();
    CHECK(total == order_gl2(5));
    CHECK(dcs.size() == double_cosets(g, u, close_gens(5, {})).total);
}

TEST_CASE("conjugation orbit and conjugator search") {
    auto orbit = conjugation_orbit(make_mat(1, 0, 0, -1, 5), gl2_gens(5));
    CHECK(orbit.size() == 480 / 16);
    GroupTable b = borel(7);
    Mat2 y = make_mat(1, 2, 3, 1, 7);
    std::vector<Mat2> gens;
    for (const Mat2& g : b.gens().gens) gens.push_back(mul(mul(y, g), inv(y)));
    GroupTable bc = close_gens(7, gens);
    auto c = find_conjugator(b, bc);
    REQUIRE(c.has_value());
    CHECK(normalizes(*c, b) == false);
    CHECK_FALSE(find_conjugator(b, split_cartan_normalizer(7)).has_value());
}
