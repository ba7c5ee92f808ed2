#include "doctest.h"

#include <random>

#include "gl2/modring.hpp"

using namespace gl2;

TEST_CASE("mul basics") {
    Mat2 m = make_mat(3, 4, 5, 6, 7);
    CHECK(mul(identity(7), m) == m);
    CHECK(mul(mat_T(5), mat_T(5)) == make_mat(1, 2, 0, 1, 5));
    CHECK(mul(mat_S(11), mat_T(11)) == make_mat(0, 10, 1, 1, 11));
    CHECK_THROWS(mul(identity(5), identity(7)));
}

TEST_CASE("inv") {
    CHECK(inv(mat_S(4)) == make_mat(0, 1, 3, 0, 4));
    CHECK(inv(identity(9)) == identity(9));
    CHECK(inv(make_mat(2, 0, 0, 1, 5)) == make_mat(3, 0, 0, 1, 5));
    CHECK_THROWS(inv(make_mat(2, 0, 0, 1, 4)));
}

TEST_CASE("encode is a monotone bijection") {
    const u32 n = 5;
    Code prev = 0;
    bool first = true;
    for (u32 a = 0; a < n; ++a)
        for (u32 b = 0; b < n; ++b)
            for (u32 c = 0; c < n; ++c)
                for (u32 d = 0; d < n; ++d) {
                    Mat2 x{n, a, b, c, d};
                    Code k = encode(x);
                    CHECK(decode(k, n) == x);
                    if (!first) CHECK(k == prev + 1);
                    prev = k;
                    first = false;
                }
    CHECK(prev == 624);
}

TEST_CASE("crt split and join") {
    auto parts = crt_split(scalar(7, 15), {3, 5});
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == identity(3));
    CHECK(parts[1] == scalar(2, 5));
    CHECK_THROWS(crt_split(identity(15), {3, 3}));
    CHECK_THROWS(crt_split(identity(15), {3, 7}));

    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i) {
        Mat2 x = make_mat(rng(), rng(), rng(), rng(), 24);
        CHECK(crt_join(crt_split(x, {8, 3})) == x);
    }
    // det compatibility, exhaustive mod 21.
    for (Code k = 0; k < 21u * 21 * 21 * 21; ++k) {
        Mat2 x = decode(k, 21);
        auto p = crt_split(x, {3, 7});
        if (det(p[0]) != det(x) % 3 || det(p[1]) != det(x) % 7) {
            FAIL("det mismatch at code " << k);
        }
    }
}

TEST_CASE("crt is a group isomorphism on GL2(Z/6) and GL2(Z/15)") {
    for (u32 n : {6u, 15u}) {
        auto fs = factor(n);
        std::vector<u32> qs;
        for (auto& f : fs) qs.push_back(f.q);
        std::vector<Mat2> gl;
        for (Code k = 0; k < Code(n) * n * n * n; ++k) {
            Mat2 x = decode(k, n);
            if (is_unit_det(x)) gl.push_back(x);
        }
        CHECK(gl.size() == order_gl2(n));
        std::mt19937 rng(n);
        for (int t = 0; t < 20000; ++t) {
            const Mat2& x = gl[rng() % gl.size()];
            const Mat2& y = gl[rng() % gl.size()];
            auto sx = crt_split(x, qs), sy = crt_split(y, qs), sxy = crt_split(mul(x, y), qs);
            for (size_t i = 0; i < qs.size(); ++i) REQUIRE(mul(sx[i], sy[i]) == sxy[i]);
        }
    }
}

TEST_CASE("reduce_mod") {
    CHECK(reduce_mod(make_mat(5, 4, 0, 1, 8), 4) == identity(4));
    Mat2 x = make_mat(3, 1, 4, 1, 9);
    CHECK(reduce_mod(x, 9) == x);
    CHECK_THROWS(reduce_mod(x, 4));
    std::vector<Mat2> gl;
    for (Code k = 0; k < 6u * 6 * 6 * 6; ++k) {
        Mat2 y = decode(k, 6);
        if (is_unit_det(y)) gl.push_back(y);
    }
    REQUIRE(gl.size() == 288);
    for (auto& a : gl)
        for (auto& b : gl) {
            if (reduce_mod(mul(a, b), 3) != mul(reduce_mod(a, 3), reduce_mod(b, 3))) FAIL("reduce");
            if (det(mul(a, b)) != det(a) * det(b) % 6) FAIL("det");
        }
}

TEST_CASE("square classes") {
    CHECK(square_class_rank(4) == 1);
    CHECK(square_class_rank(8) == 2);
    CHECK(square_class_rank(2) == 0);
    CHECK(square_class_rank(168) == 4);
    for (u32 n : {8u, 15u, 24u, 40u, 63u}) {
        auto us = units(n);
        for (u32 a : us)
            for (u32 b : us)
                CHECK(square_class(a * b % n, n) == (square_class(a, n) ^ square_class(b, n)));
        for (u32 a : us) CHECK(square_class(a * a % n, n) == 0);
    }
}
