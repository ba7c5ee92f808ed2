#include "doctest.h"

#include "gl2/congruence.hpp"
#include "gl2/errors.hpp"

using namespace gl2;

namespace {

// H = image of Gamma_0(N) in SL2(Z/N).
CongruenceRecord gamma0_record(u32 N) {
    CongruenceRecord r;
    r.label = "G0(" + std::to_string(N) + ")";
    r.level = N;
    r.gens.push_back(mat_T(N));
    r.gens.push_back(scalar(-1, N));
    for (u32 u : unit_kernel_gens(N, 1)) r.gens.push_back(make_mat(u, 0, 0, inv_mod(u, N), N));
    return r;
}

// Kronecker symbol (d / p) for prime p.
int kronecker(i64 d, u32 p) {
    if (p != 2) return legendre(d, p);
    if (d % 2 == 0) return 0;
    i64 r = ((d % 8) + 8) % 8;
    return (r == 1 || r == 7) ? 1 : -1;
}

// Classical formulas for Gamma_0(N).
Invariants gamma0_oracle(u32 N) {
    Invariants v{};
    u64 mu = N;
    for (const auto& pp : factor(N)) mu = mu / pp.p * (pp.p + 1);
    v.mu = static_cast<u32>(mu);
    v.e2 = N % 4 == 0 ? 0 : 1;
    v.e3 = N % 9 == 0 ? 0 : 1;
    for (const auto& pp : factor(N)) {
        v.e2 *= 1 + kronecker(-4, pp.p) * (pp.p != 2);
        v.e3 *= 1 + kronecker(-3, pp.p);
    }
    v.einf = 0;
    for (u32 d = 1; d <= N; ++d)
        if (N % d == 0) v.einf += euler_phi(static_cast<u32>(gcd(d, N / d)));
    int twelve_g = 12 + static_cast<int>(v.mu) - 3 * static_cast<int>(v.e2) - 4 * static_cast<int>(v.e3) -
                   6 * static_cast<int>(v.einf);
    v.genus = twelve_g / 12;
    return v;
}

}  // namespace

TEST_CASE("parse classification text") {
    const std::string text =
        "# genus 0\n"
        "# comment line\n"
        "1A0 1 1 0 0\n"
        "2A0 2 2 0 1 1 1 1 0   # trailing comment\n"
        "\n";
    auto recs = parse_classification_text(text);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].label == "1A0");
    CHECK(recs[0].level == 1);
    CHECK(recs[1].gens.size() == 1);
    CHECK(recs[1].gens[0] == make_mat(1, 1, 1, 0, 2));
    CHECK(parse_classification_text(format_record(recs[1]) + "\n")[0].gens == recs[1].gens);

    CHECK_THROWS_AS(parse_classification_text("2A0 2 2 0 1 1 1 1\n"), DataError);
    CHECK_THROWS_AS(parse_classification_text("# genus 1\n2A0 2 2 0 1 1 1 1 0\n"), DataError);
    try {
        parse_classification_text("7X0 7 8 0 1 2 0 0 1\n", "f.txt");
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("f.txt:1") != std::string::npos);
        CHECK(msg.find("7X0") != std::string::npos);
    }
    // Negative entries are normalized.
    auto neg = parse_classification_text("5Z0 5 5 0 1 1 -1 0 1\n");
    CHECK(neg[0].gens[0] == make_mat(1, 4, 0, 1, 5));
}

TEST_CASE("Gamma_0(N) invariants") {
    for (u32 N = 2; N <= 30; ++N) {
        CAPTURE(N);
        auto rec = gamma0_record(N);
        GroupTable H = close_gens(N, rec.gens, Ambient::SL2);
        Invariants got = invariants(H);
        Invariants want = gamma0_oracle(N);
        CHECK(got.mu == want.mu);
        CHECK(got.e2 == want.e2);
        CHECK(got.e3 == want.e3);
        CHECK(got.einf == want.einf);
        CHECK(got.genus == want.genus);
    }
    CHECK(invariants(close_gens(11, gamma0_record(11).gens, Ambient::SL2)).genus == 1);
}

TEST_CASE("build_subgroup checks the record") {
    auto rec = gamma0_record(11);
    rec.index = 12;
    rec.genus = 1;
    auto cs = build_subgroup(rec);
    CHECK(cs.mu == 12);
    CHECK(cs.einf == 2);
    rec.index = 13;
    CHECK_THROWS_AS(build_subgroup(rec), DataError);
    rec.index = 12;
    rec.genus = 0;
    CHECK_THROWS_AS(build_subgroup(rec), DataError);
}

TEST_CASE("principal congruence subgroups") {
    // X(N) has genus 0 for N <= 5, 1 for N = 6 and 3 for N = 7.
    for (auto [N, g] : std::vector<std::pair<u32, int>>{{2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 1}, {7, 3}}) {
        GroupTable H = close_gens(N, {scalar(-1, N)}, Ambient::SL2);
        CHECK(invariants(H).genus == g);
    }
}
