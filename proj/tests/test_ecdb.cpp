#include "doctest.h"

#include <algorithm>
#include <random>

#include "gl2/ec_db.hpp"
#include "gl2/errors.hpp"

using namespace gl2;

namespace {

const char* kSample =
    "11 a 1 [0,-1,1,-10,-20] 0 5\n"
    "11 a 2 [0,-1,1,-7820,-263580] 0 1\n"
    "17 a 1 [1,-1,1,-1,-14] 0 4\n"
    "19 a 1 [0,1,1,-9,-15] 0 3\n"
    "37 a 1 [0,0,1,-1,0] 1 1\n"
    "121 a 1 [1,1,1,-30,-76] 0 1\n"
    "121 b 1 [0,-1,1,-7,10] 1 1\n"
    "121 c 1 [1,1,0,-2,-7] 0 1\n"
    "121 d 1 [0,-1,1,-40,-221] 0 1\n";

std::string data_dir() { return DATA_DIR; }

}  // namespace

TEST_CASE("parse") {
    auto st = CurveStore::parse_text(kSample);
    REQUIRE(st.records().size() == 9);
    const auto& r = st.records()[0];
    CHECK(r.conductor == 11);
    CHECK(r.class_label() == "11a");
    CHECK(r.rank == 0);
    CHECK(r.torsion == 5);
    CHECK(r.ainv == std::array<i64, 5>{0, -1, 1, -10, -20});
    CHECK(st.representatives().size() == 8);
    CHECK(st.rank_of("37a") == 1);
    CHECK_THROWS(st.rank_of("99z"));
    CHECK(CurveStore::parse_text("").records().empty());
    CHECK(CurveStore::parse_text(st.serialize()).serialize() == st.serialize());
    CHECK_THROWS_AS(CurveStore::parse_text("11 a 1 [0,-1,1,-10] 0 5\n"), DataError);
    CHECK_THROWS_AS(CurveStore::parse_text("11 a 1 [0,-1,1,-10,-20] 0 5\n11 a 1 [0,-1,1,-10,-20] 0 5\n"), DataError);
}

TEST_CASE("conductor bound and candidates") {
    CHECK(conductor_bound(11) == 121);
    CHECK(conductor_bound(15) == 6075);
    CHECK(conductor_bound(24) == 62208);
    CHECK(conductor_bound(1) == 1);
    auto st = CurveStore::parse_text(kSample);
    std::vector<std::string> labels;
    for (auto* r : candidates_for(st, 11)) labels.push_back(r->class_label());
    CHECK(labels == std::vector<std::string>{"11a", "121a", "121b", "121c", "121d"});
    CHECK(candidates_for(st, 1).empty());
    st.set_coverage(100, {});
    CHECK_THROWS_AS(candidates_for(st, 11), DataError);
}

TEST_CASE("naive a_p agrees with trace_of_frobenius") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 300; ++k) {
        u64 p = std::vector<u64>{5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}[rng() % 13];
        ShortCurve E{p, rng() % p, rng() % p};
        if (is_singular(E)) continue;
        CurveRecord r;
        r.ainv = {0, 0, 0, static_cast<i64>(E.A), static_cast<i64>(E.B)};
        CHECK(curve_ap(r, p) == trace_of_frobenius(E));
    }
}

TEST_CASE("database file") {
    auto st = CurveStore::load_dir(data_dir() + "/ecdb");
    CHECK(st.max_conductor() == 62208);
    const CurveRecord* r = st.find_class("11a");
    REQUIRE(r);
    CHECK(r->ainv == std::array<i64, 5>{0, -1, 1, -10, -20});
    CHECK(r->rank == 0);
    CHECK(r->torsion == 5);
    CHECK(st.rank_of("17a") == 0);
    CHECK(st.rank_of("19a") == 0);
    for (const auto* rep : st.representatives())
        if (rep->conductor == 17 || rep->conductor == 19) CHECK(rep->rank == 0);
    std::vector<std::string> n11;
    for (auto* rep : candidates_for(st, 11)) n11.push_back(rep->class_label());
    CHECK(n11.front() == "11a");
    for (auto* rep : candidates_for(st, 11)) CHECK((rep->conductor == 11 || rep->conductor == 121));
}

TEST_CASE("Jacobian matching") {
    auto st = CurveStore::load_dir(data_dir() + "/ecdb");
    PointCounter x0(borel(11));
    auto m = match_jacobian(x0, 11, st);
    CHECK(m.status == JacobianMatch::Status::Matched);
    CHECK(m.class_label == "11a");
    CHECK(m.rank == 0);
    CHECK(m.confirmed);

    PointCounter g1(nonsplit_cartan_normalizer(11));
    auto m1 = match_jacobian(g1, 11, st);
    CHECK(m1.status == JacobianMatch::Status::Matched);
    CHECK(m1.class_label.rfind("121", 0) == 0);
    CHECK(m1.rank > 0);

    // Probe order does not change the surviving class.
    auto primes = probe_primes(11, 30);
    std::mt19937_64 rng(99);
    for (int k = 0; k < 3; ++k) {
        std::shuffle(primes.begin(), primes.end(), rng);
        MatchOptions opt;
        opt.probe_order = primes;
        CHECK(match_jacobian(g1, 11, st, opt).class_label == m1.class_label);
    }

    // A store with a single class needs no primes.
    auto single = CurveStore::parse_text("11 a 1 [0,-1,1,-10,-20] 0 5\n");
    single.set_coverage(1000, {});
    auto ms = match_jacobian(x0, 11, single);
    CHECK(ms.primes_used == 0);
    CHECK(ms.class_label == "11a");
}
