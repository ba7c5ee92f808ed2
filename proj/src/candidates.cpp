#include "gl2/candidates.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gl2 {

u32 n_from_level(u32 N0) {
    if (N0 == 0) throw std::invalid_argument("level must be positive");
    const u32 v = valuation(N0, 2);
    if (v == 0) return N0;
    if (v == 1) return 4 * N0;
    return 2 * N0;
}

LevelContext build_context(const CongruenceSubgroup& cs) {
    if (cs.level == 1) throw std::invalid_argument("build_context: level 1 is special-cased");
    LevelContext ctx;
    ctx.gamma_label = cs.record.label;
    ctx.N0 = cs.level;
    ctx.N = n_from_level(cs.level);
    const u32 N = ctx.N;
    ctx.H = preimage(cs.H, N);
    std::vector<Mat2> gens = ctx.H.gens().gens;
    for (u32 u : unit_kernel_gens(N, 1)) gens.push_back(scalar(u, N));
    ctx.Htilde = close_gens(N, gens);
    size_t sl = 0;
    for (Code c : ctx.Htilde.elements())
        if (det(decode(c, N)) == 1) ++sl;
    ctx.compatible = (sl == ctx.H.order());
    ctx.qn_rank = square_class_rank(N);
    if (!ctx.compatible) return ctx;
    ctx.normalizer = normalizer(ctx.Htilde);
    ctx.C = quotient(ctx.normalizer, ctx.Htilde);
    return ctx;
}

ConditionCheck check_abc(const GroupTable& G, const GroupTable& H) {
    const u32 N = G.modulus();
    ConditionCheck r;
    size_t sl = 0;
    bool sl_in_h = true;
    std::set<u32> dets;
    for (Code c : G.elements()) {
        Mat2 x = decode(c, N);
        u32 d = det(x);
        dets.insert(d);
        if (d == 1 % N) {
            ++sl;
            if (!H.contains(x)) sl_in_h = false;
        }
    }
    r.a = sl_in_h && sl == H.order();
    r.b = true;
    for (u32 u : units(N))
        if (!G.contains(scalar(u, N))) r.b = false;
    r.c = dets.size() == euler_phi(N);
    return r;
}

namespace {

struct RealOrbits {
    std::vector<Code> codes;  // union of both target orbits
};

const RealOrbits& real_orbits(u32 N) {
    static std::mutex mu;
    static std::map<u32, std::shared_ptr<RealOrbits>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it != cache.end()) return *it->second;
    auto ro = std::make_shared<RealOrbits>();
    auto gens = gl2_gens(N);
    for (const Mat2& t : {make_mat(1, 0, 0, -1, N), make_mat(1, 1, 0, -1, N)}) {
        auto orb = conjugation_orbit(t, gens);
        ro->codes.insert(ro->codes.end(), orb.begin(), orb.end());
    }
    std::sort(ro->codes.begin(), ro->codes.end());
    ro->codes.erase(std::unique(ro->codes.begin(), ro->codes.end()), ro->codes.end());
    cache[N] = ro;
    return *ro;
}

}  // namespace

bool check_real(const GroupTable& G) {
    const auto& ro = real_orbits(G.modulus());
    for (Code c : ro.codes)
        if (G.contains_code(c)) return true;
    return false;
}

std::vector<CandidateGroup> enumerate_candidates(const LevelContext& ctx, int genus) {
    std::vector<CandidateGroup> out;
    if (!ctx.compatible) return out;
    const QuotientGroup& C = ctx.C;
    const int k = ctx.qn_rank;
    std::vector<std::vector<u32>> choices(k);
    for (u32 c = 0; c < C.order(); ++c) {
        if (C.table[c][c] != 0) continue;
        const u32 dc = C.det_class[c];
        if (dc != 0 && (dc & (dc - 1)) == 0) {
            int i = std::countr_zero(dc);
            choices[i].push_back(c);
        }
    }
    std::vector<u32> pick(k);
    auto commute = [&](u32 x, u32 y) { return C.table[x][y] == C.table[y][x]; };
    auto emit = [&]() {
        CandidateGroup cg;
        cg.gamma_label = ctx.gamma_label;
        cg.N0 = ctx.N0;
        cg.N = ctx.N;
        cg.genus = genus;
        cg.W = pick;
        std::vector<Mat2> gens = ctx.Htilde.gens().gens;
        for (u32 c : pick) gens.push_back(C.reps[c]);
        cg.G = close_gens(ctx.N, gens);
        auto abc = check_abc(cg.G, ctx.H);
        cg.cond_a = abc.a;
        cg.cond_b = abc.b;
        cg.cond_c = abc.c;
        if (!(abc.a && abc.b && abc.c))
            throw std::logic_error("candidate from W fails (a)-(c) for " + ctx.gamma_label);
        if (cg.G.order() != ctx.Htilde.order() << k)
            throw std::logic_error("candidate order mismatch for " + ctx.gamma_label);
        cg.cond_d = check_real(cg.G);
        out.push_back(std::move(cg));
    };
    // Keep one W per conjugacy class in C: the tuple that is lexicographically least.
    auto canonical = [&]() {
        for (u32 c = 1; c < C.order(); ++c) {
            const u32 ci = C.inverse[c];
            for (int i = 0; i < k; ++i) {
                const u32 w = C.table[C.table[c][pick[i]]][ci];
                if (w < pick[i]) return false;
                if (w > pick[i]) break;
            }
        }
        return true;
    };
    auto rec = [&](auto&& self, int i) -> void {
        if (i == k) {
            if (canonical()) emit();
            return;
        }
        for (u32 c : choices[i]) {
            bool ok = true;
            for (int j = 0; j < i && ok; ++j) ok = commute(c, pick[j]);
            if (!ok) continue;
            pick[i] = c;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end(), [](const CandidateGroup& x, const CandidateGroup& y) {
        return x.G.elements() < y.G.elements();
    });
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i].G == out[i - 1].G)
            throw std::logic_error("duplicate candidate for " + ctx.gamma_label);
    return out;
}

std::vector<Mat2> cyclotomic_b_gens(u32 N, CuspField field, u32 p) {
    std::vector<u32> bs;
    switch (field) {
        case CuspField::Geometric:
            break;
        case CuspField::Q:
            bs = unit_kernel_gens(N, 1);
            break;
        case CuspField::Fp:
            if (gcd(p, N) != 1) throw std::invalid_argument("cusp count over F_p needs p coprime to N");
            bs.push_back(p % N);
            break;
        case CuspField::Qp: {
            if (p == 0 || N % p != 0) throw std::invalid_argument("cusp count over Q_p needs p | N");
            u32 q = 1;
            while (N % (q * p) == 0) q *= p;
            const u32 M = N / q;
            for (u32 g : unit_kernel_gens(q, 1))
                bs.push_back(M == 1 ? g : crt({g, 1 % M}, {q, M}));
            if (M > 1) bs.push_back(crt({1 % q, p % M}, {q, M}));
            break;
        }
    }
    std::vector<Mat2> out;
    for (u32 b : bs) out.push_back(make_mat(b, 0, 0, 1, N));
    return out;
}

CuspCounter::CuspCounter(const GroupTable& G) : cs_(G, Ambient::GL2) {
    const u32 N = G.modulus();
    const size_t k = cs_.size();
    orbit_.resize(k);
    std::iota(orbit_.begin(), orbit_.end(), 0u);
    auto find = [&](u32 x) {
        while (orbit_[x] != x) x = orbit_[x] = orbit_[orbit_[x]];
        return x;
    };
    for (const Mat2& u : {scalar(-1, N), mat_T(N)}) {
        auto perm = cs_.action(u);
        for (size_t i = 0; i < k; ++i) {
            u32 a = find(static_cast<u32>(i)), b = find(perm[i]);
            if (a != b) orbit_[std::max(a, b)] = std::min(a, b);
        }
    }
    for (size_t i = 0; i < k; ++i) orbit_[i] = find(static_cast<u32>(i));
    for (size_t i = 0; i < k; ++i)
        if (orbit_[i] == i) ++orbit_count_;
}

size_t CuspCounter::count(CuspField field, u32 p) const {
    const u32 N = cs_.base().modulus();
    auto bgens = cyclotomic_b_gens(N, field, p);
    std::vector<std::vector<u32>> perms;
    for (const Mat2& b : bgens) perms.push_back(cs_.action(b));
    size_t fixed = 0;
    for (size_t i = 0; i < cs_.size(); ++i) {
        if (orbit_[i] != i) continue;
        bool stable = true;
        for (const auto& perm : perms)
            if (orbit_[perm[i]] != i) stable = false;
        if (stable) ++fixed;
    }
    return fixed;
}

size_t cusp_count(const GroupTable& G, CuspField field, u32 p) {
    return CuspCounter(G).count(field, p);
}

}  // namespace gl2
