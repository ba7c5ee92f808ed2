#include "gl2/index_calc.hpp"

#include <stdexcept>

#include "gl2/errors.hpp"

namespace gl2 {

Lattice3::Lattice3(i64 k) : k_(k) {
    if (k < 1) throw std::invalid_argument("Lattice3: modulus must be positive");
    h_ = {Vec{k, 0, 0}, Vec{0, k, 0}, Vec{0, 0, k}};
}

bool Lattice3::contains(Vec v) const {
    for (int i = 0; i < 3; ++i) {
        v[i] %= k_;
        if (v[i] < 0) v[i] += k_;
    }
    for (int i = 0; i < 3; ++i) {
        if (v[i] % h_[i][i] != 0) return false;
        const i64 q = v[i] / h_[i][i];
        for (int j = 0; j < 3; ++j) v[j] -= q * h_[i][j];
    }
    return true;
}

bool Lattice3::insert(const Vec& v) {
    if (contains(v)) return false;
    rebuild({h_[0], h_[1], h_[2], v});
    return true;
}

void Lattice3::rebuild(std::vector<Vec> rows) {
    auto add_modulus_rows = [&](int from) {
        for (int j = from; j < 3; ++j) {
            Vec e{0, 0, 0};
            e[j] = k_;
            rows.push_back(e);
        }
    };
    add_modulus_rows(0);
    for (int col = 0; col < 3; ++col) {
        for (;;) {
            size_t best = rows.size();
            for (size_t i = col; i < rows.size(); ++i)
                if (rows[i][col] != 0 &&
                    (best == rows.size() || std::llabs(rows[i][col]) < std::llabs(rows[best][col])))
                    best = i;
            if (best == rows.size()) throw std::logic_error("Lattice3: rank deficiency");
            std::swap(rows[col], rows[best]);
            bool done = true;
            for (size_t i = col + 1; i < rows.size(); ++i) {
                const i64 q = rows[i][col] / rows[col][col];
                if (q)
                    for (int j = 0; j < 3; ++j) rows[i][j] -= q * rows[col][j];
                if (rows[i][col] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[col][col] < 0)
            for (int j = 0; j < 3; ++j) rows[col][j] = -rows[col][j];
        // Keep entries small: reduce later columns modulo k, which stays inside the lattice
        // because the k e_j rows are re-added.
        for (size_t i = col; i < rows.size(); ++i)
            for (int j = col + 1; j < 3; ++j) rows[i][j] %= k_;
        add_modulus_rows(col + 1);
    }
    for (int i = 0; i < 3; ++i) h_[i] = rows[i];
    for (int i = 1; i >= 0; --i)
        for (int j = i + 1; j < 3; ++j) {
            i64 q = h_[i][j] / h_[j][j];
            if (h_[i][j] - q * h_[j][j] < 0) --q;
            for (int t = 0; t < 3; ++t) h_[i][t] -= q * h_[j][t];
        }
}

Lattice3 Lattice3::reduce(i64 m) const {
    if (k_ % m != 0) throw std::invalid_argument("Lattice3::reduce: m does not divide k");
    Lattice3 r(m);
    std::vector<Vec> rows;
    for (const Vec& v : h_) rows.push_back(Vec{v[0] % m, v[1] % m, v[2] % m});
    r.rebuild(rows);
    return r;
}

u64 Lattice3::order() const {
    const u64 k3 = u64(k_) * u64(k_) * u64(k_);
    return k3 / u64(h_[0][0] * h_[1][1] * h_[2][2]);
}

namespace {

// Open-addressing map from element code to position.
class CodeIndex {
public:
    CodeIndex() : slots_(1024, 0), vals_(1024, 0) {}
    static u64 mix(u64 x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    // Position of key, or -1.
    i64 find(Code key) const {
        const size_t mask = slots_.size() - 1;
        for (size_t i = mix(key) & mask;; i = (i + 1) & mask) {
            if (slots_[i] == 0) return -1;
            if (slots_[i] == key + 1) return vals_[i];
        }
    }
    bool insert(Code key, u32 val) {
        if ((count_ + 1) * 2 > slots_.size()) grow();
        const size_t mask = slots_.size() - 1;
        for (size_t i = mix(key) & mask;; i = (i + 1) & mask) {
            if (slots_[i] == 0) {
                slots_[i] = key + 1;
                vals_[i] = val;
                ++count_;
                return true;
            }
            if (slots_[i] == key + 1) return false;
        }
    }

private:
    void grow() {
        std::vector<Code> os;
        std::vector<u32> ov;
        os.swap(slots_);
        ov.swap(vals_);
        slots_.assign(os.size() * 2, 0);
        vals_.assign(os.size() * 2, 0);
        const size_t mask = slots_.size() - 1;
        for (size_t t = 0; t < os.size(); ++t) {
            if (!os[t]) continue;
            size_t i = mix(os[t] - 1) & mask;
            while (slots_[i]) i = (i + 1) & mask;
            slots_[i] = os[t];
            vals_[i] = ov[t];
        }
    }
    std::vector<Code> slots_;
    std::vector<u32> vals_;
    size_t count_ = 0;
};

constexpr u64 kMaxBaseElements = 40'000'000;

inline Mat2 sl2_inverse(const Mat2& x) {
    const u32 n = x.n;
    return Mat2{n, x.d, (n - x.b) % n, (n - x.c) % n, x.a};
}

}  // namespace

LayeredCommutator layered_commutator(const GroupTable& G_N, u32 k) {
    const u32 N = G_N.modulus();
    if (k == 0 || N % k != 0) throw std::invalid_argument("layered_commutator: k must divide N");
    if (order_sl2(N) > kMaxBaseElements)
        throw ResourceError("commutator base at level " + std::to_string(N) + " exceeds budget");
    const u32 L = N * k;
    auto red = [N](const Mat2& x) { return Mat2{N, x.a % N, x.b % N, x.c % N, x.d % N}; };

    std::vector<Mat2> gens, gen_invs;
    for (const Mat2& g : G_N.gens().gens) gens.push_back(naive_lift(g, L));
    if (k > 1)
        for (auto [i, j] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
            Mat2 e = identity(L);
            u32* cell = i == 0 ? (j == 0 ? &e.a : &e.b) : (j == 0 ? &e.c : &e.d);
            *cell = (*cell + N) % L;
            gens.push_back(e);
        }
    for (const Mat2& g : gens) gen_invs.push_back(inv(g));

    LayeredCommutator out;
    out.N = N;
    out.k = k;
    std::vector<Mat2> lifts{identity(L)};
    CodeIndex index;
    index.insert(encode(red(lifts[0])), 0);
    std::vector<Mat2> R, pending;

    auto add = [&](const Mat2& c) {
        if (index.find(encode(red(c))) >= 0) {
            pending.push_back(c);
            return;
        }
        const size_t old = lifts.size();
        R.push_back(c);
        for (size_t i = 0; i < lifts.size(); ++i) {
            const size_t first = i < old ? R.size() - 1 : 0;
            for (size_t r = first; r < R.size(); ++r) {
                Mat2 y = mul_fast(lifts[i], R[r]);
                if (index.insert(encode(red(y)), static_cast<u32>(lifts.size()))) {
                    lifts.push_back(y);
                    if (lifts.size() > kMaxBaseElements)
                        throw ResourceError("commutator base enumeration exceeds budget");
                }
            }
        }
    };

    for (size_t i = 0; i < gens.size(); ++i)
        for (size_t j = i + 1; j < gens.size(); ++j)
            add(mul_fast(mul_fast(gens[i], gens[j]), mul_fast(gen_invs[i], gen_invs[j])));
    for (size_t r = 0; r < R.size(); ++r)
        for (size_t g = 0; g < gens.size(); ++g) add(mul_fast(mul_fast(gens[g], R[r]), gen_invs[g]));

    out.base_order = lifts.size();
    out.base_gens = R;
    out.kernel = Lattice3(k);
    if (k == 1) return out;

    auto vec_of = [&](const Mat2& s) {
        // s == I (mod N); coordinates of (s - I)/N mod k.
        return Lattice3::Vec{i64((s.a + L - 1) % L / N), i64(s.b / N), i64(s.c / N)};
    };
    Lattice3& K = out.kernel;
    for (size_t i = 0; i < lifts.size(); ++i)
        for (const Mat2& r : R) {
            Mat2 y = mul_fast(lifts[i], r);
            i64 j = index.find(encode(red(y)));
            K.insert(vec_of(mul_fast(y, sl2_inverse(lifts[j]))));
        }
    for (const Mat2& c : pending) {
        i64 j = index.find(encode(red(c)));
        K.insert(vec_of(mul_fast(c, sl2_inverse(lifts[j]))));
    }
    // Close under conjugation by G(L).
    std::vector<Mat2> gk, gk_inv;
    for (size_t g = 0; g < gens.size(); ++g) {
        gk.push_back(reduce_mod(gens[g], k));
        gk_inv.push_back(reduce_mod(gen_invs[g], k));
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (int b = 0; b < 3 && !changed; ++b) {
            const auto v = K.basis()[b];
            Mat2 X = make_mat(v[0], v[1], v[2], -v[0], k);
            for (size_t g = 0; g < gk.size(); ++g) {
                Mat2 Y = mul_fast(mul_fast(gk[g], X), gk_inv[g]);
                if (K.insert({Y.a, Y.b, Y.c})) {
                    changed = true;
                    break;
                }
            }
        }
    }
    return out;
}

IndexCertificate profinite_index(const GroupTable& G_N) {
    const u32 N = G_N.modulus();
    IndexCertificate cert;
    cert.N = N;
    if (N == 1) {
        cert.M = 1;
        cert.index = 1;
        cert.n = 2;
        cert.chain.push_back({1, 1, true});
        return cert;
    }
    const u32 r = radical(N);
    LayeredCommutator lc = layered_commutator(G_N, N);
    const u64 base_index = order_sl2(N) / lc.base_order;
    if (order_sl2(N) % lc.base_order != 0) throw std::logic_error("commutator order does not divide");
    auto index_at = [&](u64 m) {
        const u64 km = lc.kernel.reduce(static_cast<i64>(m)).order();
        return base_index * m * m * m / km;
    };
    std::vector<u64> ms;
    for (u64 m = 1; N % m == 0; m *= r) ms.push_back(m);
    if (ms.back() != N) ms.push_back(N);
    for (u64 m : ms) {
        ChainStep step;
        step.M = u64(N) * m;
        step.index = index_at(m);
        if (m == N) {
            step.certifies = true;
        } else if (N % (r * m) == 0) {
            Lattice3 km = lc.kernel.reduce(static_cast<i64>(r * m));
            bool all = true;
            for (int j = 0; j < 3; ++j) {
                Lattice3::Vec e{0, 0, 0};
                e[j] = static_cast<i64>(m);
                if (!km.contains(e)) all = false;
            }
            step.certifies = all;
        }
        cert.chain.push_back(step);
    }
    const u64 stable = cert.chain.back().index;
    bool found = false;
    for (size_t i = 0; i < cert.chain.size(); ++i) {
        const auto& s = cert.chain[i];
        if (i > 0 && s.index < cert.chain[i - 1].index)
            throw std::logic_error("commutator index decreased along the chain");
        if (s.certifies && s.index != stable)
            throw std::logic_error("certifying levels disagree on the index");
        if (s.certifies && !found) {
            found = true;
            cert.M = s.M;
            cert.index = s.index;
        }
    }
    cert.n = scr_value(cert);
    return cert;
}

u64 scr_value(const IndexCertificate& cert) { return cert.index * 2 / gcd(2, cert.N); }

}  // namespace gl2
