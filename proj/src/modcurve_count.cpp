#include "gl2/modcurve_count.hpp"

#include <mutex>
#include <stdexcept>
#include <string>

#include "gl2/classpoly.hpp"

namespace gl2 {

namespace {

u64 mulm(u64 a, u64 b, u64 p) { return static_cast<u64>((unsigned __int128)a * b % p); }
u64 addm(u64 a, u64 b, u64 p) { return (a + b) % p; }

// chi[x] = Legendre symbol (x / p).
std::vector<signed char> quadratic_character(u64 p) {
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (u64 x = 1; x < p; ++x) chi[mulm(x, x, p)] = 1;
    return chi;
}

i64 trace_with_table(const ShortCurve& E, const std::vector<signed char>& chi) {
    const u64 p = E.p;
    i64 s = 0;
    for (u64 x = 0; x < p; ++x) {
        u64 f = addm(addm(mulm(mulm(x, x, p), x, p), mulm(E.A, x, p), p), E.B, p);
        s += chi[f];
    }
    return -s;
}

void check_curve(const ShortCurve& E) {
    if (E.p < 5 || !is_prime(E.p)) throw std::invalid_argument("curve over F_p needs a prime p >= 5");
    if (is_singular(E)) throw std::invalid_argument("singular curve");
}

}  // namespace

bool is_singular(const ShortCurve& E) {
    const u64 p = E.p;
    u64 a3 = mulm(mulm(E.A % p, E.A % p, p), E.A % p, p);
    u64 d = addm(mulm(4, a3, p), mulm(27, mulm(E.B % p, E.B % p, p), p), p);
    return d == 0;
}

u64 j_invariant(const ShortCurve& E) {
    const u64 p = E.p;
    u64 a3 = mulm(4, mulm(mulm(E.A % p, E.A % p, p), E.A % p, p), p);
    u64 d = addm(a3, mulm(27, mulm(E.B % p, E.B % p, p), p), p);
    if (d == 0) throw std::invalid_argument("singular curve");
    return mulm(mulm(1728 % p, a3, p), inv_mod(static_cast<i64>(d), static_cast<u32>(p)), p);
}

ShortCurve curve_with_j(u64 j, u64 p) {
    j %= p;
    if (j == 0) return {p, 0, 1};
    if (j == 1728 % p) return {p, 1, 0};
    u64 k = (1728 % p + p - j) % p;
    return {p, mulm(3, mulm(j, k, p), p), mulm(2, mulm(j, mulm(k, k, p), p), p)};
}

i64 trace_of_frobenius(const ShortCurve& E) {
    check_curve(E);
    i64 s = 0;
    for (u64 x = 0; x < E.p; ++x) {
        const u64 p = E.p;
        u64 f = addm(addm(mulm(mulm(x, x, p), x, p), mulm(E.A, x, p), p), E.B, p);
        s += legendre(static_cast<i64>(f), p);
    }
    return -s;
}

FrobeniusData frobenius_from_trace(u64 p, u64 j, i64 a) {
    FrobeniusData fd;
    fd.p = p;
    fd.j = j % p;
    fd.a = a;
    fd.disc = a * a - 4 * static_cast<i64>(p);
    if (fd.disc >= 0) throw std::logic_error("frobenius_matrix: trace violates the Hasse bound");
    const i64 disc = fd.disc;
    auto& cache = ClassPolyCache::global();
    for (i64 b = isqrt(-disc); b >= 1; --b) {
        if (disc % (b * b) != 0) continue;
        const i64 D = disc / (b * b);
        if (!is_discriminant(D)) continue;
        if (eval_mod(*cache.get(D), fd.j, p) != 0) continue;
        fd.b = b;
        const i64 db = disc / b;
        if ((a - db) % 2 != 0 || (db * (1 - D)) % 4 != 0)
            throw std::logic_error("frobenius_matrix: non-integral matrix");
        fd.phi = {(a - db) / 2, db * (1 - D) / 4, b, (a + db) / 2};
        return fd;
    }
    throw std::logic_error("frobenius_matrix: no b certifies for p = " + std::to_string(p) +
                           ", j = " + std::to_string(j));
}

FrobeniusData frobenius_matrix(const ShortCurve& E) {
    check_curve(E);
    return frobenius_from_trace(E.p, j_invariant(E), trace_of_frobenius(E));
}

bool admissible_prime(u64 p, u32 N) { return p >= 5 && is_prime(p) && N % p != 0; }

CMEmbedding cm_embedding(u64 j, u64 p, u32 N) {
    if (!admissible_prime(p, N)) throw std::invalid_argument("cm_embedding: p must be >= 5 and prime to N");
    j %= p;
    CMEmbedding e;
    e.j = j;
    e.p = p;
    const i64 ip = static_cast<i64>(p);
    if (j == 1728 % p) {
        // Z[i] on the basis {1, i}: mult(x + yi) = (x, -y; y, x), conjugation = diag(1, -1).
        e.aut_gen = make_mat(0, -1, 1, 0, N);
        e.ordinary = p % 4 == 1;
        if (e.ordinary) {
            const i64 a = trace_of_frobenius(curve_with_j(1728, p));
            const i64 x = a / 2, y2 = ip - x * x;
            const i64 y = isqrt(y2);
            if (a % 2 != 0 || y * y != y2) throw std::logic_error("cm_embedding: trace normalization failed");
            e.frob = make_mat(x, -y, y, x, N);
        } else {
            // Frobenius is semilinear: v -> c * conj(v) with c * conj(c) = -p.
            const i64 M = 12 * static_cast<i64>(N);
            std::vector<i64> root(M, -1);
            for (i64 y = 0; y < M; ++y)
                if (root[y * y % M] < 0) root[y * y % M] = y;
            for (i64 x = 0; x < M; ++x) {
                i64 need = ((-ip - x * x) % M + M) % M;
                if (root[need] < 0) continue;
                i64 y = root[need];
                e.frob = make_mat(x, y, y, -x, N);
                break;
            }
        }
    } else if (j == 0) {
        // Z[w] on the basis {1, w}: mult(x + yw) = (x, -y; y, x - y), conjugation = (1, -1; 0, -1).
        e.aut_gen = make_mat(0, 1, -1, 1, N);  // -w
        e.ordinary = p % 3 == 1;
        if (e.ordinary) {
            const i64 a = trace_of_frobenius(curve_with_j(0, p));
            const i64 lim = 2 * isqrt(ip) + 2;
            bool found = false;
            for (i64 y = -lim; y <= lim && !found; ++y) {
                if ((a + y) % 2 != 0) continue;
                const i64 x = (a + y) / 2;
                if (x * x - x * y + y * y == ip) {
                    e.frob = make_mat(x, -y, y, x - y, N);
                    found = true;
                }
            }
            if (!found) throw std::logic_error("cm_embedding: trace normalization failed");
        } else {
            const i64 M = 12 * static_cast<i64>(N);
            bool found = false;
            for (i64 x = 0; x < M && !found; ++x)
                for (i64 y = 0; y < M; ++y)
                    if (((x * x - x * y + y * y + ip) % M) == 0) {
                        // mult(x + yw) * conj
                        Mat2 m = make_mat(x, -y, y, x - y, N);
                        e.frob = mul(m, make_mat(1, -1, 0, -1, N));
                        found = true;
                        break;
                    }
            if (!found) throw std::logic_error("cm_embedding: no Frobenius of norm -p");
        }
    } else {
        throw std::invalid_argument("cm_embedding: j must be 0 or 1728");
    }
    if (det(e.frob) != mod(ip, N)) throw std::logic_error("cm_embedding: det(frob) != p");
    return e;
}

std::shared_ptr<const FiberTable> fiber_table(u64 p) {
    static std::mutex mu;
    static std::map<u64, std::shared_ptr<const FiberTable>> tables;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = tables.find(p);
        if (it != tables.end()) return it->second;
    }
    if (p < 5 || !is_prime(p)) throw std::invalid_argument("fiber_table: p must be a prime >= 5");
    auto t = std::make_shared<FiberTable>();
    t->p = p;
    const auto chi = quadratic_character(p);
    std::map<std::pair<i64, i64>, size_t> slot;
    for (u64 j = 1; j < p; ++j) {
        if (j == 1728 % p) continue;
        const i64 a = trace_with_table(curve_with_j(j, p), chi);
        FrobeniusData fd = frobenius_from_trace(p, j, a);
        auto key = std::make_pair(fd.a, fd.b);
        auto it = slot.find(key);
        if (it == slot.end()) {
            slot.emplace(key, t->generic.size());
            t->generic.push_back({fd, 1});
        } else {
            ++t->generic[it->second].multiplicity;
        }
    }
    std::lock_guard<std::mutex> lk(mu);
    auto [it, inserted] = tables.emplace(p, t);
    return it->second;
}

PointCounter::PointCounter(const GroupTable& G) : G_(G), cs_(G, Ambient::GL2), cusps_(G) {}

PointCounter::Breakdown PointCounter::breakdown(u64 p) const {
    const u32 N = G_.modulus();
    if (!admissible_prime(p, N))
        throw std::invalid_argument("point count needs a prime p >= 5 not dividing N, got " + std::to_string(p));
    Breakdown out;
    auto table = fiber_table(p);
    std::map<Code, size_t> seen;
    for (const auto& e : table->generic) {
        const auto& f = e.frob.phi;
        Mat2 m = make_mat(f[0], f[1], f[2], f[3], N);
        auto it = seen.find(encode(m));
        size_t fixed;
        if (it != seen.end()) {
            fixed = it->second;
        } else {
            fixed = fixed_cosets(cs_, m);
            seen.emplace(encode(m), fixed);
        }
        out.generic += fixed * e.multiplicity;
    }
    for (u64 j : {u64(0), u64(1728)}) {
        CMEmbedding cm = cm_embedding(j, p, N);
        u64 c = double_cosets(cs_, {cm.aut_gen}, {cm.frob}).fixed;
        (j == 0 ? out.j0 : out.j1728) = c;
    }
    out.cusps = cusps_.count(CuspField::Fp, static_cast<u32>(p));
    return out;
}

u64 PointCounter::count(u64 p) const {
    auto b = breakdown(p);
    return b.generic + b.j0 + b.j1728 + b.cusps;
}

u64 count_X_Fp(const GroupTable& G, u64 p) { return PointCounter(G).count(p); }
i64 ap_J(const GroupTable& G, u64 p) { return PointCounter(G).ap(p); }

}  // namespace gl2
