#include "gl2/group.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gl2 {

namespace {

inline u64 mix(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

u64 code_space(u32 n) {
    u64 n2 = u64(n) * n;
    return n2 * n2;
}

Mat2 conj(const Mat2& x, const Mat2& y, const Mat2& x_inv) {
    return mul_fast(mul_fast(x, y), x_inv);
}

}  // namespace

CodeSet::CodeSet(u32 n, size_t expected) : use_bits_(code_space(n) <= kBitTableBudget) {
    if (use_bits_) {
        bits_.assign((code_space(n) + 63) / 64, 0);
    } else {
        size_t cap = 16;
        while (cap < expected * 2) cap <<= 1;
        slots_.assign(cap, 0);
    }
}

bool CodeSet::contains(Code c) const {
    if (use_bits_) return (bits_[c >> 6] >> (c & 63)) & 1;
    const size_t mask = slots_.size() - 1;
    for (size_t i = mix(c) & mask;; i = (i + 1) & mask) {
        if (slots_[i] == 0) return false;
        if (slots_[i] == c + 1) return true;
    }
}

bool CodeSet::insert(Code c) {
    if (use_bits_) {
        u64& w = bits_[c >> 6];
        const u64 bit = u64(1) << (c & 63);
        if (w & bit) return false;
        w |= bit;
        ++count_;
        return true;
    }
    if ((count_ + 1) * 2 > slots_.size()) grow();
    const size_t mask = slots_.size() - 1;
    for (size_t i = mix(c) & mask;; i = (i + 1) & mask) {
        if (slots_[i] == 0) {
            slots_[i] = c + 1;
            ++count_;
            return true;
        }
        if (slots_[i] == c + 1) return false;
    }
}

void CodeSet::grow() {
    std::vector<Code> old;
    old.swap(slots_);
    slots_.assign(old.size() * 2, 0);
    const size_t mask = slots_.size() - 1;
    for (Code s : old) {
        if (!s) continue;
        size_t i = mix(s - 1) & mask;
        while (slots_[i]) i = (i + 1) & mask;
        slots_[i] = s;
    }
}

bool GroupTable::contains_code(Code c) const {
    if (c >= code_space(data_->n)) return false;
    return data_->members.contains(c);
}

bool GroupTable::contains_group(const GroupTable& other) const {
    if (other.modulus() != modulus()) return false;
    for (const Mat2& g : other.gens().gens)
        if (!contains(g)) return false;
    return true;
}

bool GroupTable::operator==(const GroupTable& o) const {
    return modulus() == o.modulus() && elements() == o.elements();
}

ClosureBuilder::ClosureBuilder(u32 n, Ambient ambient) : n_(n), ambient_(ambient), set_(n) {
    Mat2 id = identity(n);
    elems_.push_back(id);
    set_.insert(encode(id));
}

bool ClosureBuilder::add_generator(const Mat2& g) {
    if (g.n != n_) throw std::invalid_argument("generator modulus mismatch");
    if (!is_unit_det(g)) throw std::invalid_argument("generator is not invertible");
    if (ambient_ == Ambient::SL2 && det(g) != 1 % n_)
        throw std::invalid_argument("generator is not in SL2");
    if (set_.contains(encode(g))) {
        gens_.push_back(g);
        return false;
    }
    const size_t old = elems_.size();
    gens_.push_back(g);
    for (size_t i = 0; i < elems_.size(); ++i) {
        const Mat2 x = elems_[i];
        if (i < old) {
            Mat2 y = mul_fast(x, g);
            if (set_.insert(encode(y))) elems_.push_back(y);
        } else {
            for (const Mat2& h : gens_) {
                Mat2 y = mul_fast(x, h);
                if (set_.insert(encode(y))) elems_.push_back(y);
            }
        }
    }
    return true;
}

GroupTable ClosureBuilder::finish() const {
    auto data = std::make_shared<GroupTable::Data>();
    data->n = n_;
    data->gens = GenSet{n_, gens_, ambient_};
    data->elements.reserve(elems_.size());
    for (const Mat2& x : elems_) data->elements.push_back(encode(x));
    std::sort(data->elements.begin(), data->elements.end());
    data->members = CodeSet(n_, elems_.size());
    for (Code c : data->elements) data->members.insert(c);
    GroupTable t;
    t.data_ = std::move(data);
    return t;
}

GroupTable close(const GenSet& g) {
    ClosureBuilder b(g.n, g.ambient);
    for (const Mat2& x : g.gens) b.add_generator(x);
    return b.finish();
}

GroupTable close_gens(u32 n, const std::vector<Mat2>& gens, Ambient ambient) {
    return close(GenSet{n, gens, ambient});
}

GroupTable full_group(u32 n, Ambient ambient) {
    return close_gens(n, ambient == Ambient::SL2 ? sl2_gens(n) : gl2_gens(n), ambient);
}

namespace {

// Embeds a matrix mod q (a prime-power factor of n) into GL2(Z/n) with identity elsewhere.
Mat2 embed_component(const Mat2& x, u32 n) {
    const u32 q = x.n;
    const u32 rest = n / q;
    if (rest == 1) return x;
    return crt_join({x, identity(rest)});
}

}  // namespace

GenSet kernel_gens(u32 n, u32 m, Ambient ambient) {
    if (m == 0 || n % m != 0) throw std::invalid_argument("kernel_gens: m does not divide n");
    GenSet out{n, {}, ambient};
    if (m == n) return out;
    for (const auto& pp : factor(n)) {
        const u32 q = pp.q;
        const u32 mq = static_cast<u32>(gcd(m, q));
        if (mq == q) continue;
        std::vector<Mat2> local;
        if (mq == 1) {
            local = ambient == Ambient::SL2 ? sl2_gens(q) : gl2_gens(q);
        } else {
            local.push_back(make_mat(1, mq, 0, 1, q));
            local.push_back(make_mat(1, 0, mq, 1, q));
            for (u32 u : unit_kernel_gens(q, mq)) {
                if (ambient == Ambient::SL2) {
                    local.push_back(make_mat(u, 0, 0, inv_mod(u, q), q));
                } else {
                    local.push_back(make_mat(u, 0, 0, 1, q));
                    local.push_back(make_mat(1, 0, 0, u, q));
                }
            }
        }
        for (const Mat2& x : local) out.gens.push_back(embed_component(x, n));
    }
    return out;
}

Mat2 lift(const Mat2& x, u32 n, bool sl2) {
    const u32 m = x.n;
    if (n % m != 0) throw std::invalid_argument("lift: modulus does not divide target");
    u32 n1 = 1;
    for (const auto& pp : factor(n))
        if (m % pp.p == 0) n1 *= pp.q;
    const u32 n2 = n / n1;
    Mat2 y = Mat2{n1, x.a, x.b, x.c, x.d};
    if (n2 > 1) y = crt_join({y, identity(n2)});
    if (sl2) {
        if (det(x) != 1 % m) throw std::invalid_argument("lift: determinant is not 1");
        y = mul_fast(y, make_mat(1, 0, 0, inv_mod(det(y), n), n));
    }
    return y;
}

GroupTable preimage(const GroupTable& g, u32 n) {
    const u32 m = g.modulus();
    if (n % m != 0) throw std::invalid_argument("preimage: modulus does not divide target");
    const Ambient amb = g.gens().ambient;
    GenSet gs = kernel_gens(n, m, amb);
    for (const Mat2& x : g.gens().gens) gs.gens.push_back(lift(x, n, amb == Ambient::SL2));
    return close(gs);
}

GroupTable image_mod(const GroupTable& g, u32 m) {
    GenSet gs{m, {}, g.gens().ambient};
    for (const Mat2& x : g.gens().gens) gs.gens.push_back(reduce_mod(x, m));
    return close(gs);
}

bool normalizes(const Mat2& x, const GroupTable& h) {
    const Mat2 xi = inv(x);
    for (const Mat2& g : h.gens().gens)
        if (!h.contains(conj(x, g, xi))) return false;
    return true;
}

CosetSpace::CosetSpace(const GroupTable& base, Ambient ambient) : base_(base) {
    const u32 n = base.modulus();
    if (ambient == Ambient::SL2)
        for (const Mat2& g : base.gens().gens)
            if (det(g) != 1 % n) throw std::invalid_argument("coset_space: base not in SL2");
    build(ambient == Ambient::SL2 ? sl2_gens(n) : gl2_gens(n));
}

CosetSpace::CosetSpace(const GroupTable& base, const std::vector<Mat2>& ambient_gens)
    : base_(base) {
    build(ambient_gens);
}

void CosetSpace::build(const std::vector<Mat2>& gens) {
    const Mat2 id = identity(base_.modulus());
    reps_.push_back(id);
    rep_invs_.push_back(id);
    for (size_t i = 0; i < reps_.size(); ++i) {
        for (const Mat2& s : gens) {
            Mat2 y = mul_fast(reps_[i], s);
            if (index_of(y) == npos) {
                reps_.push_back(y);
                rep_invs_.push_back(inv(y));
            }
        }
    }
}

size_t CosetSpace::index_of(const Mat2& x) const {
    for (size_t i = 0; i < reps_.size(); ++i)
        if (base_.contains(mul_fast(x, rep_invs_[i]))) return i;
    return npos;
}

std::vector<u32> CosetSpace::action(const Mat2& m) const {
    std::vector<u32> perm(reps_.size());
    for (size_t i = 0; i < reps_.size(); ++i) {
        size_t j = index_of(mul_fast(reps_[i], m));
        if (j == npos) throw std::invalid_argument("coset action: element outside ambient");
        perm[i] = static_cast<u32>(j);
    }
    return perm;
}

size_t fixed_cosets(const CosetSpace& cs, const Mat2& m) {
    size_t count = 0;
    for (size_t i = 0; i < cs.size(); ++i)
        if (cs.base().contains(conj(cs.rep(i), m, cs.rep_inverse(i)))) ++count;
    return count;
}

GroupTable normalizer(const GroupTable& h) {
    const u32 n = h.modulus();
    CosetSpace cs(h, Ambient::GL2);
    GenSet gs{n, h.gens().gens, Ambient::GL2};
    for (size_t i = 1; i < cs.size(); ++i)
        if (normalizes(cs.rep(i), h)) gs.gens.push_back(cs.rep(i));
    return close(gs);
}

QuotientGroup quotient(const GroupTable& ambient, const GroupTable& kernel) {
    if (!ambient.contains_group(kernel))
        throw std::invalid_argument("quotient: kernel not contained in ambient");
    for (const Mat2& g : ambient.gens().gens)
        if (!normalizes(g, kernel)) throw std::invalid_argument("quotient: kernel not normal");
    QuotientGroup q;
    q.ambient = ambient;
    q.kernel = kernel;
    CosetSpace cs(kernel, ambient.gens().gens);
    q.reps = cs.reps();
    const size_t k = q.reps.size();
    q.table.assign(k, std::vector<u32>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            q.table[i][j] = static_cast<u32>(cs.index_of(mul_fast(q.reps[i], q.reps[j])));
    q.inverse.assign(k, 0);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            if (q.table[i][j] == 0) q.inverse[i] = static_cast<u32>(j);
    const u32 n = ambient.modulus();
    for (const Mat2& r : q.reps) q.det_class.push_back(square_class(det(r), n));
    return q;
}

GroupTable commutator_subgroup(const GroupTable& g) {
    const u32 n = g.modulus();
    std::vector<Mat2> gens;
    std::vector<Mat2> invs;
    for (const Mat2& x : g.gens().gens) {
        gens.push_back(x);
        invs.push_back(inv(x));
    }
    ClosureBuilder b(n, Ambient::SL2);
    std::vector<Mat2> added;
    for (size_t i = 0; i < gens.size(); ++i)
        for (size_t j = i + 1; j < gens.size(); ++j) {
            Mat2 c = mul_fast(mul_fast(gens[i], gens[j]), mul_fast(invs[i], invs[j]));
            if (b.add_generator(c)) added.push_back(c);
        }
    for (size_t r = 0; r < added.size(); ++r) {
        for (size_t i = 0; i < gens.size(); ++i) {
            Mat2 c = conj(gens[i], added[r], invs[i]);
            if (b.add_generator(c)) added.push_back(c);
        }
    }
    return b.finish();
}

DoubleCosetCount double_cosets(const CosetSpace& cs, const std::vector<Mat2>& u_gens,
                               const std::vector<Mat2>& b_gens) {
    const size_t k = cs.size();
    std::vector<u32> parent(k);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](u32 x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Mat2& u : u_gens) {
        auto perm = cs.action(u);
        for (size_t i = 0; i < k; ++i) {
            u32 a = find(static_cast<u32>(i)), b = find(perm[i]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::vector<std::vector<u32>> b_perms;
    for (const Mat2& b : b_gens) b_perms.push_back(cs.action(b));
    DoubleCosetCount out;
    for (size_t i = 0; i < k; ++i) {
        if (find(static_cast<u32>(i)) != i) continue;
        ++out.total;
        bool stable = true;
        for (const auto& perm : b_perms)
            if (find(perm[i]) != i) stable = false;
        if (stable) ++out.fixed;
    }
    return out;
}

DoubleCosetCount double_cosets(const GroupTable& g, const GroupTable& u, const GroupTable& b) {
    for (const Mat2& x : b.gens().gens)
        if (!normalizes(x, u)) throw std::invalid_argument("double_cosets: b does not normalize u");
    CosetSpace cs(g, Ambient::GL2);
    return double_cosets(cs, u.gens().gens, b.gens().gens);
}

std::vector<Code> conjugation_orbit(const Mat2& x, const std::vector<Mat2>& gens) {
    CodeSet seen(x.n);
    std::vector<Mat2> orbit{x};
    seen.insert(encode(x));
    std::vector<Mat2> invs;
    for (const Mat2& g : gens) invs.push_back(inv(g));
    for (size_t i = 0; i < orbit.size(); ++i)
        for (size_t j = 0; j < gens.size(); ++j) {
            Mat2 y = conj(gens[j], orbit[i], invs[j]);
            if (seen.insert(encode(y))) orbit.push_back(y);
        }
    std::vector<Code> out;
    for (const Mat2& y : orbit) out.push_back(encode(y));
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Mat2> find_conjugator(const GroupTable& a, const GroupTable& b) {
    const u32 n = a.modulus();
    if (b.modulus() != n || a.order() != b.order()) return std::nullopt;
    const u64 total = code_space(n);
    for (Code c = 0; c < total; ++c) {
        Mat2 y = decode(c, n);
        if (!is_unit_det(y)) continue;
        const Mat2 yi = inv(y);
        bool ok = true;
        for (const Mat2& g : a.gens().gens)
            if (!b.contains(conj(y, g, yi))) { ok = false; break; }
        if (ok) return y;
    }
    return std::nullopt;
}

}  // namespace gl2

namespace gl2 {

GroupTable borel(u32 n) {
    std::vector<Mat2> gens{mat_T(n)};
    for (u32 u : unit_kernel_gens(n, 1)) {
        gens.push_back(make_mat(u, 0, 0, 1, n));
        gens.push_back(make_mat(1, 0, 0, u, n));
    }
    return close_gens(n, gens);
}

GroupTable split_cartan_normalizer(u32 p) {
    std::vector<Mat2> gens{make_mat(0, 1, 1, 0, p)};
    for (u32 u : unit_kernel_gens(p, 1)) {
        gens.push_back(make_mat(u, 0, 0, 1, p));
        gens.push_back(make_mat(1, 0, 0, u, p));
    }
    return close_gens(p, gens);
}

namespace {

u32 least_nonsquare(u32 p) {
    for (u32 d = 2; d < p; ++d)
        if (legendre(d, p) == -1) return d;
    throw std::invalid_argument("no nonsquare modulo p");
}

}  // namespace

GroupTable nonsplit_cartan(u32 p) {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("nonsplit_cartan: odd prime expected");
    const u32 d = least_nonsquare(p);
    const u64 target = u64(p) * p - 1;
    for (u32 a = 0; a < p; ++a)
        for (u32 b = 1; b < p; ++b) {
            Mat2 x = make_mat(a, i64(b) * d, b, a, p);
            GroupTable c = close_gens(p, {x});
            if (c.order() == target) return c;
        }
    throw std::logic_error("nonsplit_cartan: no generator found");
}

GroupTable nonsplit_cartan_normalizer(u32 p) {
    GroupTable c = nonsplit_cartan(p);
    std::vector<Mat2> gens = c.gens().gens;
    gens.push_back(make_mat(1, 0, 0, -1, p));
    return close_gens(p, gens);
}

GroupTable crt_product(const std::vector<GroupTable>& parts) {
    u32 n = 1;
    for (const auto& g : parts) n *= g.modulus();
    std::vector<Mat2> gens;
    for (size_t i = 0; i < parts.size(); ++i) {
        for (const Mat2& x : parts[i].gens().gens) {
            std::vector<Mat2> comps;
            for (size_t j = 0; j < parts.size(); ++j)
                comps.push_back(i == j ? x : identity(parts[j].modulus()));
            gens.push_back(crt_join(comps));
        }
    }
    return close_gens(n, gens);
}

}  // namespace gl2
