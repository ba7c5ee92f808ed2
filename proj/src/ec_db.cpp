#include "gl2/ec_db.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gl2/errors.hpp"

namespace gl2 {

namespace {

i64 smod(i64 x, i64 p) { return ((x % p) + p) % p; }
i64 mm(i64 a, i64 b, i64 p) { return static_cast<i64>((__int128)a * b % p); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

bool good_reduction(const CurveRecord& E, u64 up) {
    const i64 p = static_cast<i64>(up);
    const i64 a1 = smod(E.ainv[0], p), a2 = smod(E.ainv[1], p), a3 = smod(E.ainv[2], p),
              a4 = smod(E.ainv[3], p), a6 = smod(E.ainv[4], p);
    const i64 b2 = smod(mm(a1, a1, p) + 4 * a2, p);
    const i64 b4 = smod(2 * a4 + mm(a1, a3, p), p);
    const i64 b6 = smod(mm(a3, a3, p) + 4 * a6, p);
    const i64 b8 = smod(mm(mm(a1, a1, p), a6, p) + 4 * mm(a2, a6, p) - mm(mm(a1, a3, p), a4, p) +
                            mm(a2, mm(a3, a3, p), p) - mm(a4, a4, p),
                        p);
    i64 d = -mm(mm(b2, b2, p), b8, p) - 8 * mm(mm(b4, b4, p), b4, p) - 27 * mm(b6, b6, p) +
            9 * mm(mm(b2, b4, p), b6, p);
    return smod(d, p) != 0;
}

i64 curve_ap(const CurveRecord& E, u64 up) {
    if (up < 3 || !is_prime(up)) throw std::invalid_argument("curve_ap: p must be an odd prime");
    if (!good_reduction(E, up)) throw std::invalid_argument("curve_ap: bad reduction at " + std::to_string(up));
    const i64 p = static_cast<i64>(up);
    const i64 a1 = smod(E.ainv[0], p), a2 = smod(E.ainv[1], p), a3 = smod(E.ainv[2], p),
              a4 = smod(E.ainv[3], p), a6 = smod(E.ainv[4], p);
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (i64 x = 1; x < p; ++x) chi[x * x % p] = 1;
    // #{y : y^2 + (a1 x + a3) y = x^3 + a2 x^2 + a4 x + a6} = 1 + chi(disc in y)
    i64 s = 0;
    for (i64 x = 0; x < p; ++x) {
        i64 l = (a1 * x + a3) % p;
        i64 r = ((x * x % p * x) + a2 * (x * x % p) + a4 * x + a6) % p;
        s += chi[(l * l + 4 * r) % p];
    }
    return -s;
}

CurveStore CurveStore::parse_text(const std::string& text, const std::string& source) {
    CurveStore st;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    std::map<std::string, size_t> labels;
    auto fail = [&](const std::string& msg) {
        throw DataError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        CurveRecord r;
        std::string ainv;
        if (!(ls >> r.conductor >> r.cls >> r.number >> ainv >> r.rank >> r.torsion)) fail("malformed line");
        std::string extra;
        if (ls >> extra) fail("trailing fields");
        if (r.conductor == 0 || r.number < 1 || r.rank < 0 || r.torsion < 1) fail("field out of range");
        if (!std::all_of(r.cls.begin(), r.cls.end(), [](char c) { return c >= 'a' && c <= 'z'; }))
            fail("bad class letters");
        if (ainv.size() < 2 || ainv.front() != '[' || ainv.back() != ']') fail("bad a-invariants");
        std::replace(ainv.begin(), ainv.end(), ',', ' ');
        std::istringstream as(ainv.substr(1, ainv.size() - 2));
        for (auto& a : r.ainv)
            if (!(as >> a)) fail("bad a-invariants");
        if (as >> extra) fail("bad a-invariants");
        if (!labels.emplace(r.label(), lineno).second) fail("duplicate label " + r.label());
        // Primes of bad reduction must divide the conductor; check the small ones.
        for (u64 p : {5, 7, 11, 13, 17, 19, 23})
            if (r.conductor % p != 0 && !good_reduction(r, p)) fail("bad reduction at " + std::to_string(p) + " outside conductor");
        st.records_.push_back(r);
    }
    st.index();
    if (!st.records_.empty()) {
        for (const auto& r : st.records_) st.max_conductor_ = std::max(st.max_conductor_, r.conductor);
    }
    return st;
}

CurveStore CurveStore::parse_files(const std::vector<std::string>& paths) {
    std::string text;
    for (const auto& p : paths) {
        std::string t = read_file(p);
        if (!t.empty() && t.back() != '\n') t += '\n';
        text += t;
    }
    return parse_text(text, paths.size() == 1 ? paths[0] : "<files>");
}

CurveStore CurveStore::load_dir(const std::string& dir) {
    CurveStore st = parse_text(read_file(dir + "/allcurves.txt"), dir + "/allcurves.txt");
    std::ifstream man(dir + "/manifest.txt");
    if (man) {
        std::string line, key;
        u64 maxc = st.max_conductor_;
        std::vector<u64> primes;
        while (std::getline(man, line)) {
            std::istringstream ls(line);
            ls >> key;
            if (key == "max_conductor") {
                ls >> maxc;
            } else if (key == "primes") {
                u64 p;
                while (ls >> p) primes.push_back(p);
            }
        }
        st.set_coverage(maxc, primes);
    }
    return st;
}

void CurveStore::set_coverage(u64 max_conductor, std::vector<u64> primes) {
    max_conductor_ = max_conductor;
    primes_ = std::move(primes);
}

bool CurveStore::covers(u64 conductor) const {
    if (conductor > max_conductor_) return false;
    if (primes_.empty()) return true;
    for (u64 p : primes_)
        while (conductor % p == 0) conductor /= p;
    return conductor == 1;
}

void CurveStore::index() {
    reps_.clear();
    by_class_.clear();
    for (size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (r.number != 1) continue;
        by_class_[r.class_label()] = i;
        reps_.push_back(&records_[i]);
    }
}

const CurveRecord* CurveStore::find_class(const std::string& class_label) const {
    auto it = by_class_.find(class_label);
    return it == by_class_.end() ? nullptr : &records_[it->second];
}

int CurveStore::rank_of(const std::string& class_label) const {
    const CurveRecord* r = find_class(class_label);
    if (!r) throw std::invalid_argument("unknown isogeny class " + class_label);
    return r->rank;
}

std::string CurveStore::serialize() const {
    std::ostringstream out;
    for (const auto& r : records_) {
        out << r.conductor << ' ' << r.cls << ' ' << r.number << " [";
        for (size_t k = 0; k < 5; ++k) out << (k ? "," : "") << r.ainv[k];
        out << "] " << r.rank << ' ' << r.torsion << '\n';
    }
    return out.str();
}

u64 conductor_bound(u32 N) {
    u64 b = 1;
    for (const auto& pp : factor(N)) {
        u32 e = pp.p == 2 ? 8 : pp.p == 3 ? 5 : 2;
        for (u32 i = 0; i < e; ++i) b *= pp.p;
    }
    return b;
}

std::vector<const CurveRecord*> candidates_for(const CurveStore& store, u32 N) {
    const u64 bound = conductor_bound(N);
    if (N > 1 && !store.covers(bound))
        throw DataError("curve store does not cover conductor bound " + std::to_string(bound) + " for N = " +
                        std::to_string(N));
    std::vector<const CurveRecord*> out;
    if (N == 1) return out;
    for (const CurveRecord* r : store.representatives())
        if (bound % r->conductor == 0) out.push_back(r);
    return out;
}

const char* to_string(JacobianMatch::Status s) {
    switch (s) {
        case JacobianMatch::Status::Matched: return "matched";
        case JacobianMatch::Status::Ambiguous: return "ambiguous";
        case JacobianMatch::Status::Eliminated: return "eliminated";
    }
    return "?";
}

std::vector<u64> probe_primes(u32 N, size_t count) {
    std::vector<u64> out;
    for (u64 p = 5; out.size() < count; ++p)
        if (admissible_prime(p, N)) out.push_back(p);
    return out;
}

JacobianMatch match_jacobian(const PointCounter& J, u32 N, const CurveStore& store, const MatchOptions& opt) {
    JacobianMatch m;
    auto alive = candidates_for(store, N);
    std::vector<u64> order = opt.probe_order;
    if (order.empty()) order = probe_primes(N, opt.prime_budget + opt.confirmations);
    std::map<u64, i64> traces;
    auto trace = [&](u64 p) {
        auto it = traces.find(p);
        if (it != traces.end()) return it->second;
        i64 a = J.ap(p);
        traces.emplace(p, a);
        m.traces.emplace_back(p, a);
        return a;
    };
    size_t pos = 0;
    while (alive.size() > 1 && pos < order.size() && m.primes_used < opt.prime_budget) {
        const u64 p = order[pos++];
        const i64 a = trace(p);
        ++m.primes_used;
        std::vector<const CurveRecord*> next;
        for (const CurveRecord* r : alive)
            if (curve_ap(*r, p) == a) next.push_back(r);
        alive.swap(next);
    }
    for (const CurveRecord* r : alive) m.survivors.push_back(r->class_label());
    if (alive.empty()) {
        m.status = JacobianMatch::Status::Eliminated;
        return m;
    }
    if (alive.size() > 1) {
        m.status = JacobianMatch::Status::Ambiguous;
        return m;
    }
    const CurveRecord* hit = alive.front();
    m.confirmed = true;
    size_t done = 0;
    for (size_t k = pos; k < order.size() && done < opt.confirmations; ++k, ++done)
        if (curve_ap(*hit, order[k]) != trace(order[k])) m.confirmed = false;
    if (done < opt.confirmations) {
        for (u64 p : probe_primes(N, pos + opt.confirmations + 64)) {
            if (done >= opt.confirmations) break;
            if (traces.count(p)) continue;
            if (curve_ap(*hit, p) != trace(p)) m.confirmed = false;
            ++done;
        }
    }
    if (!m.confirmed) {
        m.status = JacobianMatch::Status::Eliminated;
        return m;
    }
    m.status = JacobianMatch::Status::Matched;
    m.class_label = hit->class_label();
    m.rank = hit->rank;
    return m;
}

}  // namespace gl2
