#include "gl2/classpoly.hpp"

#include <mpfr.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gl2/errors.hpp"

namespace gl2 {

bool is_discriminant(i64 D) {
    if (D >= 0) return false;
    i64 r = ((D % 4) + 4) % 4;
    return r == 0 || r == 1;
}

std::vector<QuadForm> reduced_forms(i64 D) {
    if (!is_discriminant(D)) throw std::invalid_argument("reduced_forms: invalid discriminant " + std::to_string(D));
    std::vector<QuadForm> out;
    const i64 absD = -D;
    for (i64 a = 1; 3 * a * a <= absD; ++a) {
        for (i64 b = -a + 1; b <= a; ++b) {
            if (((b - D) % 2) != 0) continue;
            i64 num = b * b - D;
            if (num % (4 * a) != 0) continue;
            i64 c = num / (4 * a);
            if (c < a) continue;
            if (c == a && b < 0) continue;
            if (gcd(gcd(a, b), c) != 1) continue;
            out.push_back({a, b, c});
        }
    }
    return out;
}

namespace {

constexpr mpfr_rnd_t RND = MPFR_RNDN;

struct Real {
    mpfr_t v;
    explicit Real(long prec) {
        mpfr_init2(v, prec);
        mpfr_set_ui(v, 0, RND);
    }
    ~Real() { mpfr_clear(v); }
    Real(const Real& o) {
        mpfr_init2(v, mpfr_get_prec(o.v));
        mpfr_set(v, o.v, RND);
    }
    Real& operator=(const Real&) = delete;
};

struct Complex {
    Real re, im;
    explicit Complex(long prec) : re(prec), im(prec) {}
};

// z = x * y; z may alias x or y.
void cmul(Complex& z, const Complex& x, const Complex& y, Real& t1, Real& t2) {
    mpfr_mul(t1.v, x.re.v, y.re.v, RND);
    mpfr_mul(t2.v, x.im.v, y.im.v, RND);
    mpfr_sub(t1.v, t1.v, t2.v, RND);  // real part
    mpfr_mul(t2.v, x.re.v, y.im.v, RND);
    mpfr_fma(t2.v, x.im.v, y.re.v, t2.v, RND);
    mpfr_set(z.re.v, t1.v, RND);
    mpfr_set(z.im.v, t2.v, RND);
}

// z = x / y
void cdiv(Complex& z, const Complex& x, const Complex& y, long prec) {
    Real n(prec), t(prec), re(prec), im(prec);
    mpfr_sqr(n.v, y.re.v, RND);
    mpfr_fma(n.v, y.im.v, y.im.v, n.v, RND);
    mpfr_mul(re.v, x.re.v, y.re.v, RND);
    mpfr_fma(re.v, x.im.v, y.im.v, re.v, RND);
    mpfr_mul(im.v, x.im.v, y.re.v, RND);
    mpfr_mul(t.v, x.re.v, y.im.v, RND);
    mpfr_sub(im.v, im.v, t.v, RND);
    mpfr_div(z.re.v, re.v, n.v, RND);
    mpfr_div(z.im.v, im.v, n.v, RND);
}

// j((-b + sqrt(D)) / 2a) via E4^3 / Delta.
Complex j_invariant(const QuadForm& f, i64 D, long prec) {
    Real pi(prec), r(prec), theta(prec);
    mpfr_const_pi(pi.v, RND);
    mpfr_sqrt_ui(r.v, static_cast<unsigned long>(-D), RND);
    mpfr_mul(r.v, r.v, pi.v, RND);
    mpfr_div_si(r.v, r.v, static_cast<long>(f.a), RND);  // -log|q|
    mpfr_mul_si(theta.v, pi.v, -f.b, RND);
    mpfr_div_si(theta.v, theta.v, static_cast<long>(f.a), RND);  // arg q

    Complex q(prec);
    {
        Real mod(prec);
        mpfr_neg(mod.v, r.v, RND);
        mpfr_exp(mod.v, mod.v, RND);
        mpfr_sin_cos(q.im.v, q.re.v, theta.v, RND);
        mpfr_mul(q.re.v, q.re.v, mod.v, RND);
        mpfr_mul(q.im.v, q.im.v, mod.v, RND);
    }

    // Terms until |q|^n < 2^-(prec + 16).
    double rate = mpfr_get_d(r.v, RND);
    long nmax = static_cast<long>(std::ceil((prec + 16) * std::log(2.0) / rate)) + 2;

    std::vector<Complex> pw;
    pw.reserve(nmax + 1);
    Real t1(prec), t2(prec);
    pw.emplace_back(prec);
    mpfr_set_ui(pw[0].re.v, 1, RND);
    for (long n = 1; n <= nmax; ++n) {
        pw.emplace_back(prec);
        cmul(pw[n], pw[n - 1], q, t1, t2);
    }

    // E4 = 1 + 240 sum sigma3(n) q^n
    std::vector<mpz_class> sigma3(nmax + 1, 0);
    for (long d = 1; d <= nmax; ++d) {
        mpz_class d3 = mpz_class(d) * d * d;
        for (long m = d; m <= nmax; m += d) sigma3[m] += d3;
    }
    Complex e4(prec);
    Real s(prec);
    for (long n = 1; n <= nmax; ++n) {
        mpfr_set_z(s.v, sigma3[n].get_mpz_t(), RND);
        mpfr_fma(e4.re.v, s.v, pw[n].re.v, e4.re.v, RND);
        mpfr_fma(e4.im.v, s.v, pw[n].im.v, e4.im.v, RND);
    }
    mpfr_mul_ui(e4.re.v, e4.re.v, 240, RND);
    mpfr_mul_ui(e4.im.v, e4.im.v, 240, RND);
    mpfr_add_ui(e4.re.v, e4.re.v, 1, RND);

    // prod (1 - q^n) by the pentagonal number theorem
    Complex eta(prec);
    mpfr_set_ui(eta.re.v, 1, RND);
    for (long k = 1;; ++k) {
        long e1 = k * (3 * k - 1) / 2;
        if (e1 > nmax) break;
        long e2 = k * (3 * k + 1) / 2;
        int sign = (k % 2) ? -1 : 1;
        for (long e : {e1, e2}) {
            if (e > nmax) continue;
            if (sign > 0) {
                mpfr_add(eta.re.v, eta.re.v, pw[e].re.v, RND);
                mpfr_add(eta.im.v, eta.im.v, pw[e].im.v, RND);
            } else {
                mpfr_sub(eta.re.v, eta.re.v, pw[e].re.v, RND);
                mpfr_sub(eta.im.v, eta.im.v, pw[e].im.v, RND);
            }
        }
    }

    // Delta = q * eta^24
    Complex delta(prec);
    {
        Complex e2(prec), e8(prec), e24(prec);
        cmul(e2, eta, eta, t1, t2);
        Complex e4p(prec);
        cmul(e4p, e2, e2, t1, t2);
        cmul(e8, e4p, e4p, t1, t2);
        Complex e16(prec);
        cmul(e16, e8, e8, t1, t2);
        cmul(e24, e16, e8, t1, t2);
        cmul(delta, e24, q, t1, t2);
    }
    Complex num(prec);
    cmul(num, e4, e4, t1, t2);
    cmul(num, num, e4, t1, t2);
    Complex j(prec);
    cdiv(j, num, delta, prec);
    return j;
}

}  // namespace

long classpoly_precision(i64 D) {
    if (!is_discriminant(D)) return 64;
    double s = 0;
    for (const auto& f : reduced_forms(D)) s += 1.0 / static_cast<double>(f.a);
    return 32 + static_cast<long>(std::ceil(M_PI * std::sqrt(static_cast<double>(-D)) * s / std::log(2.0)));
}

bool hilbert_poly_at(i64 D, long bits, ClassPolynomial& out) {
    out.D = D;
    out.coeffs.clear();
    if (!is_discriminant(D)) {
        out.coeffs.push_back(1);
        return true;
    }
    const auto forms = reduced_forms(D);
    const long prec = bits;
    // poly[k] holds the coefficient of x^k.
    std::vector<Complex> poly;
    poly.emplace_back(prec);
    mpfr_set_ui(poly[0].re.v, 1, RND);
    Real t1(prec), t2(prec);
    for (const auto& f : forms) {
        Complex j = j_invariant(f, D, prec);
        // poly *= (x - j)
        poly.emplace_back(prec);
        for (size_t k = poly.size() - 1; k > 0; --k) {
            Complex prod(prec);
            cmul(prod, poly[k], j, t1, t2);
            mpfr_sub(poly[k].re.v, poly[k - 1].re.v, prod.re.v, RND);
            mpfr_sub(poly[k].im.v, poly[k - 1].im.v, prod.im.v, RND);
        }
        Complex prod(prec);
        cmul(prod, poly[0], j, t1, t2);
        mpfr_neg(poly[0].re.v, prod.re.v, RND);
        mpfr_neg(poly[0].im.v, prod.im.v, RND);
    }
    Real rounded(prec), diff(prec);
    mpz_class z;
    for (auto& c : poly) {
        mpfr_rint(rounded.v, c.re.v, RND);
        mpfr_sub(diff.v, c.re.v, rounded.v, RND);
        if (std::fabs(mpfr_get_d(diff.v, RND)) > 1e-6) return false;
        if (std::fabs(mpfr_get_d(c.im.v, RND)) > 1e-6) return false;
        mpfr_get_z(z.get_mpz_t(), rounded.v, RND);
        out.coeffs.push_back(z);
    }
    return true;
}

ClassPolynomial hilbert_poly(i64 D) {
    ClassPolynomial P;
    long bits = classpoly_precision(D);
    for (int attempt = 0; attempt < 8; ++attempt, bits *= 2) {
        if (hilbert_poly_at(D, bits, P)) return P;
    }
    throw ResourceError("hilbert_poly: rounding failed for D = " + std::to_string(D));
}

u64 eval_mod(const ClassPolynomial& P, u64 j, u64 p) {
    u64 acc = 0;
    j %= p;
    for (size_t k = P.coeffs.size(); k-- > 0;) {
        u64 c = mpz_fdiv_ui(P.coeffs[k].get_mpz_t(), p);
        acc = static_cast<u64>((static_cast<unsigned __int128>(acc) * j + c) % p);
    }
    return acc;
}

std::shared_ptr<const ClassPolynomial> ClassPolyCache::get(i64 D) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = polys_.find(D);
        if (it != polys_.end()) return it->second;
    }
    // Computed outside the lock; concurrent computations of the same D agree.
    auto P = std::make_shared<const ClassPolynomial>(hilbert_poly(D));
    std::lock_guard<std::mutex> lk(mu_);
    polys_[D] = P;
    return P;
}

void ClassPolyCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    size_t lineno = 0;
    std::map<i64, std::shared_ptr<const ClassPolynomial>> loaded;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        ClassPolynomial P;
        std::string tok;
        if (!(ss >> P.D)) throw DataError(path + ":" + std::to_string(lineno) + ": bad discriminant");
        while (ss >> tok) {
            mpz_class z;
            if (z.set_str(tok, 10) != 0) throw DataError(path + ":" + std::to_string(lineno) + ": bad coefficient");
            P.coeffs.push_back(z);
        }
        if (P.coeffs.empty() || P.coeffs.back() != 1)
            throw DataError(path + ":" + std::to_string(lineno) + ": polynomial not monic");
        loaded[P.D] = std::make_shared<const ClassPolynomial>(std::move(P));
    }
    std::lock_guard<std::mutex> lk(mu_);
    for (auto& [D, P] : loaded) polys_.emplace(D, P);
}

void ClassPolyCache::save(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DataError("cannot write " + tmp);
        std::lock_guard<std::mutex> lk(mu_);
        for (auto it = polys_.rbegin(); it != polys_.rend(); ++it) {
            out << it->first;
            for (const auto& c : it->second->coeffs) out << ' ' << c.get_str();
            out << '\n';
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw DataError("cannot rename " + tmp);
}

size_t ClassPolyCache::size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return polys_.size();
}

ClassPolyCache& ClassPolyCache::global() {
    static ClassPolyCache cache;
    return cache;
}

}  // namespace gl2
