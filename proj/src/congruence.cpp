#include "gl2/congruence.hpp"

#include <fstream>
#include <sstream>

#include "gl2/errors.hpp"

namespace gl2 {

namespace {

[[noreturn]] void fail(const std::string& source, size_t line, const std::string& what) {
    throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<CongruenceRecord> parse_classification_text(const std::string& text,
                                                        const std::string& source) {
    std::vector<CongruenceRecord> out;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    int header_genus = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("# genus", 0) == 0) {
            std::istringstream hs(line.substr(7));
            if (!(hs >> header_genus)) fail(source, lineno, "bad genus header");
            continue;
        }
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        CongruenceRecord rec;
        if (!(ls >> rec.label)) continue;
        i64 level, index, genus, count;
        if (!(ls >> level >> index >> genus >> count)) fail(source, lineno, "truncated record");
        if (level < 1 || level > 65535 || index < 1 || count < 0)
            fail(source, lineno, "field out of range");
        if (genus != 0 && genus != 1) fail(source, lineno, "genus must be 0 or 1");
        if (header_genus >= 0 && genus != header_genus)
            fail(source, lineno, "record genus differs from file header");
        rec.level = static_cast<u32>(level);
        rec.index = static_cast<u32>(index);
        rec.genus = static_cast<int>(genus);
        for (i64 k = 0; k < count; ++k) {
            i64 a, b, c, d;
            if (!(ls >> a >> b >> c >> d)) fail(source, lineno, "truncated generator list");
            Mat2 m = make_mat(a, b, c, d, rec.level);
            if (det(m) != 1 % rec.level)
                fail(source, lineno, "generator of " + rec.label + " is not in SL2");
            rec.gens.push_back(m);
        }
        std::string extra;
        if (ls >> extra) fail(source, lineno, "trailing data");
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<CongruenceRecord> parse_classification(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_classification_text(ss.str(), path);
}

std::string format_record(const CongruenceRecord& rec) {
    std::ostringstream os;
    os << rec.label << ' ' << rec.level << ' ' << rec.index << ' ' << rec.genus << ' '
       << rec.gens.size();
    for (const Mat2& g : rec.gens) os << ' ' << g.a << ' ' << g.b << ' ' << g.c << ' ' << g.d;
    return os.str();
}

Invariants invariants(const GroupTable& H) {
    const u32 n = H.modulus();
    if (!H.contains(scalar(-1, n))) throw std::invalid_argument("invariants: -I not in H");
    CosetSpace cs(H, Ambient::SL2);
    Invariants inv{};
    inv.mu = static_cast<u32>(cs.size());
    inv.e2 = static_cast<u32>(fixed_cosets(cs, mat_S(n)));
    inv.e3 = static_cast<u32>(fixed_cosets(cs, mul(mat_S(n), mat_T(n))));
    inv.einf = static_cast<u32>(double_cosets(cs, {mat_T(n)}, {}).total);
    const i64 twelve_g = 12 + i64(inv.mu) - 3 * i64(inv.e2) - 4 * i64(inv.e3) - 6 * i64(inv.einf);
    if (twelve_g % 12 != 0 || twelve_g < 0)
        throw std::logic_error("invariants: genus formula is not a non-negative integer");
    inv.genus = static_cast<int>(twelve_g / 12);
    return inv;
}

CongruenceSubgroup build_subgroup(const CongruenceRecord& rec) {
    CongruenceSubgroup cs;
    cs.record = rec;
    cs.level = rec.level;
    std::vector<Mat2> gens = rec.gens;
    gens.push_back(scalar(-1, rec.level));
    cs.H = close_gens(rec.level, gens, Ambient::SL2);
    Invariants inv = invariants(cs.H);
    if (inv.mu != rec.index)
        throw DataError("index mismatch for " + rec.label + ": file " + std::to_string(rec.index) +
                        ", computed " + std::to_string(inv.mu));
    if (inv.genus != rec.genus)
        throw DataError("genus mismatch for " + rec.label + ": file " + std::to_string(rec.genus) +
                        ", computed " + std::to_string(inv.genus));
    cs.mu = inv.mu;
    cs.e2 = inv.e2;
    cs.e3 = inv.e3;
    cs.einf = inv.einf;
    cs.genus = inv.genus;
    return cs;
}

}  // namespace gl2
