#include "gl2/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gl2/classpoly.hpp"
#include "gl2/errors.hpp"

namespace gl2 {

namespace fs = std::filesystem;

namespace {

constexpr const char* kModuleVersion = "gl2-pipeline/1";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& path, const std::string& data) {
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << data;
    }
    fs::rename(tmp, path);
}

// Runs fn(i) for i in [0, n) on `jobs` threads; rethrows the failure with the smallest i.
template <class F>
void run_parallel(size_t n, unsigned jobs, F fn) {
    std::atomic<size_t> next{0};
    std::mutex mu;
    std::exception_ptr first;
    size_t first_index = n;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (i < first_index) {
                    first_index = i;
                    first = std::current_exception();
                }
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<size_t>(n, 1))));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

Json set_json(const std::set<u64>& s) { return Json(std::vector<u64>(s.begin(), s.end())); }

Json mat_json(const Mat2& m) { return Json::array({Json::array({m.a, m.b}), Json::array({m.c, m.d})}); }

}  // namespace

namespace expected {
const std::set<u64>& i0() {
    static const std::set<u64> s = {2,   4,   6,   8,   10,  12,  16,  20,  24,   30,   32,   36,
                                    40,  48,  54,  60,  72,  84,  96,  108, 112,  120,  144,  192,
                                    288, 336, 384, 576, 768, 864, 1152, 1200, 1296, 1536};
    return s;
}
const std::set<u64>& i1() {
    static const std::set<u64> s = {220, 240, 360, 504};
    return s;
}
const std::set<u64>& final_set() {
    static const std::set<u64> s = {2,   4,   6,   8,   10,  12,  16,  20,  24,   30,   32,   36,  40,
                                    48,  54,  60,  72,  84,  96,  108, 112, 120,  144,  192,  220, 240,
                                    288, 336, 360, 384, 504, 576, 768, 864, 1152, 1200, 1296, 1536};
    return s;
}
}  // namespace expected

const std::vector<NamedGroup>& exceptional_groups() {
    static const std::vector<NamedGroup> groups = [] {
        std::vector<NamedGroup> g;
        g.push_back({"G1", 220, nonsplit_cartan_normalizer(11)});
        g.push_back({"G2", 240, crt_product({nonsplit_cartan_normalizer(3), nonsplit_cartan_normalizer(5)})});
        g.push_back({"G3", 360, crt_product({nonsplit_cartan_normalizer(3), split_cartan_normalizer(5)})});
        g.push_back({"G4", 504, crt_product({nonsplit_cartan_normalizer(3), nonsplit_cartan_normalizer(7)})});
        return g;
    }();
    return groups;
}

bool label_less(const std::string& a, const std::string& b) {
    auto split = [](const std::string& s) {
        size_t k = 0;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        u64 num = k ? std::stoull(s.substr(0, k)) : 0;
        return std::make_pair(num, s.substr(k));
    };
    return split(a) < split(b);
}

std::string digest(const std::string& data) {
    // Two independent 64-bit FNV-1a lanes.
    u64 h1 = 0xcbf29ce484222325ULL, h2 = 0x84222325cbf29ce4ULL;
    for (unsigned char c : data) {
        h1 = (h1 ^ c) * 0x100000001b3ULL;
        h2 = (h2 ^ static_cast<unsigned char>(c + 0x5b)) * 0x100000001b3ULL;
    }
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(h1),
                  static_cast<unsigned long long>(h2));
    return buf;
}

GammaResult process_gamma(const CongruenceRecord& rec, int genus, const std::set<u64>* I0, const CurveStore* store,
                          size_t trace_primes) {
    GammaResult out;
    out.record = rec;
    out.genus = genus;
    CongruenceSubgroup cs = build_subgroup(rec);
    if (cs.level == 1) {
        CandidateRow row;
        row.gamma_label = rec.label;
        row.genus = genus;
        IndexCertificate cert;
        cert.N = 1;
        cert.M = 1;
        cert.index = 1;
        cert.n = 2;
        cert.chain.push_back({1, 1, true});
        row.cert = cert;
        row.cusps_geometric = 1;
        row.in_I1 = row.in_I2 = genus == 0;
        row.needs_jacobian = genus == 1 && I0 && !I0->count(2);
        out.rows.push_back(row);
        return out;
    }
    LevelContext ctx = build_context(cs);
    out.compatible = ctx.compatible;
    if (!ctx.compatible) return out;
    for (const CandidateGroup& c : enumerate_candidates(ctx, genus)) {
        CandidateRow row;
        row.gamma_label = rec.label;
        row.genus = genus;
        row.N0 = c.N0;
        row.N = c.N;
        row.order = c.G.order();
        for (const Mat2& g : c.G.gens().gens) row.gen_codes.push_back(encode(g));
        row.cond_a = c.cond_a;
        row.cond_b = c.cond_b;
        row.cond_c = c.cond_c;
        row.cond_d = c.cond_d;
        if (c.cond_d) {
            try {
                row.cert = profinite_index(c.G);
            } catch (const ResourceError& e) {
                throw ResourceError("candidate " + rec.label + " at N = " + std::to_string(c.N) + ": " + e.what());
            }
            CuspCounter cc(c.G);
            row.cusps_geometric = cc.total();
            for (const auto& pp : factor(c.N)) {
                size_t k = cc.count(CuspField::Qp, pp.p);
                row.cusps_qp.emplace_back(pp.p, k);
                if (k == 0) row.empty_cusp_primes.push_back(pp.p);
            }
            if (genus == 0) {
                row.in_I1 = true;
                row.in_I2 = row.empty_cusp_primes.size() <= 1;
            } else {
                PointCounter pc(c.G);
                for (u64 p : probe_primes(c.N, trace_primes)) row.traces.emplace_back(p, pc.ap(p));
                row.needs_jacobian = I0 && !I0->count(row.n());
                if (row.needs_jacobian && store) {
                    row.jacobian = match_jacobian(pc, c.N, *store);
                    row.in_I3 = row.jacobian->status == JacobianMatch::Status::Matched && row.jacobian->rank > 0;
                }
                if (row.in_I3) {
                    row.coset_index = order_gl2(c.N) / c.G.order();
                    for (const auto& ng : exceptional_groups())
                        if (ng.G.modulus() == c.N && ng.G.order() == c.G.order() && find_conjugator(ng.G, c.G)) {
                            row.identification = ng.name;
                            break;
                        }
                }
            }
        }
        out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end(),
              [](const CandidateRow& a, const CandidateRow& b) { return a.gen_codes < b.gen_codes; });
    return out;
}

Json row_to_json(const CandidateRow& r) {
    Json j;
    j["gamma_label"] = r.gamma_label;
    j["genus"] = r.genus;
    j["N0"] = r.N0;
    j["N"] = r.N;
    j["order"] = r.order;
    j["generator_codes"] = r.gen_codes;
    Json gens = Json::array();
    for (Code c : r.gen_codes) gens.push_back(mat_json(decode(c, r.N)));
    j["generators"] = gens;
    j["conditions"] = {{"a", r.cond_a}, {"b", r.cond_b}, {"c", r.cond_c}, {"d", r.cond_d}};
    if (r.cert) {
        j["index"] = r.cert->index;
        j["n"] = r.cert->n;
        j["certificate_level"] = r.cert->M;
        Json chain = Json::array();
        for (const auto& s : r.cert->chain) chain.push_back({{"M", s.M}, {"index", s.index}, {"certifies", s.certifies}});
        j["chain"] = chain;
        Json qp = Json::array();
        for (auto [p, k] : r.cusps_qp) qp.push_back({{"p", p}, {"rational", k}});
        j["cusps"] = {{"geometric", r.cusps_geometric}, {"Qp", qp}, {"empty_primes", r.empty_cusp_primes}};
    } else {
        j["n"] = nullptr;
    }
    if (r.genus == 0) {
        j["in_I1"] = r.in_I1;
        j["in_I2"] = r.in_I2;
    } else {
        Json tr = Json::array();
        for (auto [p, a] : r.traces) tr.push_back(Json::array({p, a}));
        j["traces"] = tr;
        j["needs_jacobian"] = r.needs_jacobian;
        if (r.jacobian) {
            const auto& m = *r.jacobian;
            Json jt = Json::array();
            for (auto [p, a] : m.traces) jt.push_back(Json::array({p, a}));
            j["jacobian"] = {{"status", to_string(m.status)},
                             {"class_label", m.class_label},
                             {"rank", m.rank},
                             {"rank_source", "curve database"},
                             {"primes_used", m.primes_used},
                             {"survivors", m.survivors},
                             {"confirmed", m.confirmed},
                             {"traces", jt}};
        }
        j["in_I3"] = r.in_I3;
        if (r.in_I3) j["identification"] = {{"group", r.identification}, {"coset_index", r.coset_index}};
    }
    return j;
}

CandidateRow row_from_json(const Json& j) {
    CandidateRow r;
    r.gamma_label = j.at("gamma_label").get<std::string>();
    r.genus = j.at("genus").get<int>();
    r.N0 = j.at("N0").get<u32>();
    r.N = j.at("N").get<u32>();
    r.order = j.at("order").get<u64>();
    r.gen_codes = j.at("generator_codes").get<std::vector<Code>>();
    const auto& c = j.at("conditions");
    r.cond_a = c.at("a").get<bool>();
    r.cond_b = c.at("b").get<bool>();
    r.cond_c = c.at("c").get<bool>();
    r.cond_d = c.at("d").get<bool>();
    if (!j.at("n").is_null()) {
        IndexCertificate cert;
        cert.N = r.N;
        cert.index = j.at("index").get<u64>();
        cert.n = j.at("n").get<u64>();
        cert.M = j.at("certificate_level").get<u64>();
        for (const auto& s : j.at("chain"))
            cert.chain.push_back({s.at("M").get<u64>(), s.at("index").get<u64>(), s.at("certifies").get<bool>()});
        r.cert = cert;
        const auto& cu = j.at("cusps");
        r.cusps_geometric = cu.at("geometric").get<size_t>();
        for (const auto& q : cu.at("Qp")) r.cusps_qp.emplace_back(q.at("p").get<u32>(), q.at("rational").get<size_t>());
        r.empty_cusp_primes = cu.at("empty_primes").get<std::vector<u32>>();
    }
    if (r.genus == 0) {
        r.in_I1 = j.at("in_I1").get<bool>();
        r.in_I2 = j.at("in_I2").get<bool>();
    } else {
        for (const auto& t : j.at("traces")) r.traces.emplace_back(t[0].get<u64>(), t[1].get<i64>());
        r.needs_jacobian = j.at("needs_jacobian").get<bool>();
        if (j.contains("jacobian")) {
            const auto& jm = j.at("jacobian");
            JacobianMatch m;
            const std::string st = jm.at("status").get<std::string>();
            m.status = st == "matched"     ? JacobianMatch::Status::Matched
                       : st == "ambiguous" ? JacobianMatch::Status::Ambiguous
                                           : JacobianMatch::Status::Eliminated;
            m.class_label = jm.at("class_label").get<std::string>();
            m.rank = jm.at("rank").get<int>();
            m.primes_used = jm.at("primes_used").get<size_t>();
            m.survivors = jm.at("survivors").get<std::vector<std::string>>();
            m.confirmed = jm.at("confirmed").get<bool>();
            for (const auto& t : jm.at("traces")) m.traces.emplace_back(t[0].get<u64>(), t[1].get<i64>());
            r.jacobian = m;
        }
        r.in_I3 = j.at("in_I3").get<bool>();
        if (r.in_I3) {
            r.identification = j.at("identification").at("group").get<std::string>();
            r.coset_index = j.at("identification").at("coset_index").get<u64>();
        }
    }
    return r;
}

Json gamma_to_json(const GammaResult& g) {
    Json rows = Json::array();
    for (const auto& r : g.rows) rows.push_back(row_to_json(r));
    return {{"record", format_record(g.record)}, {"genus", g.genus}, {"compatible", g.compatible}, {"rows", rows}};
}

GammaResult gamma_from_json(const Json& j) {
    GammaResult g;
    auto recs = parse_classification_text(j.at("record").get<std::string>() + "\n", "<cache>");
    if (recs.size() != 1) throw DataError("cache entry holds no record");
    g.record = recs.front();
    g.genus = j.at("genus").get<int>();
    g.compatible = j.at("compatible").get<bool>();
    for (const auto& r : j.at("rows")) g.rows.push_back(row_from_json(r));
    return g;
}

namespace {

std::vector<GammaResult> run_stage(const std::vector<CongruenceRecord>& recs, int genus, const PipelineOptions& opt,
                                   const std::set<u64>* I0, const CurveStore* store, const std::string& context_key) {
    std::vector<GammaResult> out(recs.size());
    // Larger levels first so long tasks start early; results land by index.
    std::vector<size_t> order(recs.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return recs[a].level > recs[b].level; });
    std::mutex log_mu;
    run_parallel(order.size(), opt.jobs, [&](size_t k) {
        const size_t i = order[k];
        const auto& rec = recs[i];
        fs::path entry;
        if (!opt.cache_dir.empty()) {
            std::string key = digest(std::string(kModuleVersion) + "\n" + context_key + "\n" + std::to_string(genus) +
                                     "\n" + format_record(rec));
            entry = fs::path(opt.cache_dir) / ("gamma-" + key + ".json");
            if (fs::exists(entry)) {
                try {
                    out[i] = gamma_from_json(Json::parse(read_file(entry.string())));
                    return;
                } catch (const std::exception&) {
                    // Unreadable entries are recomputed and overwritten.
                }
            }
        }
        out[i] = process_gamma(rec, genus, I0, store, opt.trace_primes);
        if (!entry.empty()) write_atomic(entry, gamma_to_json(out[i]).dump() + "\n");
        if (opt.progress) {
            std::lock_guard<std::mutex> lk(log_mu);
            opt.progress("genus " + std::to_string(genus) + " " + rec.label + " done");
        }
    });
    return out;
}

CensusSummary census(const std::vector<GammaResult>& gs) {
    CensusSummary c;
    c.records = gs.size();
    for (const auto& g : gs) {
        if (!g.compatible) ++c.incompatible;
        c.candidates_abc += g.rows.size();
        for (const auto& r : g.rows)
            if (r.cond_d) ++c.candidates;
    }
    return c;
}

}  // namespace

PipelineResult run_pipeline(const PipelineOptions& opt, bool with_genus1) {
    PipelineResult res;
    const std::string g0_path = opt.data_dir + "/classification/genus0.txt";
    const std::string g1_path = opt.data_dir + "/classification/genus1.txt";
    const std::string g0_text = read_file(g0_path);
    auto recs0 = parse_classification_text(g0_text, g0_path);
    if (recs0.empty()) throw DataError(g0_path + ": no records");

    if (!opt.cache_dir.empty()) {
        fs::create_directories(opt.cache_dir);
        ClassPolyCache::global().load((fs::path(opt.cache_dir) / "classpoly.txt").string());
    }

    std::string inputs = std::string(kModuleVersion) + "\n" + digest(g0_text);
    res.genus0 = run_stage(recs0, 0, opt, nullptr, nullptr, "");
    res.census0 = census(res.genus0);
    for (const auto& g : res.genus0)
        for (const auto& r : g.rows) {
            if (r.in_I1) res.I1_union.insert(r.n());
            if (r.in_I2) res.I2_union.insert(r.n());
        }

    if (with_genus1) {
        std::string g1_text;
        std::vector<CongruenceRecord> recs1;
        try {
            g1_text = read_file(g1_path);
            recs1 = parse_classification_text(g1_text, g1_path);
        } catch (const DataError&) {
            if (!opt.allow_partial) throw;
        }
        if (recs1.empty() && !opt.allow_partial) throw DataError(g1_path + ": no records");
        if (!recs1.empty()) {
            CurveStore store = CurveStore::load_dir(opt.data_dir + "/ecdb");
            const std::string store_digest = digest(store.serialize());
            inputs += "\n" + digest(g1_text) + "\n" + store_digest;
            std::string ctx_key = store_digest + "\n" + std::to_string(opt.trace_primes) + "\n";
            for (u64 n : res.I1_union) ctx_key += std::to_string(n) + ",";
            res.genus1 = run_stage(recs1, 1, opt, &res.I1_union, &store, ctx_key);
            res.census1 = census(res.genus1);
            for (const auto& g : res.genus1)
                for (const auto& r : g.rows) {
                    if (r.needs_jacobian) ++res.jacobian_required;
                    if (r.in_I3 && !res.I1_union.count(r.n())) res.I3_minus_I0.insert(r.n());
                    if (r.jacobian && r.jacobian->status != JacobianMatch::Status::Matched)
                        res.ambiguous.push_back(r.gamma_label);
                }
            res.genus1_done = true;
        }
    }
    res.inputs_digest = digest(inputs);
    if (!opt.cache_dir.empty()) ClassPolyCache::global().save((fs::path(opt.cache_dir) / "classpoly.txt").string());
    return res;
}

Target parse_target(const std::string& s) {
    if (s == "i0") return Target::I0;
    if (s == "i1") return Target::I1;
    if (s == "final") return Target::Final;
    throw std::invalid_argument("unknown target " + s);
}

const char* to_string(Target t) {
    switch (t) {
        case Target::I0: return "i0";
        case Target::I1: return "i1";
        case Target::Final: return "final";
    }
    return "?";
}

namespace {

Json census_json(const CensusSummary& c, const std::vector<GammaResult>& gs) {
    std::vector<std::string> inc;
    for (const auto& g : gs)
        if (!g.compatible) inc.push_back(g.record.label);
    return {{"records", c.records},
            {"incompatible", c.incompatible},
            {"incompatible_labels", inc},
            {"candidates_abc", c.candidates_abc},
            {"candidates", c.candidates}};
}

struct Checker {
    Json checks = Json::array();
    bool ok = true;
    void set(const std::string& name, const std::set<u64>& actual, const std::set<u64>& want) {
        std::vector<u64> missing, unexpected;
        std::set_difference(want.begin(), want.end(), actual.begin(), actual.end(), std::back_inserter(missing));
        std::set_difference(actual.begin(), actual.end(), want.begin(), want.end(), std::back_inserter(unexpected));
        bool pass = missing.empty() && unexpected.empty();
        ok = ok && pass;
        checks.push_back({{"check", name}, {"ok", pass}, {"missing", missing}, {"unexpected", unexpected}});
    }
    void count(const std::string& name, u64 actual, u64 want) {
        bool pass = actual == want;
        ok = ok && pass;
        checks.push_back({{"check", name}, {"ok", pass}, {"expected", want}, {"actual", actual}});
    }
    void flag(const std::string& name, bool pass, Json detail = Json::object()) {
        ok = ok && pass;
        checks.push_back({{"check", name}, {"ok", pass}, {"detail", detail}});
    }
};

}  // namespace

Report make_report(const PipelineResult& r, Target t) {
    Report rep;
    Json& j = rep.json;
    j["schema_version"] = kSchemaVersion;
    j["target"] = to_string(t);
    j["inputs_digest"] = r.inputs_digest;
    Checker ck;
    Json rows = Json::array();
    Json summary;
    auto add_rows = [&](const std::vector<GammaResult>& gs) {
        std::vector<const GammaResult*> sorted;
        for (const auto& g : gs) sorted.push_back(&g);
        std::stable_sort(sorted.begin(), sorted.end(), [](const GammaResult* a, const GammaResult* b) {
            return label_less(a->record.label, b->record.label);
        });
        for (const GammaResult* g : sorted)
            for (const auto& row : g->rows) rows.push_back(row_to_json(row));
    };

    Json census = {{"genus0", census_json(r.census0, r.genus0)}};
    add_rows(r.genus0);
    summary["I1_union"] = set_json(r.I1_union);
    summary["I2_union"] = set_json(r.I2_union);
    summary["squeeze_holds"] = r.I1_union == r.I2_union;
    ck.count("genus0 records", r.census0.records, expected::kGenus0Records);
    ck.count("genus0 candidates", r.census0.candidates, expected::kGenus0Candidates);
    ck.flag("squeeze I2 = I1", r.I1_union == r.I2_union);
    ck.set("I0", r.I1_union, expected::i0());

    if (t != Target::I0) {
        if (!r.genus1_done) {
            ck.flag("genus1 stage ran", false);
        } else {
            census["genus1"] = census_json(r.census1, r.genus1);
            add_rows(r.genus1);
            Json ids = Json::array();
            std::vector<const CandidateRow*> hits;
            for (const auto& g : r.genus1)
                for (const auto& row : g.rows)
                    if (row.in_I3 && !r.I1_union.count(row.n())) hits.push_back(&row);
            std::sort(hits.begin(), hits.end(), [](const CandidateRow* a, const CandidateRow* b) {
                return std::make_pair(a->n(), a->gamma_label) < std::make_pair(b->n(), b->gamma_label);
            });
            bool ids_ok = true;
            for (const CandidateRow* row : hits) {
                ids.push_back({{"n", row->n()},
                               {"gamma_label", row->gamma_label},
                               {"N", row->N},
                               {"group", row->identification},
                               {"coset_index", row->coset_index},
                               {"jacobian_class", row->jacobian->class_label},
                               {"rank", row->jacobian->rank}});
                bool named = false;
                for (const auto& ng : exceptional_groups())
                    if (ng.name == row->identification && ng.n == row->n()) named = true;
                ids_ok = ids_ok && named;
            }
            summary["I3_minus_I0"] = set_json(r.I3_minus_I0);
            summary["identifications"] = ids;
            summary["jacobian_required"] = r.jacobian_required;
            summary["jacobian_unresolved"] = r.ambiguous;
            ck.count("genus1 records", r.census1.records, expected::kGenus1Records);
            ck.count("genus1 candidates", r.census1.candidates, expected::kGenus1Candidates);
            ck.count("jacobian candidates", r.jacobian_required, expected::kJacobianCandidates);
            ck.flag("jacobian matches unique", r.ambiguous.empty(), r.ambiguous);
            ck.set("I1", r.I3_minus_I0, expected::i1());
            ck.flag("identifications", ids_ok && !hits.empty());
            if (t == Target::Final) {
                std::set<u64> fin = r.I1_union;
                fin.insert(r.I3_minus_I0.begin(), r.I3_minus_I0.end());
                summary["final"] = set_json(fin);
                ck.set("final", fin, expected::final_set());
            }
        }
    }
    j["census"] = census;
    j["summary"] = summary;
    j["comparison"] = {{"matches", ck.ok}, {"checks", ck.checks}};
    j["provenance"] = {{"ranks", "Mordell-Weil ranks are read from the ingested curve database, not computed"}};
    j["rows"] = rows;
    rep.matches = ck.ok;
    return rep;
}

}  // namespace gl2
