// Command-line driver: verify-cp, reproduce, inspect.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <chrono>

#include "CLI11.hpp"

#include "gl2/classpoly.hpp"
#include "gl2/errors.hpp"
#include "gl2/pipeline.hpp"

using namespace gl2;

namespace {

enum Exit { kOk = 0, kDataError = 2, kMismatch = 3, kResource = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const Json& j, const std::string& out) {
    std::string text = j.dump(1) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw DataError("cannot write " + out);
        f << text;
    }
}

// Checks each record on its own so every failing label is reported.
Json verify_file(const std::string& path, int genus, std::vector<std::string>& failures) {
    std::istringstream in(slurp(path));
    std::string line, header = "# genus " + std::to_string(genus) + "\n";
    size_t ok = 0, lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::string label = line.substr(first, line.find_first_of(" \t", first) - first);
        try {
            auto recs = parse_classification_text(header + line + "\n", path);
            build_subgroup(recs.at(0));
            ++ok;
        } catch (const std::exception& e) {
            failures.push_back(label);
            std::cerr << path << ":" << lineno << ": " << label << ": " << e.what() << "\n";
        }
    }
    return {{"file", path}, {"records_ok", ok}};
}

GroupTable named_group(const std::string& name) {
    auto num = [&](size_t skip) { return static_cast<u32>(std::stoul(name.substr(skip))); };
    for (const auto& ng : exceptional_groups())
        if (ng.name == name) return ng.G;
    if (name.rfind("borel", 0) == 0) return borel(num(5));
    if (name.rfind("nsplit", 0) == 0) return nonsplit_cartan_normalizer(num(6));
    if (name.rfind("split", 0) == 0) return split_cartan_normalizer(num(5));
    if (name.rfind("gl2_", 0) == 0) return full_group(num(4), Ambient::GL2);
    // File: modulus followed by generator entries a b c d ...
    std::istringstream in(slurp(name));
    u32 n;
    if (!(in >> n) || n == 0) throw DataError(name + ": missing modulus");
    std::vector<Mat2> gens;
    i64 a, b, c, d;
    while (in >> a >> b >> c >> d) {
        Mat2 m = make_mat(a, b, c, d, n);
        if (!is_unit_det(m)) throw DataError(name + ": generator " + to_string(m) + " is not invertible");
        gens.push_back(m);
    }
    return close_gens(n, gens);
}

std::optional<std::pair<CongruenceRecord, int>> find_label(const std::string& data_dir, const std::string& label) {
    for (int g = 0; g < 2; ++g)
        for (const auto& r : parse_classification(data_dir + "/classification/genus" + std::to_string(g) + ".txt"))
            if (r.label == label) return std::make_pair(r, g);
    return std::nullopt;
}

Json group_json(const GroupTable& G) {
    Json gens = Json::array();
    for (const Mat2& g : G.gens().gens) gens.push_back(to_string(g));
    return {{"N", G.modulus()}, {"order", G.order()}, {"coset_index", order_gl2(G.modulus()) / G.order()},
            {"generators", gens}};
}

Json inspect_group(const GroupTable& G, const std::string& query, u64 prime, const std::string& data_dir) {
    const u32 N = G.modulus();
    Json j = group_json(G);
    if (query == "index") {
        auto cert = profinite_index(G);
        Json chain = Json::array();
        for (const auto& s : cert.chain) chain.push_back({{"M", s.M}, {"index", s.index}, {"certifies", s.certifies}});
        j["index"] = cert.index;
        j["n"] = cert.n;
        j["certificate_level"] = cert.M;
        j["chain"] = chain;
    } else if (query == "cusps") {
        CuspCounter cc(G);
        j["geometric"] = cc.total();
        j["Q"] = cc.count(CuspField::Q);
        Json qp = Json::array();
        for (const auto& pp : factor(N)) qp.push_back({{"p", pp.p}, {"rational", cc.count(CuspField::Qp, pp.p)}});
        j["Qp"] = qp;
    } else if (query == "ap") {
        if (!admissible_prime(prime, N))
            throw UsageError("--prime must be a prime >= 5 not dividing N = " + std::to_string(N));
        PointCounter pc(G);
        auto b = pc.breakdown(prime);
        u64 count = b.generic + b.j0 + b.j1728 + b.cusps;
        j["p"] = prime;
        j["points"] = count;
        j["a_p"] = static_cast<i64>(prime) + 1 - static_cast<i64>(count);
        j["fibers"] = {{"generic", b.generic}, {"j0", b.j0}, {"j1728", b.j1728}, {"cusps", b.cusps}};
    } else if (query == "jacobian") {
        auto store = CurveStore::load_dir(data_dir + "/ecdb");
        PointCounter pc(G);
        auto m = match_jacobian(pc, N, store);
        Json tr = Json::array();
        for (auto [p, a] : m.traces) tr.push_back(Json::array({p, a}));
        j["jacobian"] = {{"status", to_string(m.status)}, {"class_label", m.class_label}, {"rank", m.rank},
                         {"rank_source", "curve database"}, {"primes_used", m.primes_used},
                         {"survivors", m.survivors}, {"traces", tr}};
    } else if (query != "candidates") {
        throw UsageError("unknown query " + query);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Index sets of adelic images of elliptic curves, recomputed from congruence subgroup data"};
    app.require_subcommand(1);

    std::string g0_path, g1_path;
    bool allow_partial = false;
    std::string out_path;
    auto* verify = app.add_subcommand("verify-cp", "Recompute index and genus of every classification record");
    verify->add_option("--genus0", g0_path, "genus-0 classification file")->required();
    verify->add_option("--genus1", g1_path, "genus-1 classification file");
    verify->add_flag("--allow-partial", allow_partial, "accept a missing or empty genus-1 file");
    verify->add_option("--out", out_path, "report path (default stdout)");

    std::string target = "final", cache_dir, data_dir = "data";
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool quiet = false;
    auto* repro = app.add_subcommand("reproduce", "Run the pipeline and compare with the reference sets");
    repro->add_option("--target", target, "i0 | i1 | final")->check(CLI::IsMember({"i0", "i1", "final"}));
    repro->add_option("--cache", cache_dir, "cache directory (default $GL2_CACHE_DIR)");
    repro->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    repro->add_option("--data-dir", data_dir, "directory holding classification/ and ecdb/");
    repro->add_option("--out", out_path, "report path (default stdout)");
    repro->add_flag("--allow-partial", allow_partial, "skip genus 1 when its file is empty");
    repro->add_flag("-q,--quiet", quiet, "no progress output");

    std::string gamma, group, query;
    u64 prime = 0;
    auto* insp = app.add_subcommand("inspect", "Module outputs for one subgroup label or matrix group");
    auto* og = insp->add_option("--gamma", gamma, "classification label");
    auto* ogr = insp->add_option("--group", group, "named group (borelN, nsplitP, splitP, gl2_N, G1..G4) or file");
    og->excludes(ogr);
    insp->add_option("--data-dir", data_dir, "directory holding classification/ and ecdb/");
    insp->add_option("query", query, "candidates | index | cusps | ap | jacobian")->required()
        ->check(CLI::IsMember({"candidates", "index", "cusps", "ap", "jacobian"}));
    insp->add_option("--prime", prime, "prime for the ap query");
    insp->add_option("--out", out_path, "report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kDataError;
    }

    try {
        if (*verify) {
            std::vector<std::string> failures;
            Json rep = {{"schema_version", kSchemaVersion}, {"target", "verify-cp"}};
            rep["genus0"] = verify_file(g0_path, 0, failures);
            bool have_g1 = !g1_path.empty() && std::filesystem::exists(g1_path) &&
                           !parse_classification(g1_path).empty();
            if (have_g1) {
                rep["genus1"] = verify_file(g1_path, 1, failures);
            } else if (allow_partial) {
                std::cerr << "warning: no genus-1 records, checked genus 0 only\n";
                rep["genus1"] = nullptr;
            } else {
                throw DataError("genus-1 file missing or empty (use --allow-partial)");
            }
            rep["failures"] = failures;
            emit(rep, out_path);
            return failures.empty() ? kOk : kDataError;
        }
        if (*repro) {
            if (cache_dir.empty())
                if (const char* env = std::getenv("GL2_CACHE_DIR")) cache_dir = env;
            PipelineOptions opt;
            opt.data_dir = data_dir;
            opt.cache_dir = cache_dir;
            opt.jobs = jobs;
            opt.allow_partial = allow_partial;
            if (!quiet) opt.progress = [](const std::string& s) { std::cerr << s << "\n"; };
            const Target t = parse_target(target);
            auto t0 = std::chrono::steady_clock::now();
            auto res = run_pipeline(opt, t != Target::I0);
            auto rep = make_report(res, t);
            emit(rep.json, out_path);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (!quiet) std::cerr << "elapsed " << secs << " s\n";
            if (!rep.matches) {
                for (const auto& c : rep.json["comparison"]["checks"])
                    if (!c["ok"].get<bool>()) std::cerr << "mismatch: " << c.dump() << "\n";
                return kMismatch;
            }
            return kOk;
        }
        if (*insp) {
            if (gamma.empty() && group.empty()) throw UsageError("inspect needs --gamma or --group");
            if (query == "ap" && prime == 0) throw UsageError("ap needs --prime");
            Json rep = {{"schema_version", kSchemaVersion}, {"target", "inspect"}, {"query", query}};
            if (!group.empty()) {
                rep["group"] = group;
                rep["result"] = inspect_group(named_group(group), query, prime, data_dir);
            } else {
                auto found = find_label(data_dir, gamma);
                if (!found) throw UsageError("unknown label " + gamma);
                auto [rec, genus] = *found;
                rep["gamma"] = gamma;
                rep["genus"] = genus;
                CongruenceSubgroup cs = build_subgroup(rec);
                Json rows = Json::array();
                if (cs.level == 1) {
                    if (query == "ap" || query == "jacobian") throw UsageError("level 1 has no point counts");
                    rows.push_back({{"N", 1}, {"n", 2}, {"index", 1}, {"certificate_level", 1}});
                } else {
                    auto ctx = build_context(cs);
                    rep["N"] = ctx.N;
                    rep["compatible"] = ctx.compatible;
                    for (const auto& c : enumerate_candidates(ctx, genus)) {
                        if (!c.cond_d) continue;
                        rows.push_back(inspect_group(c.G, query, prime, data_dir));
                    }
                }
                rep["candidates"] = rows;
            }
            emit(rep, out_path);
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kDataError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}
