#pragma once
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gl2/candidates.hpp"
#include "gl2/ec_db.hpp"
#include "gl2/index_calc.hpp"

namespace gl2 {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Published reference values the pipeline output is compared against.
namespace expected {
const std::set<u64>& i0();
const std::set<u64>& i1();
const std::set<u64>& final_set();
constexpr size_t kGenus0Records = 121, kGenus1Records = 163;
constexpr size_t kGenus0Candidates = 331, kGenus1Candidates = 805;
constexpr size_t kJacobianCandidates = 63;
}  // namespace expected

// The four groups with positive-rank Jacobians, by name.
struct NamedGroup {
    std::string name;
    u64 n;
    GroupTable G;
};
const std::vector<NamedGroup>& exceptional_groups();

struct CandidateRow {
    std::string gamma_label;
    int genus = 0;
    u32 N0 = 1, N = 1;
    u64 order = 1;
    std::vector<Code> gen_codes;
    bool cond_a = true, cond_b = true, cond_c = true, cond_d = true;
    // Set when cond_d holds.
    std::optional<IndexCertificate> cert;
    size_t cusps_geometric = 0;
    std::vector<std::pair<u32, size_t>> cusps_qp;  // (p | N, Q_p-rational cusps)
    std::vector<u32> empty_cusp_primes;
    bool in_I1 = false, in_I2 = false;  // genus 0
    std::vector<std::pair<u64, i64>> traces;  // genus 1: a_p(J) at the first probe primes
    bool needs_jacobian = false;
    std::optional<JacobianMatch> jacobian;
    bool in_I3 = false;
    std::string identification;  // exceptional group name
    u64 coset_index = 0;

    u64 n() const { return cert ? cert->n : 0; }
};

struct GammaResult {
    CongruenceRecord record;
    int genus = 0;
    bool compatible = true;
    std::vector<CandidateRow> rows;
};

struct PipelineOptions {
    std::string data_dir = "data";
    std::string cache_dir;  // empty: no cache
    unsigned jobs = 1;
    bool allow_partial = false;
    size_t trace_primes = 6;  // a_p(J) recorded for every genus-1 candidate
    std::function<void(const std::string&)> progress;
};

struct CensusSummary {
    size_t records = 0;
    size_t incompatible = 0;
    size_t candidates_abc = 0;
    size_t candidates = 0;  // (a)-(d)
};

struct PipelineResult {
    std::vector<GammaResult> genus0, genus1;
    CensusSummary census0, census1;
    std::set<u64> I1_union, I2_union;     // genus 0
    std::set<u64> I3_minus_I0;            // genus 1
    size_t jacobian_required = 0;
    std::vector<std::string> ambiguous;  // rows whose Jacobian match is not unique
    std::string inputs_digest;
    bool genus1_done = false;
};

// Runs the genus-0 stage, and the genus-1 stage when with_genus1 is set.
// Throws DataError for bad inputs and ResourceError when a candidate exceeds budgets.
PipelineResult run_pipeline(const PipelineOptions& opt, bool with_genus1);

GammaResult process_gamma(const CongruenceRecord& rec, int genus, const std::set<u64>* I0,
                          const CurveStore* store, size_t trace_primes);

Json row_to_json(const CandidateRow& r);
CandidateRow row_from_json(const Json& j);
Json gamma_to_json(const GammaResult& g);
GammaResult gamma_from_json(const Json& j);

// Hex content digest.
std::string digest(const std::string& data);

enum class Target { I0, I1, Final };
Target parse_target(const std::string& s);
const char* to_string(Target t);

struct Report {
    Json json;
    bool matches = true;
};
Report make_report(const PipelineResult& r, Target t);

// Natural order on labels: numeric prefix, then the rest.
bool label_less(const std::string& a, const std::string& b);

}  // namespace gl2
