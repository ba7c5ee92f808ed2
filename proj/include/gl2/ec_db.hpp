#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include "gl2/modcurve_count.hpp"

namespace gl2 {

struct CurveRecord {
    u64 conductor = 0;
    std::string cls;  // isogeny class letters, e.g. "a"
    int number = 1;
    std::array<i64, 5> ainv{};  // a1 a2 a3 a4 a6
    int rank = 0;
    int torsion = 1;

    std::string class_label() const { return std::to_string(conductor) + cls; }
    std::string label() const { return class_label() + std::to_string(number); }
};

// a_p by direct point count; p >= 3 of good reduction.
i64 curve_ap(const CurveRecord& E, u64 p);
// Discriminant is nonzero mod p.
bool good_reduction(const CurveRecord& E, u64 p);

class CurveStore {
public:
    // Lines "conductor class number [a1,a2,a3,a4,a6] rank torsion"; '#' comments.
    static CurveStore parse_text(const std::string& text, const std::string& source = "<text>");
    static CurveStore parse_files(const std::vector<std::string>& paths);
    // Reads allcurves.txt and, when present, manifest.txt from dir.
    static CurveStore load_dir(const std::string& dir);

    const std::vector<CurveRecord>& records() const { return records_; }
    // Coverage: every curve with conductor <= max_conductor whose primes lie in `primes`.
    u64 max_conductor() const { return max_conductor_; }
    const std::vector<u64>& primes() const { return primes_; }
    void set_coverage(u64 max_conductor, std::vector<u64> primes);
    bool covers(u64 conductor) const;

    // Representative (number 1) of each class, in file order.
    const std::vector<const CurveRecord*>& representatives() const { return reps_; }
    const CurveRecord* find_class(const std::string& class_label) const;
    int rank_of(const std::string& class_label) const;

    std::string serialize() const;

private:
    void index();
    std::vector<CurveRecord> records_;
    std::vector<const CurveRecord*> reps_;
    std::map<std::string, size_t> by_class_;
    u64 max_conductor_ = 0;
    std::vector<u64> primes_;
};

// prod over p | N of p^e with e_2 = 8, e_3 = 5, e_p = 2 otherwise.
u64 conductor_bound(u32 N);

// Class representatives with conductor dividing conductor_bound(N).
// Throws DataError when the store does not cover the bound.
std::vector<const CurveRecord*> candidates_for(const CurveStore& store, u32 N);

struct MatchOptions {
    size_t prime_budget = 25;
    size_t confirmations = 5;
    std::vector<u64> probe_order;  // overrides the ascending admissible primes when nonempty
};

struct JacobianMatch {
    enum class Status { Matched, Ambiguous, Eliminated } status = Status::Eliminated;
    std::string class_label;  // set when matched
    int rank = -1;
    size_t primes_used = 0;
    std::vector<std::string> survivors;
    std::vector<std::pair<u64, i64>> traces;  // (p, a_p(J)) for every probed prime
    bool confirmed = false;
};

const char* to_string(JacobianMatch::Status s);

// Admissible primes for level N in ascending order, starting at 5.
std::vector<u64> probe_primes(u32 N, size_t count);

JacobianMatch match_jacobian(const PointCounter& J, u32 N, const CurveStore& store,
                             const MatchOptions& opt = {});

}  // namespace gl2
