#pragma once
#include <optional>
#include <string>
#include <vector>

#include "gl2/congruence.hpp"

namespace gl2 {

u32 n_from_level(u32 N0);

struct LevelContext {
    std::string gamma_label;
    u32 N0 = 1;
    u32 N = 1;
    GroupTable H;       // full preimage of H(N0) in SL2(Z/N)
    GroupTable Htilde;  // scalars * H
    GroupTable normalizer;
    QuotientGroup C;
    int qn_rank = 0;    // |Q_N| = 2^qn_rank
    bool compatible = false;
};

struct CandidateGroup {
    std::string gamma_label;
    u32 N0 = 1;
    u32 N = 1;
    int genus = 0;
    GroupTable G;
    std::vector<u32> W;  // class index in C of the lift with det class e_i
    bool cond_a = false, cond_b = false, cond_c = false, cond_d = false;
};

// Level N0 = 1 has no context; callers special-case it.
LevelContext build_context(const CongruenceSubgroup& cs);

std::vector<CandidateGroup> enumerate_candidates(const LevelContext& ctx, int genus);

struct ConditionCheck {
    bool a = false, b = false, c = false;
};
ConditionCheck check_abc(const GroupTable& G, const GroupTable& H);
bool check_real(const GroupTable& G);

enum class CuspField { Q, Qp, Fp, Geometric };

// Cusp classes G\GL2/U with U = <-I, T>, counted by stability under B.
class CuspCounter {
public:
    explicit CuspCounter(const GroupTable& G);
    size_t count(CuspField field, u32 p = 0) const;
    size_t total() const { return orbit_count_; }
    const CosetSpace& cosets() const { return cs_; }

private:
    CosetSpace cs_;
    std::vector<u32> orbit_;  // orbit root per coset
    size_t orbit_count_ = 0;
};

size_t cusp_count(const GroupTable& G, CuspField field, u32 p = 0);
std::vector<Mat2> cyclotomic_b_gens(u32 N, CuspField field, u32 p);

}  // namespace gl2
