#pragma once
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "gl2/modring.hpp"

namespace gl2 {

enum class Ambient { SL2, GL2 };

struct GenSet {
    u32 n = 1;
    std::vector<Mat2> gens;
    Ambient ambient = Ambient::GL2;
};

// Set of element codes mod n: a bit table when n^4 fits the budget,
// an open-addressing hash otherwise.
class CodeSet {
public:
    static constexpr u64 kBitTableBudget = u64(1) << 26;

    explicit CodeSet(u32 n = 1, size_t expected = 0);
    bool insert(Code c);
    bool contains(Code c) const;
    size_t size() const { return count_; }

private:
    void grow();

    bool use_bits_;
    std::vector<u64> bits_;
    std::vector<Code> slots_;
    size_t count_ = 0;
};

// Immutable, fully enumerated subgroup of GL2(Z/n). Cheap to copy.
class GroupTable {
public:
    GroupTable() = default;

    u32 modulus() const { return data_->n; }
    const GenSet& gens() const { return data_->gens; }
    const std::vector<Code>& elements() const { return data_->elements; }
    u64 order() const { return data_->elements.size(); }
    Mat2 element(size_t i) const { return decode(data_->elements[i], data_->n); }

    bool contains(const Mat2& x) const { return contains_code(encode(x)); }
    bool contains_code(Code c) const;

    // True when every element of other lies in this group.
    bool contains_group(const GroupTable& other) const;
    bool operator==(const GroupTable& o) const;

private:
    friend class ClosureBuilder;
    struct Data {
        u32 n = 1;
        GenSet gens;
        std::vector<Code> elements;  // sorted
        CodeSet members;
    };
    std::shared_ptr<const Data> data_;
};

// Incremental breadth-first closure under right multiplication.
class ClosureBuilder {
public:
    explicit ClosureBuilder(u32 n, Ambient ambient = Ambient::GL2);
    // Returns false when g was already in the group.
    bool add_generator(const Mat2& g);
    bool contains(const Mat2& x) const { return set_.contains(encode(x)); }
    size_t size() const { return elems_.size(); }
    GroupTable finish() const;

private:
    u32 n_;
    Ambient ambient_;
    std::vector<Mat2> gens_;
    std::vector<Mat2> elems_;
    CodeSet set_;
};

GroupTable close(const GenSet& g);
GroupTable close_gens(u32 n, const std::vector<Mat2>& gens, Ambient ambient = Ambient::GL2);
GroupTable full_group(u32 n, Ambient ambient);

GenSet kernel_gens(u32 n, u32 m, Ambient ambient);
// A lift of x (mod m) to GL2(Z/n), or to SL2(Z/n) when det(x) = 1 and sl2 is set.
Mat2 lift(const Mat2& x, u32 n, bool sl2);
GroupTable preimage(const GroupTable& g, u32 n);
GroupTable image_mod(const GroupTable& g, u32 m);

bool normalizes(const Mat2& x, const GroupTable& h);

// Right cosets base\ambient, enumerated breadth first from I.
class CosetSpace {
public:
    CosetSpace(const GroupTable& base, Ambient ambient);
    CosetSpace(const GroupTable& base, const std::vector<Mat2>& ambient_gens);

    const GroupTable& base() const { return base_; }
    size_t size() const { return reps_.size(); }
    const std::vector<Mat2>& reps() const { return reps_; }
    const Mat2& rep(size_t i) const { return reps_[i]; }
    const Mat2& rep_inverse(size_t i) const { return rep_invs_[i]; }

    static constexpr size_t npos = static_cast<size_t>(-1);
    size_t index_of(const Mat2& x) const;
    // Permutation of cosets induced by right multiplication by m.
    std::vector<u32> action(const Mat2& m) const;

private:
    void build(const std::vector<Mat2>& gens);

    GroupTable base_;
    std::vector<Mat2> reps_;
    std::vector<Mat2> rep_invs_;
};

size_t fixed_cosets(const CosetSpace& cs, const Mat2& m);

GroupTable normalizer(const GroupTable& h);

struct QuotientGroup {
    GroupTable ambient;
    GroupTable kernel;
    std::vector<Mat2> reps;                 // reps[0] is the identity class
    std::vector<std::vector<u32>> table;    // table[i][j] = class of reps[i]*reps[j]
    std::vector<u32> det_class;             // square class of det(reps[i])
    std::vector<u32> inverse;

    size_t order() const { return reps.size(); }
};

// Throws std::invalid_argument when kernel is not normal in ambient.
QuotientGroup quotient(const GroupTable& ambient, const GroupTable& kernel);

GroupTable commutator_subgroup(const GroupTable& g);

struct DoubleCosetCount {
    size_t total = 0;
    size_t fixed = 0;
};
// Orbits of u on G\GL2 (right multiplication), and how many are stable
// under right multiplication by every generator of b.
DoubleCosetCount double_cosets(const GroupTable& g, const GroupTable& u, const GroupTable& b);
DoubleCosetCount double_cosets(const CosetSpace& cs, const std::vector<Mat2>& u_gens,
                               const std::vector<Mat2>& b_gens);

// Conjugation orbit of x under the group generated by gens.
std::vector<Code> conjugation_orbit(const Mat2& x, const std::vector<Mat2>& gens);

// Some y in the ambient group with y a y^-1 = b as sets, if any.
std::optional<Mat2> find_conjugator(const GroupTable& a, const GroupTable& b);

// Standard subgroups.
GroupTable borel(u32 n);
GroupTable split_cartan_normalizer(u32 p);
GroupTable nonsplit_cartan(u32 p);
GroupTable nonsplit_cartan_normalizer(u32 p);
// Direct product over pairwise coprime moduli, embedded by CRT.
GroupTable crt_product(const std::vector<GroupTable>& parts);

}  // namespace gl2
