#pragma once
#include <string>
#include <vector>

#include "gl2/group.hpp"

namespace gl2 {

struct CongruenceRecord {
    std::string label;
    u32 level = 1;
    u32 index = 1;
    int genus = 0;
    std::vector<Mat2> gens;  // mod level
};

struct CongruenceSubgroup {
    CongruenceRecord record;
    u32 level = 1;
    GroupTable H;  // in SL2(Z/level), contains -I
    u32 mu = 1;
    u32 e2 = 0, e3 = 0, einf = 0;
    int genus = 0;
};

struct Invariants {
    u32 mu, e2, e3, einf;
    int genus;
};

// Reads `label level index genus gen_count a b c d ...` lines; '#' starts a comment.
// Throws DataError with the line number on malformed input.
std::vector<CongruenceRecord> parse_classification(const std::string& path);
std::vector<CongruenceRecord> parse_classification_text(const std::string& text,
                                                        const std::string& source = "<text>");
std::string format_record(const CongruenceRecord& rec);

// Throws DataError when the recomputed index differs from the record.
CongruenceSubgroup build_subgroup(const CongruenceRecord& rec);

Invariants invariants(const GroupTable& H);

}  // namespace gl2
