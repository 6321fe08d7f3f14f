#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "debugta/corpus.hpp"
#include "debugta/judge.hpp"
#include "debugta/llm.hpp"

namespace debugta::align {

/// Identifier in the reference program -> identifier in the student program.
struct VariableMapping {
    std::map<std::string, std::string> pairs;

    bool empty() const { return pairs.empty(); }
    VariableMapping inverse() const;
};

json to_json(const VariableMapping& m);

struct ValidatedMapping {
    VariableMapping mapping;
    std::vector<std::string> warnings;  // one per dropped pair
};

/// Keeps the proposed pairs (in the order given) that satisfy: both sides
/// are non-keyword identifiers, the key occurs in `reference_code`, values
/// are pairwise distinct (first proposal wins), and no value equals an
/// identifier of the reference that stays unrenamed. Identity pairs are
/// dropped silently.
ValidatedMapping validate_mapping(const ordered_json& proposal, std::string_view reference_code);

/// Parallel, whole-token renaming. String and character literals, comments
/// and `#include <...>` header names are left untouched.
std::string apply_mapping(std::string_view code, const VariableMapping& mapping);

/// |ids(a) ∩ ids(b)| / |ids(a) ∪ ids(b)| over non-keyword identifiers; 1.0
/// when both are empty.
double identifier_jaccard(std::string_view a, std::string_view b);

struct AlignConfig {
    int max_retries = 2;        // fresh mapping requests after the first
    double skip_jaccard = 0.8;  // skip alignment when overlap >= this
};

struct AlignedCode {
    std::string code;
    VariableMapping mapping_used;
    bool verified = false;
    int attempts = 0;               // mapping requests issued
    bool skipped = false;           // names already close enough
    bool alignment_failed = false;  // fell back to the unmodified reference
    std::vector<std::string> warnings;
};

json to_json(const AlignedCode& a);

class Aligner {
public:
    Aligner(llm::Gateway gateway, judge::Judge& judge, AlignConfig config = {})
        : gateway_(std::move(gateway)), judge_(judge), config_(config) {}

    /// Throws PreconditionError for empty code; MalformedModelOutput when
    /// the reply stays empty after re-asks.
    std::string to_pseudocode(std::string_view code, std::string_view name) const;

    /// Throws PreconditionError for empty inputs and AlignmentFailed when the
    /// reply is not a JSON object after re-asks.
    ValidatedMapping generate_mapping(std::string_view reference_pseudocode,
                                      std::string_view erroneous_pseudocode,
                                      std::string_view reference_code,
                                      const std::string& addendum = {}) const;

    /// Pseudocode both programs, request a mapping, rename, and verify the
    /// renamed reference on the problem's tests. Failed verification asks for
    /// a fresh mapping up to max_retries times; on exhaustion the unmodified
    /// (already verified) reference is returned. Only gateway errors escape.
    AlignedCode align(const corpus::PoolEntry& reference, std::string_view erroneous,
                      const corpus::Problem& problem) const;

private:
    llm::Gateway gateway_;
    judge::Judge& judge_;
    AlignConfig config_;
};

}  // namespace debugta::align
