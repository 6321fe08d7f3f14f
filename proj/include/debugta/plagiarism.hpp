#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "debugta/judge.hpp"
#include "debugta/retrieval.hpp"

namespace debugta::plagiarism {

/// Total size of the matching blocks found by Ratcliff-Obershelp: take the
/// longest common contiguous block (earliest in `a`, then earliest in `b`),
/// recurse on the pieces to its left and right. No junk heuristics.
std::size_t matched_length(std::span<const std::string> a, std::span<const std::string> b);

/// 2M / (|a| + |b|); 1.0 when both are empty.
double seq_ratio(std::span<const std::string> a, std::span<const std::string> b);
double seq_ratio(const retrieval::TokenSequence& a, const retrieval::TokenSequence& b);

struct SimilarityTriple {
    double s_sf = 0.0;  // standard vs final
    double s_ef = 0.0;  // erroneous vs final
    double s_se = 0.0;  // standard vs erroneous
};

struct PlagiarismConfig {
    double tau_sim = 0.8;
    double tau_diff = 0.1;
};

/// Which rule decided the verdict; rules are tried in this order.
enum class Branch {
    reference_close_to_erroneous = 1,  // s_SE > tau_sim: not plagiarized
    final_tracks_erroneous = 2,        // s_EF > tau_sim or s_EF > s_SF: not plagiarized
    final_copies_reference = 3,        // s_SF > tau_sim or s_SF > s_EF + tau_diff: plagiarized
    no_evidence = 4,                   // otherwise: not plagiarized
    no_reference = 0,                  // no standard code was available; not evaluated
};

std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

struct PlagiarismVerdict {
    bool plagiarized = false;
    SimilarityTriple triple;
    Branch branch = Branch::no_evidence;
    PlagiarismConfig config;
    std::string reference_id;  // which S* was compared
};

json to_json(const PlagiarismVerdict& v);
PlagiarismVerdict verdict_from_json(const json& j);

/// The decision table alone, for a precomputed triple.
PlagiarismVerdict decide(const SimilarityTriple& triple, const PlagiarismConfig& config);

PlagiarismVerdict plag_check(std::string_view standard, std::string_view erroneous,
                             std::string_view final_code, const PlagiarismConfig& config = {},
                             const retrieval::Tokenizer& tokenizer = retrieval::lexical_tokenizer());

/// Plagiarized results score 0 / not-all-AC; originals kept for audit.
judge::JudgeResult apply_plag_zeroing(judge::JudgeResult result, const PlagiarismVerdict& verdict);

}  // namespace debugta::plagiarism
