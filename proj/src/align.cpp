#include "debugta/align.hpp"

#include <algorithm>
#include <set>

#include "debugta/lexer.hpp"

namespace debugta::align {

VariableMapping VariableMapping::inverse() const {
    VariableMapping inv;
    for (const auto& [from, to] : pairs) inv.pairs.emplace(to, from);
    return inv;
}

json to_json(const VariableMapping& m) {
    json j = json::object();
    for (const auto& [from, to] : m.pairs) j[from] = to;
    return j;
}

json to_json(const AlignedCode& a) {
    return json{{"mapping_used", to_json(a.mapping_used)},
                {"verified", a.verified},
                {"attempts", a.attempts},
                {"skipped", a.skipped},
                {"alignment_failed", a.alignment_failed},
                {"warnings", a.warnings}};
}

namespace {

// Names whose renaming breaks linkage or qualification regardless of scope.
bool is_reserved(std::string_view name) { return name == "main" || name == "std"; }

}  // namespace

ValidatedMapping validate_mapping(const ordered_json& proposal, std::string_view reference_code) {
    ValidatedMapping out;
    const auto ref_ids = lex::identifiers(reference_code);

    std::vector<std::pair<std::string, std::string>> kept;
    std::set<std::string> used_values;
    for (const auto& [key, value] : proposal.items()) {
        if (!value.is_string()) {
            out.warnings.push_back("dropped " + key + ": value is not a string");
            continue;
        }
        const auto to = value.get<std::string>();
        if (key == to) continue;
        if (!lex::is_valid_identifier(key) || lex::is_keyword(key) || is_reserved(key)) {
            out.warnings.push_back("dropped " + key + "->" + to + ": key is not a renamable identifier");
            continue;
        }
        if (!lex::is_valid_identifier(to) || lex::is_keyword(to) || is_reserved(to)) {
            out.warnings.push_back("dropped " + key + "->" + to + ": value is not a valid identifier");
            continue;
        }
        if (!ref_ids.contains(key)) {
            out.warnings.push_back("dropped " + key + "->" + to + ": key does not occur in reference");
            continue;
        }
        if (!used_values.insert(to).second) {
            out.warnings.push_back("dropped " + key + "->" + to + ": value already mapped (not injective)");
            continue;
        }
        kept.emplace_back(key, to);
    }

    // Capture check to a fixed point: dropping a pair can leave its key
    // unrenamed, which may in turn capture another pair's value.
    for (bool changed = true; changed;) {
        changed = false;
        std::set<std::string> keys;
        for (const auto& [k, v] : kept) keys.insert(k);
        for (auto it = kept.begin(); it != kept.end(); ++it) {
            if (ref_ids.contains(it->second) && !keys.contains(it->second)) {
                out.warnings.push_back("dropped " + it->first + "->" + it->second +
                                       ": value collides with an unrenamed identifier");
                kept.erase(it);
                changed = true;
                break;
            }
        }
    }
    for (auto& [k, v] : kept) out.mapping.pairs.emplace(std::move(k), std::move(v));
    return out;
}

std::string apply_mapping(std::string_view code, const VariableMapping& mapping) {
    if (mapping.empty()) return std::string(code);
    std::string out;
    out.reserve(code.size());
    std::size_t pos = 0;
    for (const auto& tok : lex::lex(code)) {
        out.append(code.substr(pos, tok.offset - pos));
        auto it = tok.kind == lex::TokenKind::identifier ? mapping.pairs.find(tok.text) : mapping.pairs.end();
        out.append(it != mapping.pairs.end() ? it->second : tok.text);
        pos = tok.offset + tok.text.size();
    }
    out.append(code.substr(pos));
    return out;
}

double identifier_jaccard(std::string_view a, std::string_view b) {
    const auto ia = lex::identifiers(a);
    const auto ib = lex::identifiers(b);
    if (ia.empty() && ib.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& id : ia) common += ib.contains(id) ? 1 : 0;
    return static_cast<double>(common) / static_cast<double>(ia.size() + ib.size() - common);
}

std::string Aligner::to_pseudocode(std::string_view code, std::string_view name) const {
    if (code.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw PreconditionError("to_pseudocode: empty code");
    }
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::to_pseudocode;
    req.slots = {{"code", std::string(code)}, {"name", std::string(name)}};
    return llm::complete_parsed(
        gateway_, req,
        [](const std::string& text) {
            const auto begin = text.find("\\begin{algorithm}");
            const auto end = text.find("\\end{algorithm}");
            if (begin != std::string::npos && end != std::string::npos && end > begin) {
                return text.substr(begin, end + std::string_view("\\end{algorithm}").size() - begin);
            }
            if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
                throw MalformedModelOutput("empty pseudocode");
            }
            return text;
        },
        "Reminder: output only the pseudocode inside \\begin{algorithm} ... \\end{algorithm}.");
}

ValidatedMapping Aligner::generate_mapping(std::string_view reference_pseudocode,
                                           std::string_view erroneous_pseudocode,
                                           std::string_view reference_code,
                                           const std::string& addendum) const {
    if (reference_pseudocode.empty() || erroneous_pseudocode.empty()) {
        throw PreconditionError("generate_mapping: empty pseudocode");
    }
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::var_mapping;
    req.slots = {{"reference_pseudocode", std::string(reference_pseudocode)},
                 {"erroneous_pseudocode", std::string(erroneous_pseudocode)}};
    req.addendum = addendum;
    try {
        const auto proposal = llm::complete_parsed(
            gateway_, req, [](const std::string& text) { return llm::extract_json(text); });
        return validate_mapping(proposal, reference_code);
    } catch (const MalformedModelOutput& e) {
        throw AlignmentFailed(std::string("variable mapping unparsable: ") + e.what());
    }
}

AlignedCode Aligner::align(const corpus::PoolEntry& reference, std::string_view erroneous,
                           const corpus::Problem& problem) const {
    AlignedCode result;
    result.code = reference.code;
    result.verified = true;  // the reference itself passed ingest verification

    if (identifier_jaccard(reference.code, erroneous) >= config_.skip_jaccard) {
        result.skipped = true;
        return result;
    }

    std::string pseudo_ref, pseudo_err;
    try {
        pseudo_ref = to_pseudocode(reference.code, problem.title);
        pseudo_err = to_pseudocode(erroneous, problem.title);
    } catch (const MalformedModelOutput& e) {
        result.alignment_failed = true;
        result.warnings.push_back(std::string("pseudocode conversion failed: ") + e.what());
        return result;
    }

    std::string addendum;
    for (int attempt = 1; attempt <= 1 + config_.max_retries; ++attempt) {
        result.attempts = attempt;
        ValidatedMapping proposal;
        try {
            proposal = generate_mapping(pseudo_ref, pseudo_err, reference.code, addendum);
        } catch (const AlignmentFailed& e) {
            result.warnings.push_back(e.what());
            addendum = "Note: the previous answer could not be parsed. Output only the JSON correspondence.";
            continue;
        }
        for (auto& w : proposal.warnings) result.warnings.push_back(std::move(w));
        if (proposal.mapping.empty()) {
            // Nothing to rename: the reference is already aligned.
            result.mapping_used = {};
            return result;
        }
        const auto renamed = apply_mapping(reference.code, proposal.mapping);
        const auto verdict = judge_.run_tests(renamed, problem);
        if (verdict.ac_all) {
            result.code = renamed;
            result.mapping_used = std::move(proposal.mapping);
            return result;
        }
        result.warnings.push_back("mapping " + to_json(proposal.mapping).dump() +
                                  " failed verification (ac_rate " + std::to_string(verdict.ac_rate) + ")");
        addendum = "Note: after applying the correspondence " + to_json(proposal.mapping).dump() +
                   " the correct code no longer passes its tests. Propose a corrected correspondence.";
    }
    result.code = reference.code;
    result.mapping_used = {};
    result.alignment_failed = true;
    return result;
}

}  // namespace debugta::align
