#include "debugta/plagiarism.hpp"

#include <algorithm>
#include <array>
#include <string_view>
#include <vector>

namespace debugta::plagiarism {

namespace {

struct Block {
    std::size_t i = 0, j = 0, size = 0;
};

// Per-thread buffers, reused across calls.
struct Scratch {
    std::vector<std::pair<std::string_view, std::size_t>> order;
    std::vector<int> ids;
    std::vector<std::size_t> occ_begin;  // positions in b of token t: occ[occ_begin[t], occ_begin[t+1])
    std::vector<std::size_t> occ;
    std::vector<std::size_t> run;   // run[j]: length of the match ending at (row[j], j)
    std::vector<long long> row;
    long long generation = 0;
    std::vector<std::array<std::size_t, 4>> todo;
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

// Equal tokens get equal ids in [0, distinct). a occupies ids[0, |a|), b the
// rest. Returns the number of distinct tokens.
int intern(std::span<const std::string> a, std::span<const std::string> b, Scratch& s) {
    const std::size_t n = a.size() + b.size();
    auto at = [&](std::size_t k) -> std::string_view { return k < a.size() ? a[k] : b[k - a.size()]; };
    s.ids.resize(n);
    s.order.clear();
    if (n <= 64) {
        // Short inputs: a linear scan over the distinct tokens beats sorting.
        for (std::size_t k = 0; k < n; ++k) {
            const auto tok = at(k);
            std::size_t d = 0;
            while (d < s.order.size() && s.order[d].first != tok) ++d;
            if (d == s.order.size()) s.order.emplace_back(tok, d);
            s.ids[k] = static_cast<int>(d);
        }
        return static_cast<int>(s.order.size());
    }
    for (std::size_t k = 0; k < n; ++k) s.order.emplace_back(at(k), k);
    std::sort(s.order.begin(), s.order.end());
    int next = -1;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0 || s.order[k].first != s.order[k - 1].first) ++next;
        s.ids[s.order[k].second] = next;
    }
    return next + 1;
}

void index_positions(const int* b, std::size_t nb, int distinct, Scratch& s) {
    s.occ_begin.assign(static_cast<std::size_t>(distinct) + 1, 0);
    for (std::size_t j = 0; j < nb; ++j) ++s.occ_begin[static_cast<std::size_t>(b[j]) + 1];
    for (int t = 0; t < distinct; ++t) s.occ_begin[t + 1] += s.occ_begin[t];
    s.occ.resize(nb);
    std::vector<std::size_t>& fill = s.run;  // borrowed as a cursor array
    fill.assign(s.occ_begin.begin(), s.occ_begin.end() - 1);
    for (std::size_t j = 0; j < nb; ++j) s.occ[fill[b[j]]++] = j;
    s.run.assign(nb, 0);
    s.row.assign(nb, 0);
}

// Longest common contiguous run in a[alo,ahi) x b[blo,bhi); the earliest start
// in a wins, then the earliest in b. Each row only visits the positions in b
// holding the same token, right to left so run[j - 1] still belongs to the
// previous row when it is read.
Block longest_match(const int* a, std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi,
                    Scratch& s) {
    Block best{alo, blo, 0};
    const std::size_t longest_possible = std::min(ahi - alo, bhi - blo);
    s.generation += 2;  // rows of earlier calls never look adjacent
    for (std::size_t i = alo; i < ahi && best.size < longest_possible; ++i) {
        const long long g = s.generation + static_cast<long long>(i - alo);
        const std::size_t* first = s.occ.data() + s.occ_begin[a[i]];
        const std::size_t* last = s.occ.data() + s.occ_begin[a[i] + 1];
        first = std::lower_bound(first, last, blo);
        last = std::lower_bound(first, last, bhi);
        for (const std::size_t* p = last; p != first;) {
            const std::size_t j = *--p;
            const std::size_t k = (j > blo && s.row[j - 1] == g - 1) ? s.run[j - 1] + 1 : 1;
            s.run[j] = k;
            s.row[j] = g;
            const std::size_t si = i + 1 - k;
            if (k > best.size || (k == best.size && si == best.i && j + 1 - k < best.j)) {
                best = Block{si, j + 1 - k, k};
            }
        }
    }
    s.generation += static_cast<long long>(ahi - alo);
    return best;
}

}  // namespace

std::size_t matched_length(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) return 0;
    auto& s = scratch();
    const int distinct = intern(a, b, s);
    const int* ia = s.ids.data();
    index_positions(s.ids.data() + a.size(), b.size(), distinct, s);

    std::size_t total = 0;
    s.todo.clear();
    s.todo.push_back({0, a.size(), 0, b.size()});
    while (!s.todo.empty()) {
        const auto [alo, ahi, blo, bhi] = s.todo.back();
        s.todo.pop_back();
        if (alo >= ahi || blo >= bhi) continue;
        const auto m = longest_match(ia, alo, ahi, blo, bhi, s);
        if (m.size == 0) continue;
        total += m.size;
        s.todo.push_back({alo, m.i, blo, m.j});
        s.todo.push_back({m.i + m.size, ahi, m.j + m.size, bhi});
    }
    return total;
}

double seq_ratio(std::span<const std::string> a, std::span<const std::string> b) {
    const auto length = a.size() + b.size();
    if (length == 0) return 1.0;
    return 2.0 * static_cast<double>(matched_length(a, b)) / static_cast<double>(length);
}

double seq_ratio(const retrieval::TokenSequence& a, const retrieval::TokenSequence& b) {
    return seq_ratio(a.tokens, b.tokens);
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::reference_close_to_erroneous: return "reference_close_to_erroneous";
        case Branch::final_tracks_erroneous: return "final_tracks_erroneous";
        case Branch::final_copies_reference: return "final_copies_reference";
        case Branch::no_evidence: return "no_evidence";
        case Branch::no_reference: return "no_reference";
    }
    return "no_evidence";
}

Branch branch_from_string(const std::string& s) {
    for (auto b : {Branch::reference_close_to_erroneous, Branch::final_tracks_erroneous,
                   Branch::final_copies_reference, Branch::no_evidence, Branch::no_reference}) {
        if (to_string(b) == s) return b;
    }
    throw Error("unknown plagiarism branch: " + s);
}

json to_json(const PlagiarismVerdict& v) {
    return json{{"plagiarized", v.plagiarized},
                {"branch", to_string(v.branch)},
                {"s_SF", v.triple.s_sf},
                {"s_EF", v.triple.s_ef},
                {"s_SE", v.triple.s_se},
                {"tau_sim", v.config.tau_sim},
                {"tau_diff", v.config.tau_diff},
                {"reference_id", v.reference_id}};
}

PlagiarismVerdict verdict_from_json(const json& j) {
    PlagiarismVerdict v;
    v.plagiarized = j.at("plagiarized").get<bool>();
    v.branch = branch_from_string(j.at("branch").get<std::string>());
    v.triple = {j.at("s_SF").get<double>(), j.at("s_EF").get<double>(), j.at("s_SE").get<double>()};
    v.config = {j.at("tau_sim").get<double>(), j.at("tau_diff").get<double>()};
    v.reference_id = j.value("reference_id", std::string{});
    return v;
}

PlagiarismVerdict decide(const SimilarityTriple& t, const PlagiarismConfig& config) {
    PlagiarismVerdict v;
    v.triple = t;
    v.config = config;
    if (t.s_se > config.tau_sim) {
        v.branch = Branch::reference_close_to_erroneous;
    } else if (t.s_ef > config.tau_sim || t.s_ef > t.s_sf) {
        v.branch = Branch::final_tracks_erroneous;
    } else if (t.s_sf > config.tau_sim || t.s_sf > t.s_ef + config.tau_diff) {
        v.branch = Branch::final_copies_reference;
        v.plagiarized = true;
    } else {
        v.branch = Branch::no_evidence;
    }
    return v;
}

PlagiarismVerdict plag_check(std::string_view standard, std::string_view erroneous,
                             std::string_view final_code, const PlagiarismConfig& config,
                             const retrieval::Tokenizer& tokenizer) {
    const auto ts = tokenizer.split(standard);
    const auto te = tokenizer.split(erroneous);
    const auto tf = tokenizer.split(final_code);
    return decide(SimilarityTriple{seq_ratio(ts, tf), seq_ratio(te, tf), seq_ratio(ts, te)}, config);
}

judge::JudgeResult apply_plag_zeroing(judge::JudgeResult result, const PlagiarismVerdict& verdict) {
    if (!verdict.plagiarized) return result;
    result.original_ac_rate = result.ac_rate;
    result.original_ac_all = result.ac_all;
    result.ac_rate = 0.0;
    result.ac_all = false;
    return result;
}

}  // namespace debugta::plagiarism
