#include "debugta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace debugta::metrics {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

json to_json(const RunReport& r) {
    json curve = json::array();
    for (const auto& [round, value] : r.per_round_curve) curve.push_back(json{{"round", round}, {"ac_rate_mean", value}});
    return json{{"dataset_id", r.dataset_id},
                {"strategy_id", r.strategy_id},
                {"n_problems", r.n_problems},
                {"ac_rate_mean", r.ac_rate_mean},
                {"ac_all_rate", r.ac_all_rate},
                {"plag_rate", r.plag_rate},
                {"tokens_total", r.tokens_total},
                {"per_round_curve", curve},
                {"curve_convention", r.curve_convention},
                {"config_fingerprint", r.config_fingerprint}};
}

RunReport report_from_json(const json& j) {
    RunReport r;
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.strategy_id = j.at("strategy_id").get<std::string>();
    r.n_problems = j.at("n_problems").get<int>();
    r.ac_rate_mean = j.at("ac_rate_mean").get<double>();
    r.ac_all_rate = j.at("ac_all_rate").get<double>();
    r.plag_rate = j.at("plag_rate").get<double>();
    r.tokens_total = j.at("tokens_total").get<long long>();
    for (const auto& p : j.at("per_round_curve")) {
        r.per_round_curve.emplace_back(p.at("round").get<int>(), p.at("ac_rate_mean").get<double>());
    }
    r.curve_convention = j.value("curve_convention", std::string(kCurveConvention));
    r.config_fingerprint = j.value("config_fingerprint", "");
    return r;
}

namespace {

// Summing in sorted order keeps the mean independent of transcript order.
double sorted_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
}

}  // namespace

RunReport aggregate(std::span<const sim::SessionTranscript> transcripts, const std::string& dataset_id) {
    if (transcripts.empty()) throw PreconditionError("aggregate: no transcripts");
    RunReport r;
    r.dataset_id = dataset_id;
    r.strategy_id = transcripts.front().strategy;
    r.n_problems = static_cast<int>(transcripts.size());

    std::set<std::string> fingerprints;
    int max_rounds = 0;
    std::vector<double> finals;
    int ac_all = 0, plag = 0;
    for (const auto& t : transcripts) {
        if (t.strategy != r.strategy_id) throw PreconditionError("aggregate: transcripts mix strategies");
        finals.push_back(t.final_judge.ac_rate);
        ac_all += t.final_judge.ac_all ? 1 : 0;
        plag += t.plagiarism.plagiarized ? 1 : 0;
        r.tokens_total += t.tokens.total();
        max_rounds = std::max(max_rounds, t.max_rounds);
        fingerprints.insert(t.config_fingerprint);
    }
    const double n = static_cast<double>(transcripts.size());
    r.ac_rate_mean = round2(sorted_sum(finals) / n);
    r.ac_all_rate = round2(100.0 * ac_all / n);
    r.plag_rate = round2(100.0 * plag / n);
    r.config_fingerprint = fingerprints.size() == 1 ? *fingerprints.begin() : "mixed";

    // Best-so-far, carried forward past the last executed round.
    std::vector<std::vector<double>> per_round(static_cast<std::size_t>(max_rounds) + 1);
    for (const auto& t : transcripts) {
        double best = t.initial_judge.ac_rate;
        std::size_t next = 0;
        for (int round = 0; round <= max_rounds; ++round) {
            while (next < t.rounds.size() && t.rounds[next].round_index <= round) {
                best = std::max(best, t.rounds[next].judge_result.ac_rate);
                ++next;
            }
            per_round[static_cast<std::size_t>(round)].push_back(best);
        }
    }
    for (int round = 0; round <= max_rounds; ++round) {
        r.per_round_curve.emplace_back(round, round2(sorted_sum(per_round[static_cast<std::size_t>(round)]) / n));
    }
    return r;
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

Table render_table(std::span<const RunReport> reports) {
    std::vector<std::string> datasets, strategies;
    std::map<std::pair<std::string, std::string>, const RunReport*> cell;
    std::set<std::string> fingerprints;
    for (const auto& r : reports) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset_id) == datasets.end()) datasets.push_back(r.dataset_id);
        if (std::find(strategies.begin(), strategies.end(), r.strategy_id) == strategies.end()) {
            strategies.push_back(r.strategy_id);
        }
        cell[{r.strategy_id, r.dataset_id}] = &r;
        fingerprints.insert(r.config_fingerprint);
    }
    const bool mismatch = fingerprints.size() > 1;

    Table table;
    table.data = json{{"datasets", datasets}, {"rows", json::array()}, {"fingerprint_mismatch", mismatch}};
    for (const auto& s : strategies) {
        json row{{"strategy", s}, {"cells", json::object()}};
        for (const auto& d : datasets) {
            auto it = cell.find({s, d});
            if (it == cell.end()) {
                row["cells"][d] = nullptr;
                continue;
            }
            row["cells"][d] = json{{"ac_rate", it->second->ac_rate_mean},
                                   {"ac_all", it->second->ac_all_rate},
                                   {"plag", it->second->plag_rate},
                                   {"config_fingerprint", it->second->config_fingerprint}};
        }
        table.data["rows"].push_back(std::move(row));
    }

    std::string md = "| Strategy |";
    std::string rule = "|---|";
    for (const auto& d : datasets) {
        const auto label = d.empty() ? std::string("dataset") : d;
        md += " " + label + " AC Rate | " + label + " AC@all | " + label + " Plag. |";
        rule += "---:|---:|---:|";
    }
    md += "\n" + rule + "\n";
    for (const auto& row : table.data["rows"]) {
        md += "| " + row["strategy"].get<std::string>() + (mismatch ? "*" : "") + " |";
        for (const auto& d : datasets) {
            const auto& c = row["cells"][d];
            if (c.is_null()) {
                md += " - | - | - |";
            } else {
                md += " " + fixed2(c["ac_rate"].get<double>()) + " | " + fixed2(c["ac_all"].get<double>()) + " | " +
                      fixed2(c["plag"].get<double>()) + " |";
            }
        }
        md += "\n";
    }
    if (mismatch) {
        md += "\n\\* Reports were produced with different configurations (fingerprints:";
        for (const auto& f : fingerprints) md += " " + (f.empty() ? std::string("<none>") : f.substr(0, 12));
        md += "); rows are not directly comparable.\n";
    }
    table.markdown = std::move(md);
    return table;
}

std::string config_fingerprint(const json& params) { return sha256_hex(params.dump()); }

}  // namespace debugta::metrics
