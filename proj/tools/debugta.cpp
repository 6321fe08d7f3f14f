// debugta: command-line entry point.
//
//   debugta ingest <dir>
//   debugta eval --dataset D --strategy S [--rounds T] [--backend cfg]
//   debugta agent --problem P --code F [--dataset D]
//   debugta plag --standard A --erroneous B --final C
//   debugta serve [--port N] [--dataset D]
//
// Exit codes: 0 success, 1 runtime failure (JSON on stderr), 2 usage error.

#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <iostream>

#include "debugta/app.hpp"
#include "debugta/plagiarism.hpp"
#include "debugta/service.hpp"

using namespace debugta;

namespace {

struct Options {
    std::string config_path;
    std::string backend_path;
    std::string mock_script;

    std::string ingest_dir;
    bool no_verify = false;

    std::string dataset;
    std::string strategy = "debugta";
    int rounds = 0;
    std::string run_id;
    std::string runs_dir;
    int workers = 0;

    std::string problem;
    std::string code_path;

    std::string standard, erroneous, final_code;
    double tau_sim = -1, tau_diff = -1;
    bool json_out = false;

    int port = 0;
    std::string host;
    std::string data_dir;
    std::string static_dir;
};

Config build_config(const Options& o) {
    Config c = o.config_path.empty() ? Config() : Config::load(o.config_path);
    if (!o.backend_path.empty()) c.merge(Config::load(o.backend_path));
    c.apply_env();
    if (!o.mock_script.empty()) {
        c.set("llm.backend", "mock");
        c.set("llm.mock_script", o.mock_script);
    }
    if (o.no_verify) c.set("corpus.verify_pools", "false");
    if (o.rounds > 0) c.set("session.max_rounds", std::to_string(o.rounds));
    if (o.workers > 0) c.set("eval.workers", std::to_string(o.workers));
    if (!o.runs_dir.empty()) c.set("eval.runs_dir", o.runs_dir);
    if (!o.dataset.empty()) c.set("dataset", o.dataset);
    if (o.port > 0) c.set("serve.port", std::to_string(o.port));
    if (!o.host.empty()) c.set("serve.host", o.host);
    if (!o.data_dir.empty()) c.set("serve.data_dir", o.data_dir);
    if (!o.static_dir.empty()) c.set("serve.static_dir", o.static_dir);
    return c;
}

std::string require_dataset(const Config& c) {
    auto d = c.get("dataset");
    if (d.empty()) throw ConfigError("no dataset given (--dataset or `dataset` in the config)");
    return d;
}

llm::Gateway make_gateway(const Config& c, const std::string& role) {
    return llm::Gateway(app::make_backend(c, role), app::gateway_options(c));
}

int cmd_ingest(const Options& o) {
    const auto c = build_config(o);
    judge::Judge judge(app::judge_config(c));
    const auto ds = app::load_dataset(c, o.ingest_dir, judge);
    json problems = json::array();
    for (const auto& p : ds.problems) {
        problems.push_back(json{{"id", p.id},
                                {"tests", p.tests.size()},
                                {"pool", p.pool.size()},
                                {"submissions", p.submissions.size()}});
    }
    std::cout << json{{"dataset", ds.id},
                      {"problems", problems},
                      {"pools_verified", ds.pools_verified},
                      {"report", ds.report}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_eval(const Options& o) {
    const auto c = build_config(o);
    const auto strategy = agent::strategy_from_string(o.strategy);
    judge::Judge judge(app::judge_config(c));
    const auto ds = app::load_dataset(c, require_dataset(c), judge);
    for (const auto& line : ds.report) std::cerr << "ingest: " << line << "\n";

    app::EvalOptions options;
    options.run_id = o.run_id;
    options.runs_dir = c.get("eval.runs_dir");
    options.workers = c.get_int("eval.workers");
    const auto result = app::run_eval(ds, make_gateway(c, "llm"), make_gateway(c, "student"), judge,
                                      app::agent_config(c), app::session_config(c, strategy),
                                      metrics::config_fingerprint(app::fingerprint_params(c, strategy)), options);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    const std::vector<metrics::RunReport> reports{result.report};
    std::cout << metrics::render_table(reports).markdown;
    std::cout << "report: " << (result.run_dir / "report.json").string() << "\n";
    return 0;
}

int cmd_agent(const Options& o) {
    const auto c = build_config(o);
    judge::Judge judge(app::judge_config(c));
    const auto ds = app::load_dataset(c, require_dataset(c), judge);
    const auto& problem = ds.at(o.problem);
    const auto code = read_file(o.code_path);
    const agent::DebugTA teacher(make_gateway(c, "llm"), judge, app::agent_config(c));
    const auto teaching = teacher.debug_and_teach(code, problem);
    json out = agent::to_json(teaching.suggestions);
    out["compile_report"] = judge::to_json(teaching.compile_report);
    if (teaching.reference) out["reference_id"] = teaching.reference->id;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_plag(const Options& o) {
    const auto c = build_config(o);
    plagiarism::PlagiarismConfig pc;
    pc.tau_sim = o.tau_sim >= 0 ? o.tau_sim : c.get_double("plag.tau_sim");
    pc.tau_diff = o.tau_diff >= 0 ? o.tau_diff : c.get_double("plag.tau_diff");
    auto v = plagiarism::plag_check(read_file(o.standard), read_file(o.erroneous), read_file(o.final_code), pc);
    v.reference_id = o.standard;
    if (o.json_out) {
        std::cout << plagiarism::to_json(v).dump(2) << "\n";
    } else {
        std::printf("plagiarized=%s branch=%d s_SF=%.4f s_EF=%.4f s_SE=%.4f\n", v.plagiarized ? "true" : "false",
                    static_cast<int>(v.branch), v.triple.s_sf, v.triple.s_ef, v.triple.s_se);
    }
    return 0;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const Options& o) {
    const auto c = build_config(o);
    judge::Judge judge(app::judge_config(c));
    const auto ds = app::load_dataset(c, require_dataset(c), judge);
    service::ServiceConfig sc;
    sc.data_dir = c.get("serve.data_dir");
    sc.round_cap = c.get_int("serve.round_cap");
    sc.token = c.get("serve.token");
    sc.static_dir = c.get("serve.static_dir");
    service::SessionService svc(ds, agent::DebugTA(make_gateway(c, "llm"), judge, app::agent_config(c)), judge, sc);

    httplib::Server server;
    svc.mount(server);
    g_server = &server;
    std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
    std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
    const auto host = c.get("serve.host");
    const auto port = c.get_int("serve.port");
    std::cerr << "serving " << ds.id << " on http://" << host << ":" << port << " (" << svc.session_count()
              << " stored sessions)\n";
    if (!server.listen(host, port)) throw EnvironmentError("cannot listen on " + host + ":" + std::to_string(port));
    return 0;
}

void fail(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Debugging-and-teaching agent: judge, retrieval, alignment, sessions, reports"};
    cli.require_subcommand(1);
    Options o;
    cli.add_option("--config", o.config_path, "configuration file")->check(CLI::ExistingFile);

    auto* ingest = cli.add_subcommand("ingest", "validate a dataset directory");
    ingest->add_option("dir", o.ingest_dir, "dataset root")->required();
    ingest->add_flag("--no-verify", o.no_verify, "skip compiling and running pool entries");

    auto* eval = cli.add_subcommand("eval", "run every submission of a dataset through teaching sessions");
    eval->add_option("--dataset", o.dataset, "dataset root");
    eval->add_option("--strategy", o.strategy, "debugta, direct_debug, debug_with_s, selfdebug_explain, selfdebug_trace, direct_teach");
    eval->add_option("--rounds", o.rounds, "maximum teaching rounds")->check(CLI::PositiveNumber);
    eval->add_option("--backend", o.backend_path, "backend configuration file")->check(CLI::ExistingFile);
    eval->add_option("--mock-script", o.mock_script, "use the mock backend with this script")->check(CLI::ExistingFile);
    eval->add_option("--run-id", o.run_id, "run directory name");
    eval->add_option("--runs-dir", o.runs_dir, "output root");
    eval->add_option("--workers", o.workers, "concurrent sessions")->check(CLI::PositiveNumber);
    eval->add_flag("--no-verify", o.no_verify, "skip pool verification");

    auto* ag = cli.add_subcommand("agent", "print suggestions for one program");
    ag->add_option("--problem", o.problem, "problem id")->required();
    ag->add_option("--code", o.code_path, "program file")->required()->check(CLI::ExistingFile);
    ag->add_option("--dataset", o.dataset, "dataset root");
    ag->add_option("--backend", o.backend_path, "backend configuration file")->check(CLI::ExistingFile);
    ag->add_option("--mock-script", o.mock_script, "use the mock backend with this script")->check(CLI::ExistingFile);
    ag->add_flag("--no-verify", o.no_verify, "skip pool verification");

    auto* plag = cli.add_subcommand("plag", "plagiarism verdict for one (standard, erroneous, final) triple");
    plag->add_option("--standard", o.standard, "reference solution")->required()->check(CLI::ExistingFile);
    plag->add_option("--erroneous", o.erroneous, "initial program")->required()->check(CLI::ExistingFile);
    plag->add_option("--final", o.final_code, "final program")->required()->check(CLI::ExistingFile);
    plag->add_option("--tau-sim", o.tau_sim, "similarity threshold")->check(CLI::Range(0.0, 1.0));
    plag->add_option("--tau-diff", o.tau_diff, "difference margin")->check(CLI::Range(0.0, 1.0));
    plag->add_flag("--json", o.json_out, "print the verdict as JSON");

    auto* serve = cli.add_subcommand("serve", "start the HTTP session service");
    serve->add_option("--port", o.port, "listen port")->check(CLI::Range(1, 65535));
    serve->add_option("--host", o.host, "bind address");
    serve->add_option("--dataset", o.dataset, "dataset root");
    serve->add_option("--data-dir", o.data_dir, "session storage");
    serve->add_option("--static", o.static_dir, "web UI directory");
    serve->add_option("--backend", o.backend_path, "backend configuration file")->check(CLI::ExistingFile);
    serve->add_option("--mock-script", o.mock_script, "use the mock backend with this script")->check(CLI::ExistingFile);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return 2;
    }

    try {
        if (*ingest) return cmd_ingest(o);
        if (*eval) return cmd_eval(o);
        if (*ag) return cmd_agent(o);
        if (*plag) return cmd_plag(o);
        if (*serve) return cmd_serve(o);
    } catch (const LoadError& e) {
        fail("load", e.what());
    } catch (const ConfigError& e) {
        fail("config", e.what());
    } catch (const EnvironmentError& e) {
        fail("environment", e.what());
    } catch (const GatewayError& e) {
        fail("gateway", e.what());
    } catch (const std::exception& e) {
        fail("runtime", e.what());
    }
    return 1;
}
