#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "arc/datapipe.hpp"
#include "arc/errors.hpp"
#include "arc/evaluation.hpp"
#include "arc/runtime.hpp"

namespace fs = std::filesystem;
using arc::json;

namespace {

// ── Config ─────────────────────────────────────────────────────────────

struct BackendSpec {
    std::string type;  // "scripted" or "http"
    std::string script_path;
    arc::HttpBackendConfig http;
};

struct RunConfig {
    arc::BudgetConfig budget;
    arc::ManagementPolicy policy;
    arc::CmCapabilities caps = arc::CmCapabilities::full();
    std::uint64_t seed = 0;
    BackendSpec actor_backend;
    BackendSpec cm_backend;
    std::string corpus_path;
    std::string templates_dir;
    int search_top_k = 5;
};

arc::CmCapabilities caps_from_name(const std::string& name) {
    if (name == "full") return arc::CmCapabilities::full();
    if (name == "summary") return arc::CmCapabilities::summary_only();
    if (name == "summary_checklist") return arc::CmCapabilities::summary_checklist();
    if (name == "reflection_checklist_only")
        return arc::CmCapabilities::reflection_checklist_only();
    if (name == "none") return arc::CmCapabilities::none();
    throw arc::ConfigError("unknown capability set: " + name);
}

BackendSpec parse_backend_spec(const json& j) {
    BackendSpec spec;
    spec.type = j.at("type").get<std::string>();
    if (spec.type == "scripted") {
        spec.script_path = j.at("script").get<std::string>();
    } else if (spec.type == "http") {
        spec.http.endpoint = j.at("endpoint").get<std::string>();
        spec.http.model = j.at("model").get<std::string>();
        spec.http.api_key_env = j.value("api_key_env", spec.http.api_key_env);
        spec.http.max_retries = j.value("max_retries", spec.http.max_retries);
    } else {
        throw arc::ConfigError("unknown backend type: " + spec.type);
    }
    return spec;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw arc::ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw arc::ConfigError(std::string("bad config JSON: ") + e.what());
    }

    RunConfig cfg;
    if (j.contains("budget")) {
        const auto& b = j["budget"];
        cfg.budget.max_context_tokens = b.value("max_context_tokens", 32000);
        cfg.budget.max_turns = b.value("max_turns", 80);
        cfg.budget.observation_cap_tokens = b.value("observation_cap_tokens", 2048);
        cfg.budget.forced_answer_reserve_tokens =
            b.value("forced_answer_reserve_tokens", 1024);
    }
    if (j.contains("policy")) {
        const auto& p = j["policy"];
        cfg.policy.kind = arc::policy_kind_from_string(p.at("kind").get<std::string>());
        cfg.policy.k = p.value("k", 0);
        cfg.policy.threshold_tokens = p.value("threshold_tokens", 0L);
    }
    if (j.contains("caps")) {
        if (j["caps"].is_string()) {
            cfg.caps = caps_from_name(j["caps"].get<std::string>());
        } else {
            const auto& c = j["caps"];
            cfg.caps.summarize = c.value("summarize", true);
            cfg.caps.checklist_updates = c.value("checklist_updates", true);
            cfg.caps.memory_revision = c.value("memory_revision", true);
            cfg.caps.reflection = c.value("reflection", true);
        }
    }
    cfg.seed = j.value("seed", 0ULL);
    if (j.contains("actor_backend")) cfg.actor_backend = parse_backend_spec(j["actor_backend"]);
    if (j.contains("cm_backend")) cfg.cm_backend = parse_backend_spec(j["cm_backend"]);
    cfg.corpus_path = j.value("corpus", "");
    cfg.templates_dir = j.value("templates_dir", "");
    cfg.search_top_k = j.value("search_top_k", 5);
    if (cfg.policy.kind == arc::ManagementPolicy::Kind::react_raw)
        cfg.caps = arc::CmCapabilities::none();
    return cfg;
}

std::shared_ptr<arc::Backend> make_backend(const BackendSpec& spec) {
    if (spec.type == "scripted")
        return std::make_shared<arc::ScriptedBackend>(
            arc::ScriptedBackend::from_jsonl_file(spec.script_path));
    if (spec.type == "http") return std::make_shared<arc::HttpBackend>(spec.http);
    throw arc::ConfigError("backend not configured");
}

arc::EpisodeConfig make_episode_config(const RunConfig& cfg,
                                       std::shared_ptr<arc::ToolEnvironment> env,
                                       int trial = 0) {
    arc::EpisodeConfig ep;
    ep.budget = cfg.budget;
    ep.policy = cfg.policy;
    ep.caps = cfg.caps;
    ep.seed = cfg.seed + static_cast<std::uint64_t>(trial);
    // scripted backends are per-episode so parallel trials stay deterministic
    if (!cfg.actor_backend.type.empty()) ep.actor_backend = make_backend(cfg.actor_backend);
    if (!cfg.cm_backend.type.empty()) ep.cm_backend = make_backend(cfg.cm_backend);
    ep.environment = std::move(env);
    if (!cfg.templates_dir.empty()) ep.templates = arc::Templates::load_dir(cfg.templates_dir);
    ep.search_top_k = cfg.search_top_k;
    return ep;
}

std::shared_ptr<arc::ToolEnvironment> make_environment(const RunConfig& cfg) {
    if (cfg.corpus_path.empty()) throw arc::ConfigError("no corpus configured");
    auto index = std::make_shared<arc::SearchIndex>(
        arc::SearchIndex::build_from_jsonl_file(cfg.corpus_path));
    return std::make_shared<arc::OfflineEnvironment>(index);
}

std::vector<arc::Query> load_queries(const std::string& query_text,
                                     const std::string& queries_file) {
    std::vector<arc::Query> queries;
    if (!query_text.empty()) {
        queries.push_back({"q1", query_text, std::nullopt});
        return queries;
    }
    if (queries_file.empty())
        throw arc::ConfigError("provide --query or --queries-file");
    std::ifstream in(queries_file);
    if (!in) throw arc::ConfigError("cannot open queries file: " + queries_file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            queries.push_back(json::parse(line).get<arc::Query>());
        } catch (const json::exception& e) {
            throw arc::ConfigError("bad query line " + std::to_string(lineno) + ": " +
                                   e.what());
        }
    }
    if (queries.empty()) throw arc::ConfigError("no queries in " + queries_file);
    return queries;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

std::vector<arc::Trajectory> read_trajectory_dir(const std::string& in_path,
                                                 std::vector<std::string>* files = nullptr) {
    std::vector<std::string> paths;
    if (fs::is_directory(in_path)) {
        for (const auto& entry : fs::directory_iterator(in_path))
            if (entry.path().extension() == ".jsonl") paths.push_back(entry.path().string());
        std::sort(paths.begin(), paths.end());
    } else {
        paths.push_back(in_path);
    }
    std::vector<arc::Trajectory> trajs;
    for (const auto& p : paths) {
        trajs.push_back(arc::read_trajectory(p));
        if (files) files->push_back(p);
    }
    return trajs;
}

json pass_metrics(const std::vector<arc::Trajectory>& trajs, int trials) {
    // group by query id preserving first-seen order; trial index = arrival order
    std::vector<std::string> order;
    std::map<std::string, std::vector<bool>> by_query;
    int gold_count = 0;
    for (const auto& traj : trajs) {
        if (!traj.query.gold_answer) continue;
        ++gold_count;
        if (!by_query.count(traj.query.id)) order.push_back(traj.query.id);
        by_query[traj.query.id].push_back(
            arc::judge_exact(traj.final_answer, *traj.query.gold_answer));
    }
    json metrics;
    if (gold_count == 0) return metrics;
    std::vector<std::vector<bool>> matrix;
    for (const auto& id : order) matrix.push_back(by_query[id]);
    metrics["pass1"] = arc::pass_at_k(matrix, 1);
    if (trials >= 3) metrics["pass3"] = arc::pass_at_k(matrix, 3);
    return metrics;
}

// ── Demo fixtures (fully offline) ──────────────────────────────────────

const char* kDemoCorpus = R"(
{"doc_id":"d1","title":"Aurora Falls Railway","body":"The Aurora Falls Railway is a mountain rack railway completed in 1912. Its winding route above the falls was designed by the engineer Mira Voss, whose survey work took three summers."}
{"doc_id":"d2","title":"Mira Voss","body":"Mira Voss was a railway engineer best known for designing the Aurora Falls Railway. After leaving railway work she founded the Larkspur Observatory in 1921 on the ridge above the falls."}
{"doc_id":"d3","title":"Larkspur Observatory","body":"The Larkspur Observatory is a small astronomical observatory founded in 1921 by Mira Voss. It sits on the ridge above Aurora Falls and is known for its early comet surveys."}
{"doc_id":"d4","title":"Granite Pass Tramway","body":"The Granite Pass Tramway is an aerial tramway opened in 1935. It is unrelated to the Aurora Falls Railway and was designed by a committee of municipal engineers."}
)";

std::string demo_query_text() {
    return "Which observatory was founded by the engineer who designed the Aurora Falls "
           "Railway?";
}

std::string action_line(const std::string& tool, const std::string& argument) {
    json j{{"tool", tool}, {"argument", argument}};
    return "ACTION: " + j.dump();
}

std::shared_ptr<arc::ScriptedBackend> demo_actor_script() {
    auto backend = std::make_shared<arc::ScriptedBackend>();
    using arc::RoleTag;
    backend->push(RoleTag::actor, "I should find who designed the railway.\n" +
                                      action_line("search", "Aurora Falls Railway engineer"));
    backend->push(RoleTag::actor, "The results mention a designer; searching again.\n" +
                                      action_line("search", "aurora falls railway designer"));
    backend->push(RoleTag::actor, "Still not certain, repeating the search.\n" +
                                      action_line("search", "aurora falls railway designer"));
    backend->push(RoleTag::actor, "One more try with the same query.\n" +
                                      action_line("search", "aurora falls railway designer"));
    backend->push(RoleTag::actor,
                  "The checklist now says to read the Mira Voss page directly.\n" +
                      action_line("visit", "d2"));
    backend->push(RoleTag::actor,
                  "Mira Voss founded the Larkspur Observatory in 1921.\n" +
                      action_line("answer", "Larkspur Observatory"));
    return backend;
}

std::shared_ptr<arc::ScriptedBackend> demo_cm_script() {
    auto backend = std::make_shared<arc::ScriptedBackend>();
    using arc::RoleTag;
    backend->push(RoleTag::cm_summarize,
                  "1. Identify the engineer who designed the Aurora Falls Railway\n"
                  "2. Find what that engineer founded\n"
                  "3. Confirm it is an observatory");
    auto summary = [](const std::string& entry, bool reflect) {
        json j{{"new_entry", entry}, {"reflection_needed", reflect}, {"reasons", json::array()}};
        if (reflect) j["reasons"].push_back("repeated searches with no new evidence");
        return j.dump();
    };
    backend->push(RoleTag::cm_summarize,
                  summary("Searched for the railway engineer; results point to Mira Voss.",
                          false));
    backend->push(RoleTag::cm_summarize,
                  summary("Repeated the designer search; same results as before.", false));
    backend->push(RoleTag::cm_summarize,
                  summary("Searched the same designer query again without new evidence.",
                          true));
    json reflect_reply{
        {"memory_entries",
         json::array({{{"turn_start", 1},
                       {"turn_end", 3},
                       {"text",
                        "Three searches all identified Mira Voss as the railway designer "
                        "but produced nothing new; the open question is what she "
                        "founded."}}})},
        {"checklist",
         json::array({{{"description", "Visit the Mira Voss page directly"},
                       {"status", "in_progress"}},
                      {{"description", "Name the observatory she founded"},
                       {"status", "pending"}}})}};
    backend->push(RoleTag::cm_reflect, reflect_reply.dump());
    backend->push(RoleTag::cm_summarize,
                  summary("Visited the Mira Voss page: she founded the Larkspur "
                          "Observatory in 1921.",
                          false));
    return backend;
}

int cmd_demo(const std::string& out_dir) {
    fs::create_directories(out_dir);
    auto index = std::make_shared<arc::SearchIndex>(arc::SearchIndex::build([] {
        std::vector<arc::CorpusDocument> corpus;
        std::istringstream in(kDemoCorpus);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            corpus.push_back({j["doc_id"], j["title"], j["body"]});
        }
        return corpus;
    }()));

    arc::Query q{"demo", demo_query_text(), std::string("Larkspur Observatory")};

    arc::EpisodeConfig cfg;
    cfg.policy.kind = arc::ManagementPolicy::Kind::arc_per_turn;
    cfg.caps = arc::CmCapabilities::full();
    cfg.actor_backend = demo_actor_script();
    cfg.cm_backend = demo_cm_script();
    cfg.environment = std::make_shared<arc::OfflineEnvironment>(index);

    arc::Trajectory traj = arc::run_episode(q, cfg);
    std::string arc_path = (fs::path(out_dir) / "demo_arc.jsonl").string();
    arc::write_trajectory(traj, arc_path);
    std::cout << "arc episode: " << traj.turns.size() << " turns, "
              << traj.totals.reflections << " reflection(s), outcome "
              << arc::to_string(traj.outcome) << ", answer \"" << traj.final_answer
              << "\" -> " << arc_path << "\n";

    // forced-answer episode: the actor never answers within the turn cap
    arc::EpisodeConfig forced_cfg = cfg;
    forced_cfg.budget.max_turns = 3;
    auto actor = std::make_shared<arc::ScriptedBackend>();
    actor->push(arc::RoleTag::actor,
                "Searching.\n" + action_line("search", "Aurora Falls Railway engineer"));
    actor->push(arc::RoleTag::actor,
                "Searching again.\n" + action_line("search", "Mira Voss observatory"));
    actor->push(arc::RoleTag::actor,
                "Out of budget; best answer from evidence so far.\n" +
                    action_line("answer", "Larkspur Observatory"));
    auto cm = std::make_shared<arc::ScriptedBackend>();
    cm->push(arc::RoleTag::cm_summarize, "1. Find the engineer\n2. Find the observatory\n3. Verify");
    json s{{"new_entry", "Searched for the engineer; results point to Mira Voss."},
           {"reflection_needed", false},
           {"reasons", json::array()}};
    cm->push(arc::RoleTag::cm_summarize, s.dump());
    forced_cfg.actor_backend = actor;
    forced_cfg.cm_backend = cm;

    arc::Trajectory forced = arc::run_episode(q, forced_cfg);
    std::string forced_path = (fs::path(out_dir) / "demo_forced.jsonl").string();
    arc::write_trajectory(forced, forced_path);
    std::cout << "forced episode: " << forced.turns.size() << " turns, outcome "
              << arc::to_string(forced.outcome) << " -> " << forced_path << "\n";

    if (traj.totals.reflections < 1 || traj.outcome != arc::Outcome::answered) {
        std::cerr << "demo episode did not behave as expected\n";
        return 2;
    }
    return 0;
}

// ── Subcommands ────────────────────────────────────────────────────────

int cmd_run(const RunConfig& cfg, const std::vector<arc::Query>& queries,
            const std::string& out) {
    auto env = make_environment(cfg);
    if (queries.size() == 1 && !fs::is_directory(out)) {
        arc::Trajectory traj = arc::run_episode(queries[0], make_episode_config(cfg, env));
        arc::write_trajectory(traj, out);
        std::cout << queries[0].id << ": " << arc::to_string(traj.outcome) << " in "
                  << traj.turns.size() << " turns -> " << out << "\n";
        return 0;
    }
    fs::create_directories(out);
    for (const auto& q : queries) {
        arc::Trajectory traj = arc::run_episode(q, make_episode_config(cfg, env));
        std::string path = (fs::path(out) / (sanitize(q.id) + ".jsonl")).string();
        arc::write_trajectory(traj, path);
        std::cout << q.id << ": " << arc::to_string(traj.outcome) << " in "
                  << traj.turns.size() << " turns -> " << path << "\n";
    }
    return 0;
}

int cmd_batch(const RunConfig& cfg, const std::vector<arc::Query>& queries, int trials,
              int parallelism, const std::string& out_dir) {
    auto env = make_environment(cfg);
    auto trajs = arc::run_batch(queries, trials, parallelism,
                                [&](const arc::Query&, int trial) {
                                    return make_episode_config(cfg, env, trial);
                                });
    fs::create_directories(out_dir);
    for (size_t i = 0; i < trajs.size(); ++i) {
        const auto& q = trajs[i].query;
        int trial = static_cast<int>(i) % trials;
        std::string path =
            (fs::path(out_dir) / (sanitize(q.id) + "_t" + std::to_string(trial) + ".jsonl"))
                .string();
        arc::write_trajectory(trajs[i], path);
    }
    json metrics = pass_metrics(trajs, trials);
    metrics["episodes"] = trajs.size();
    arc::emit_report(metrics, out_dir);
    std::cout << "wrote " << trajs.size() << " trajectories to " << out_dir << "\n";
    return 0;
}

int cmd_ablate(const RunConfig& base, const std::vector<arc::Query>& queries,
               const std::string& sweep, const std::string& out_dir) {
    auto env = make_environment(base);
    struct Setting {
        std::string name;
        RunConfig cfg;
    };
    std::vector<Setting> settings;
    if (sweep == "schedules") {
        auto with_policy = [&](const std::string& name, arc::ManagementPolicy p) {
            RunConfig c = base;
            c.policy = p;
            settings.push_back({name, std::move(c)});
        };
        using K = arc::ManagementPolicy::Kind;
        with_policy("per_turn", {K::arc_per_turn, 0, 0});
        with_policy("every_3", {K::arc_every_k, 3, 0});
        with_policy("every_5", {K::arc_every_k, 5, 0});
        with_policy("budget_8k", {K::arc_budget_triggered, 0, 8000});
        with_policy("budget_16k", {K::arc_budget_triggered, 0, 16000});
        with_policy("budget_32k", {K::arc_budget_triggered, 0, 32000});
    } else if (sweep == "caps") {
        for (const auto* name :
             {"summary", "summary_checklist", "reflection_checklist_only", "full"}) {
            RunConfig c = base;
            c.caps = caps_from_name(name);
            settings.push_back({name, std::move(c)});
        }
    } else {
        throw arc::ConfigError("unknown sweep: " + sweep + " (schedules|caps)");
    }

    fs::create_directories(out_dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& setting : settings) {
        double turns_sum = 0, tokens_sum = 0;
        int correct = 0, gold_total = 0;
        for (const auto& q : queries) {
            arc::Trajectory traj =
                arc::run_episode(q, make_episode_config(setting.cfg, env));
            turns_sum += static_cast<double>(traj.turns.size());
            tokens_sum += static_cast<double>(traj.totals.prompt_tokens);
            if (q.gold_answer) {
                ++gold_total;
                if (arc::judge_exact(traj.final_answer, *q.gold_answer)) ++correct;
            }
        }
        double n = static_cast<double>(queries.size());
        std::string accuracy =
            gold_total ? std::to_string(100.0 * correct / gold_total) : "";
        rows.push_back({setting.name, accuracy, std::to_string(turns_sum / n),
                        std::to_string(tokens_sum / n)});
        std::cout << setting.name << ": accuracy=" << (accuracy.empty() ? "n/a" : accuracy)
                  << " mean_turns=" << turns_sum / n << "\n";
    }
    arc::write_csv((fs::path(out_dir) / "ablate.csv").string(),
                   {"setting", "accuracy", "mean_turns", "mean_prompt_tokens"}, rows);
    return 0;
}

int cmd_filter(const std::string& in_dir, const std::string& out_path) {
    std::vector<std::string> files;
    auto trajs = read_trajectory_dir(in_dir, &files);
    std::ofstream out(out_path);
    if (!out) throw arc::IoError("cannot write manifest: " + out_path);
    int kept = 0;
    for (size_t i = 0; i < trajs.size(); ++i) {
        auto result = arc::validate_trajectory(trajs[i]);
        if (result.keep) ++kept;
        json j{{"file", files[i]}, {"keep", result.keep}, {"reasons", result.reasons}};
        out << j.dump() << "\n";
    }
    std::cout << "kept " << kept << "/" << trajs.size() << " trajectories -> " << out_path
              << "\n";
    return 0;
}

int cmd_export_sft(const std::string& in_path, const std::string& out_path) {
    auto trajs = read_trajectory_dir(in_path);
    std::vector<arc::Trajectory> kept;
    for (auto& traj : trajs)
        if (arc::validate_trajectory(traj).keep) kept.push_back(std::move(traj));
    auto examples = arc::export_sft(kept);
    arc::write_sft_examples(examples, out_path);
    std::cout << "exported " << examples.size() << " examples from " << kept.size() << "/"
              << trajs.size() << " trajectories -> " << out_path << "\n";
    return 0;
}

int cmd_eval(const std::string& in_path, const std::string& out_dir) {
    auto trajs = read_trajectory_dir(in_path);
    if (trajs.empty()) throw arc::ConfigError("no trajectories under " + in_path);

    std::map<std::string, int> trials_per_query;
    for (const auto& traj : trajs) ++trials_per_query[traj.query.id];
    int min_trials = trajs.size() ? 1 << 30 : 0;
    for (const auto& [_, n] : trials_per_query) min_trials = std::min(min_trials, n);

    json metrics = pass_metrics(trajs, min_trials);
    metrics["episodes"] = trajs.size();
    auto curve = arc::token_curve(trajs);
    auto& curve_json = metrics["token_curve"] = json::array();
    for (const auto& [turn, mean] : curve)
        curve_json.push_back({{"turn", turn}, {"mean_tokens", mean}});
    arc::emit_report(metrics, out_dir);
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ARC agent runtime: actor plus decoupled context manager"};
    app.require_subcommand(1);

    std::string config_path, query_text, queries_file, out = "out", in_path, corpus_flag;
    std::string policy_flag, caps_flag, sweep = "schedules";
    int trials = 1, parallelism = 1, every_k = 0;
    long threshold = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config JSON file");
        cmd->add_option("--query", query_text, "single query text");
        cmd->add_option("--queries-file", queries_file, "queries JSONL ({id, text, gold_answer})");
        cmd->add_option("--corpus", corpus_flag, "corpus JSONL override");
        cmd->add_option("--policy", policy_flag,
                        "management policy kind (overrides config)");
        cmd->add_option("--k", every_k, "k for arc_every_k");
        cmd->add_option("--threshold", threshold, "token threshold for triggered policies");
        cmd->add_option("--caps", caps_flag,
                        "capability set: full|summary|summary_checklist|reflection_checklist_only");
    };

    auto* run = app.add_subcommand("run", "run single episodes");
    add_common(run);
    run->add_option("--out", out, "output trajectory file or directory");

    auto* batch = app.add_subcommand("batch", "run queries x trials");
    add_common(batch);
    batch->add_option("--trials", trials, "trials per query");
    batch->add_option("--parallelism", parallelism, "concurrent episodes");
    batch->add_option("--out", out, "output directory");

    auto* ablate = app.add_subcommand("ablate", "sweep capability sets or schedules");
    add_common(ablate);
    ablate->add_option("--sweep", sweep, "schedules|caps");
    ablate->add_option("--out", out, "output directory");

    auto* filter = app.add_subcommand("filter", "validate trajectories, emit keep/reject manifest");
    filter->add_option("--in", in_path, "trajectory file or directory")->required();
    filter->add_option("--out", out, "manifest path");

    auto* export_sft = app.add_subcommand("export-sft", "export CM training examples");
    export_sft->add_option("--in", in_path, "trajectory file or directory")->required();
    export_sft->add_option("--out", out, "SFT JSONL path");

    auto* eval = app.add_subcommand("eval", "pass@k and token-curve report");
    eval->add_option("--in", in_path, "trajectory file or directory")->required();
    eval->add_option("--out", out, "report directory");

    auto* demo = app.add_subcommand("demo", "offline demo on the bundled fixtures");
    demo->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (demo->parsed()) return cmd_demo(out);

        RunConfig cfg;
        if (run->parsed() || batch->parsed() || ablate->parsed()) {
            if (!config_path.empty()) cfg = load_run_config(config_path);
            if (!corpus_flag.empty()) cfg.corpus_path = corpus_flag;
            if (!policy_flag.empty()) {
                cfg.policy.kind = arc::policy_kind_from_string(policy_flag);
                cfg.policy.k = every_k;
                cfg.policy.threshold_tokens = threshold;
                if (cfg.policy.kind == arc::ManagementPolicy::Kind::react_raw)
                    cfg.caps = arc::CmCapabilities::none();
            }
            if (!caps_flag.empty()) cfg.caps = caps_from_name(caps_flag);
        }

        if (run->parsed())
            return cmd_run(cfg, load_queries(query_text, queries_file), out);
        if (batch->parsed())
            return cmd_batch(cfg, load_queries(query_text, queries_file), trials,
                             parallelism, out);
        if (ablate->parsed())
            return cmd_ablate(cfg, load_queries(query_text, queries_file), sweep, out);
        if (filter->parsed()) return cmd_filter(in_path, out);
        if (export_sft->parsed()) return cmd_export_sft(in_path, out);
        if (eval->parsed()) return cmd_eval(in_path, out);
    } catch (const arc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
