#include "arc/runtime.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "arc/errors.hpp"

namespace arc {

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::answered: return "answered";
        case Outcome::forced_answer: return "forced_answer";
        case Outcome::forced_failure: return "forced_failure";
    }
    return "answered";
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "answered") return Outcome::answered;
    if (s == "forced_answer") return Outcome::forced_answer;
    if (s == "forced_failure") return Outcome::forced_failure;
    throw Error("unknown outcome: " + s);
}

void to_json(json& j, const TurnRecord& r) {
    j = json{{"turn", r.turn},
             {"state_before", r.state_before},
             {"interaction", r.interaction},
             {"state_after", r.state_after},
             {"reflection_applied", r.reflection_applied},
             {"prompt_tokens", r.prompt_tokens},
             {"managed", r.managed},
             {"cm_fallback", r.cm_fallback},
             {"degraded_reflection", r.degraded_reflection}};
}

void from_json(const json& j, TurnRecord& r) {
    j.at("turn").get_to(r.turn);
    j.at("state_before").get_to(r.state_before);
    j.at("interaction").get_to(r.interaction);
    j.at("state_after").get_to(r.state_after);
    j.at("reflection_applied").get_to(r.reflection_applied);
    j.at("prompt_tokens").get_to(r.prompt_tokens);
    j.at("managed").get_to(r.managed);
    j.at("cm_fallback").get_to(r.cm_fallback);
    j.at("degraded_reflection").get_to(r.degraded_reflection);
}

void EpisodeConfig::validate() const {
    if (!actor_backend) throw ConfigError("actor backend not configured");
    if (!environment) throw ConfigError("environment not configured");
    if (!policy.consistent()) throw ConfigError("inconsistent management policy");
    if (!caps.consistent())
        throw ConfigError("memory_revision requires reflection capability");
    if (policy.kind == ManagementPolicy::Kind::react_raw && caps != CmCapabilities::none())
        throw ConfigError("react_raw forbids CM capabilities");
    if (policy.is_arc() || policy.kind == ManagementPolicy::Kind::resum_static) {
        if (!cm_backend) throw ConfigError("CM backend not configured");
    }
    if (policy.is_arc() && !caps.summarize)
        throw ConfigError("ARC policies require the summarize capability");
    if (budget.max_context_tokens <= 0 || budget.max_turns <= 0 ||
        budget.observation_cap_tokens <= 0 || budget.forced_answer_reserve_tokens <= 0)
        throw ConfigError("budget fields must be positive");
    if (budget.observation_cap_tokens >= budget.max_context_tokens)
        throw ConfigError("observation cap must be below the context budget");
}

Trajectory run_episode(const Query& q, const EpisodeConfig& cfg) {
    cfg.validate();
    if (q.text.empty()) throw ConfigError("empty query text");

    Trajectory traj;
    traj.query = q;

    Checklist checklist;
    if (cfg.policy.is_arc())
        checklist = initialize_checklist(q, *cfg.cm_backend, cfg.templates);

    InteractionMemory memory;
    std::vector<Interaction> history;
    std::vector<Interaction> pending;  // raw, not yet absorbed into memory
    Interaction last_summarized;       // most recent interaction folded into memory
    bool have_summarized = false;

    int last_reflection_turn = -cfg.reflection_cooldown_turns;
    int last_checklist_change_turn = 1;

    auto finish = [&](Outcome outcome, const std::string& answer) {
        traj.outcome = outcome;
        traj.final_answer = answer;
        traj.totals.turns = static_cast<int>(traj.turns.size());
        traj.totals.prompt_tokens = 0;
        traj.totals.reflections = 0;
        for (const auto& r : traj.turns) {
            traj.totals.prompt_tokens += r.prompt_tokens;
            if (r.reflection_applied) ++traj.totals.reflections;
        }
        return traj;
    };

    for (int t = 1;; ++t) {
        ContextState state_before;
        state_before.checklist = checklist;
        state_before.memory = memory;
        if (!pending.empty()) state_before.last_interaction = pending.back();

        std::span<const Interaction> older(pending.data(),
                                           pending.empty() ? 0 : pending.size() - 1);

        PromptDocument prompt = assemble_actor_prompt(q, state_before, cfg.budget, older,
                                                      cfg.templates.actor_instructions);
        long prompt_tokens = context_size(prompt);

        bool over_budget = !fits_budget(prompt_tokens, cfg.budget);
        if (t >= cfg.budget.max_turns || over_budget) {
            ForcedAnswerResult forced;
            try {
                forced = forced_answer(q, state_before, older, *cfg.actor_backend,
                                       cfg.budget, cfg.templates, t,
                                       cfg.actor_parse_retries);
            } catch (const TransportError&) {
                return finish(Outcome::forced_failure, "");
            }
            PromptDocument forced_prompt = assemble_actor_prompt(
                q, state_before, cfg.budget, older,
                cfg.templates.forced_answer_instructions);

            TurnRecord record;
            record.turn = t;
            record.state_before = state_before;
            record.interaction = forced.interaction;
            record.state_after = state_before;
            record.state_after.last_interaction = forced.interaction;
            record.prompt_tokens = context_size(forced_prompt);
            traj.turns.push_back(std::move(record));
            return finish(forced.failed ? Outcome::forced_failure : Outcome::forced_answer,
                          forced.interaction.action.argument);
        }

        // actor step: exactly one action per turn, parse retries bounded
        std::string reasoning;
        Action action;
        {
            ChatRequest req = make_chat_request(RoleTag::actor, cfg.templates.actor_system,
                                                prompt);
            bool parsed = false;
            for (int attempt = 0; attempt <= cfg.actor_parse_retries && !parsed; ++attempt) {
                std::string reply;
                try {
                    reply = cfg.actor_backend->chat(req).text;
                } catch (const TransportError&) {
                    return finish(Outcome::forced_failure, "");
                } catch (const ScriptExhausted&) {
                    return finish(Outcome::forced_failure, "");
                } catch (const MalformedResponse&) {
                    continue;
                }
                try {
                    std::tie(reasoning, action) = parse_actor_output(reply);
                    parsed = true;
                } catch (const ActorParseError&) {
                }
            }
            if (!parsed) return finish(Outcome::forced_failure, "");
        }

        if (action.tool == Tool::answer) {
            Interaction interaction{t, reasoning, action, {"", "answer", false, 0}};
            TurnRecord record;
            record.turn = t;
            record.state_before = state_before;
            record.interaction = interaction;
            record.state_after = state_before;
            record.state_after.last_interaction = interaction;
            record.prompt_tokens = prompt_tokens;
            traj.turns.push_back(std::move(record));
            return finish(Outcome::answered, action.argument);
        }

        // environment step
        Observation observation;
        if (action.tool == Tool::search) {
            auto results = cfg.environment->search(action.argument, cfg.search_top_k);
            observation = observe_search(results, cfg.budget.observation_cap_tokens);
        } else {
            observation =
                cfg.environment->visit(action.argument, cfg.budget.observation_cap_tokens);
        }
        Interaction interaction{t, reasoning, action, observation};
        history.push_back(interaction);
        pending.push_back(interaction);

        // context-management step
        bool managed = false;
        bool reflection_applied = false;
        bool cm_fallback = false;
        bool degraded_reflection = false;

        if (cfg.policy.is_arc() && should_manage(cfg.policy, t, prompt_tokens)) {
            ReflectionSignal signal;
            while (pending.size() > 1) {
                Interaction oldest = pending.front();
                ContextState cm_state{checklist, memory, oldest};
                SummarizeResult res = summarize_step(q, cm_state, oldest, cfg.caps,
                                                     *cfg.cm_backend, cfg.templates);
                if (res.checklist != checklist) last_checklist_change_turn = t;
                memory = std::move(res.memory);
                checklist = std::move(res.checklist);
                cm_fallback = cm_fallback || res.fallback;
                signal = res.signal;
                last_summarized = oldest;
                have_summarized = true;
                pending.erase(pending.begin());
                managed = true;
            }

            if (managed && cfg.caps.reflection) {
                HeuristicSignals h = heuristic_signals(history, cfg.heuristic_window,
                                                       t - last_checklist_change_turn);
                signal.heuristic_repetition = h.repetition;
                signal.heuristic_stall = h.stall;
                bool cooled = t - last_reflection_turn >= cfg.reflection_cooldown_turns;
                if (signal.triggered() && cooled && have_summarized) {
                    ReflectResult res = reflect(q, checklist, memory, last_summarized,
                                                cfg.caps, *cfg.cm_backend, cfg.templates);
                    last_reflection_turn = t;
                    if (res.degraded) {
                        degraded_reflection = true;
                    } else {
                        memory = std::move(res.memory);
                        checklist = std::move(res.checklist);
                        reflection_applied = true;
                        last_checklist_change_turn = t;
                    }
                }
            }
        } else if (cfg.policy.kind == ManagementPolicy::Kind::resum_static &&
                   prompt_tokens > cfg.policy.threshold_tokens && pending.size() > 1) {
            std::span<const Interaction> compressible(pending.data(), pending.size() - 1);
            ResumResult res = resum_compress(q, memory, compressible, *cfg.cm_backend,
                                             cfg.templates);
            memory = std::move(res.memory);
            cm_fallback = res.fallback;
            pending.erase(pending.begin(), pending.end() - 1);
            managed = true;
        }

        ContextState state_after;
        state_after.checklist = checklist;
        state_after.memory = memory;
        state_after.last_interaction = interaction;

        TurnRecord record;
        record.turn = t;
        record.state_before = std::move(state_before);
        record.interaction = std::move(interaction);
        record.state_after = std::move(state_after);
        record.reflection_applied = reflection_applied;
        record.prompt_tokens = prompt_tokens;
        record.managed = managed;
        record.cm_fallback = cm_fallback;
        record.degraded_reflection = degraded_reflection;
        traj.turns.push_back(std::move(record));
    }
}

std::vector<Trajectory> run_batch(
    const std::vector<Query>& queries, int trials, int parallelism,
    const std::function<EpisodeConfig(const Query& q, int trial)>& make_cfg) {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (parallelism < 1) parallelism = 1;

    struct Job {
        size_t query_index;
        int trial;
    };
    std::vector<Job> jobs;
    for (size_t qi = 0; qi < queries.size(); ++qi)
        for (int trial = 0; trial < trials; ++trial) jobs.push_back({qi, trial});

    std::vector<Trajectory> results(jobs.size());
    std::atomic<size_t> next{0};
    std::exception_ptr config_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Query& q = queries[jobs[i].query_index];
            try {
                EpisodeConfig cfg = make_cfg(q, jobs[i].trial);
                results[i] = run_episode(q, cfg);
            } catch (const ConfigError&) {
                std::lock_guard lock(error_mutex);
                if (!config_error) config_error = std::current_exception();
                return;
            } catch (const std::exception&) {
                Trajectory failed;
                failed.query = q;
                failed.outcome = Outcome::forced_failure;
                results[i] = std::move(failed);
            }
        }
    };

    std::vector<std::thread> threads;
    int workers = std::min<int>(parallelism, static_cast<int>(jobs.size()));
    for (int w = 0; w < std::max(workers, 1); ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();

    if (config_error) std::rethrow_exception(config_error);
    return results;
}

}  // namespace arc
