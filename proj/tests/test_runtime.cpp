#include <random>

#include "doctest.h"

#include "arc/errors.hpp"
#include "arc/runtime.hpp"
#include "support.hpp"

using namespace arc;
using namespace arctest;

namespace {

// Delegating backend that records which role tags it served.
class TaggingBackend : public Backend {
public:
    explicit TaggingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}
    ChatResponse chat(const ChatRequest& request) override {
        tags.push_back(request.role_tag);
        return inner_->chat(request);
    }
    std::vector<RoleTag> tags;

private:
    std::shared_ptr<Backend> inner_;
};

}  // namespace

TEST_CASE("three-turn episode under per-turn management") {
    std::mt19937 rng(3);
    ScriptedEpisode ep = make_scripted_episode(3, rng);
    EpisodeConfig cfg = arc_config(ep);
    Trajectory traj = run_episode(test_query(), cfg);

    CHECK(traj.outcome == Outcome::answered);
    CHECK(traj.final_answer == "final answer");
    REQUIRE(traj.turns.size() == 3);
    CHECK(traj.totals.turns == 3);

    // turn 1 starts from an empty memory and ends unmanaged (nothing older
    // than the newest interaction exists yet)
    CHECK(traj.turns[0].state_before.memory.entries.empty());
    CHECK_FALSE(traj.turns[0].state_before.last_interaction.has_value());
    CHECK_FALSE(traj.turns[0].managed);

    // turn 2 absorbs turn 1 into memory
    CHECK(traj.turns[1].managed);
    CHECK(memory_covers_exactly(traj.turns[1].state_after.memory, 1));

    // at the answering turn the prompt held memory of 1..1 plus raw turn 2
    CHECK(memory_covers_exactly(traj.turns[2].state_before.memory, 1));
    REQUIRE(traj.turns[2].state_before.last_interaction.has_value());
    CHECK(traj.turns[2].state_before.last_interaction->turn == 2);
    CHECK(traj.turns[2].interaction.action.tool == Tool::answer);

    // checklist came from initialization and never left well-formedness
    for (const auto& r : traj.turns) {
        CHECK(r.state_before.checklist.well_formed());
        CHECK(r.state_after.checklist.well_formed());
        CHECK(memory_ranges_valid(r.state_after.memory));
        CHECK(r.prompt_tokens > 0);
    }
    CHECK(traj.turns[0].state_before.checklist.items.size() == 4);
}

TEST_CASE("memory coverage invariant holds over long random episodes") {
    std::mt19937 rng(17);
    for (int iter = 0; iter < 10; ++iter) {
        int turns = 4 + static_cast<int>(rng() % 10);
        ScriptedEpisode ep = make_scripted_episode(turns, rng);
        Trajectory traj = run_episode(test_query(), arc_config(ep));
        REQUIRE(traj.outcome == Outcome::answered);
        REQUIRE(static_cast<int>(traj.turns.size()) == turns);
        for (const auto& r : traj.turns) {
            // before the turn-t actor call, memory covers 1..t-2 exactly
            CHECK(memory_covers_exactly(r.state_before.memory, std::max(0, r.turn - 2)));
            if (r.turn > 1) {
                REQUIRE(r.state_before.last_interaction.has_value());
                CHECK(r.state_before.last_interaction->turn == r.turn - 1);
            }
        }
    }
}

TEST_CASE("actor and context manager stay on separate backends") {
    std::mt19937 rng(4);
    ScriptedEpisode ep = make_scripted_episode(4, rng);
    auto actor = std::make_shared<TaggingBackend>(ep.actor);
    auto cm = std::make_shared<TaggingBackend>(ep.cm);
    EpisodeConfig cfg = arc_config(ep);
    cfg.actor_backend = actor;
    cfg.cm_backend = cm;

    Trajectory traj = run_episode(test_query(), cfg);
    CHECK(traj.outcome == Outcome::answered);
    for (RoleTag t : actor->tags) CHECK(t == RoleTag::actor);
    CHECK_FALSE(cm->tags.empty());
    for (RoleTag t : cm->tags)
        CHECK((t == RoleTag::cm_summarize || t == RoleTag::cm_reflect));
}

TEST_CASE("configuration errors") {
    std::mt19937 rng(6);
    ScriptedEpisode ep = make_scripted_episode(2, rng);

    SUBCASE("missing environment") {
        EpisodeConfig cfg = arc_config(ep);
        cfg.environment = nullptr;
        CHECK_THROWS_AS(run_episode(test_query(), cfg), ConfigError);
    }
    SUBCASE("missing cm backend for arc policy") {
        EpisodeConfig cfg = arc_config(ep);
        cfg.cm_backend = nullptr;
        CHECK_THROWS_AS(run_episode(test_query(), cfg), ConfigError);
    }
    SUBCASE("react with capabilities enabled") {
        EpisodeConfig cfg = arc_config(ep, {ManagementPolicy::Kind::react_raw, 0, 0},
                                       CmCapabilities::full());
        CHECK_THROWS_AS(run_episode(test_query(), cfg), ConfigError);
    }
    SUBCASE("every_k needs k >= 1") {
        EpisodeConfig cfg = arc_config(ep, {ManagementPolicy::Kind::arc_every_k, 0, 0});
        CHECK_THROWS_AS(run_episode(test_query(), cfg), ConfigError);
    }
    SUBCASE("arc without summarize capability") {
        EpisodeConfig cfg = arc_config(ep);
        cfg.caps = CmCapabilities::none();
        CHECK_THROWS_AS(run_episode(test_query(), cfg), ConfigError);
    }
    SUBCASE("observation cap must sit below the budget") {
        EpisodeConfig cfg = arc_config(ep);
        cfg.budget.observation_cap_tokens = cfg.budget.max_context_tokens;
        CHECK_THROWS_AS(run_episode(test_query(), cfg), ConfigError);
    }
    SUBCASE("empty query text") {
        EpisodeConfig cfg = arc_config(ep);
        CHECK_THROWS_AS(run_episode({"q", "", std::nullopt}, cfg), ConfigError);
    }
}

TEST_CASE("react baseline keeps everything raw") {
    auto actor = std::make_shared<ScriptedBackend>();
    actor->push(RoleTag::actor, actor_reply("r1", "search", "alpha"));
    actor->push(RoleTag::actor, actor_reply("r2", "visit", "d1"));
    actor->push(RoleTag::actor, actor_reply("r3", "search", "beta lake"));
    actor->push(RoleTag::actor, actor_reply("r4", "answer", "the fire tower"));

    EpisodeConfig cfg;
    cfg.policy = {ManagementPolicy::Kind::react_raw, 0, 0};
    cfg.caps = CmCapabilities::none();
    cfg.actor_backend = actor;
    cfg.environment = toy_environment();

    Trajectory traj = run_episode(test_query(), cfg);
    CHECK(traj.outcome == Outcome::answered);
    REQUIRE(traj.turns.size() == 4);
    for (const auto& r : traj.turns) {
        CHECK_FALSE(r.managed);
        CHECK(r.state_after.memory.entries.empty());
        CHECK(r.state_after.checklist.items.empty());
    }
    // prompts strictly grow as raw history accumulates
    for (size_t i = 1; i < traj.turns.size(); ++i)
        CHECK(traj.turns[i].prompt_tokens > traj.turns[i - 1].prompt_tokens);
}

TEST_CASE("resum compresses once past its threshold") {
    auto actor = std::make_shared<ScriptedBackend>();
    for (int t = 1; t <= 5; ++t)
        actor->push(RoleTag::actor,
                    actor_reply("step " + std::to_string(t), "search",
                                "alpha ridge query number " + std::to_string(t)));
    actor->push(RoleTag::actor, actor_reply("done", "answer", "answer text"));
    auto cm = std::make_shared<ScriptedBackend>();
    cm->push(RoleTag::cm_summarize, "condensed history paragraph one");
    cm->push(RoleTag::cm_summarize, "condensed history paragraph two");

    EpisodeConfig cfg;
    cfg.policy = {ManagementPolicy::Kind::resum_static, 0, 120};
    cfg.caps = CmCapabilities::none();
    cfg.actor_backend = actor;
    cfg.cm_backend = cm;
    cfg.environment = toy_environment();

    Trajectory traj = run_episode(test_query(), cfg);
    CHECK(traj.outcome == Outcome::answered);
    REQUIRE(traj.turns.size() == 6);

    bool compressed = false;
    for (const auto& r : traj.turns) {
        if (r.managed) {
            compressed = true;
            REQUIRE(r.state_after.memory.entries.size() == 1);
            CHECK(r.state_after.memory.entries[0].turn_start == 1);
            CHECK(r.state_after.memory.entries[0].revised);
        }
        CHECK(r.state_after.checklist.items.empty());  // no checklist for resum
    }
    CHECK(compressed);
}

TEST_CASE("repetition triggers reflection once, then cooldown holds") {
    auto actor = std::make_shared<ScriptedBackend>();
    for (int t = 1; t <= 4; ++t)
        actor->push(RoleTag::actor, actor_reply("again", "search", "alpha ridge"));
    actor->push(RoleTag::actor, actor_reply("done", "answer", "the fire tower"));

    auto cm = std::make_shared<ScriptedBackend>();
    cm->push(RoleTag::cm_summarize, init_checklist_reply());
    for (int t = 1; t <= 3; ++t)
        cm->push(RoleTag::cm_summarize,
                 summarize_reply("searched alpha ridge, attempt " + std::to_string(t)));
    cm->push(RoleTag::cm_reflect,
             reflect_reply({{1, 2, "stuck repeating the same search"}},
                           {{"try the visit tool instead", "pending"},
                            {"answer the query", "pending"},
                            {"stop re-searching alpha ridge", "in_progress"}}));

    EpisodeConfig cfg;
    cfg.policy = {ManagementPolicy::Kind::arc_per_turn, 0, 0};
    cfg.actor_backend = actor;
    cfg.cm_backend = cm;
    cfg.environment = toy_environment();

    Trajectory traj = run_episode(test_query(), cfg);
    REQUIRE(traj.outcome == Outcome::answered);
    REQUIRE(traj.turns.size() == 5);

    CHECK_FALSE(traj.turns[1].reflection_applied);  // window not yet full
    CHECK(traj.turns[2].reflection_applied);        // third identical action
    CHECK(traj.turns[2].state_after.checklist.revision == 2);
    CHECK(memory_covers_exactly(traj.turns[2].state_after.memory, 2));
    CHECK_FALSE(traj.turns[3].reflection_applied);  // cooldown of 2 turns
    CHECK_FALSE(traj.turns[3].degraded_reflection);
    CHECK(traj.totals.reflections == 1);
}

TEST_CASE("unusable reflection degrades without corrupting state") {
    auto actor = std::make_shared<ScriptedBackend>();
    for (int t = 1; t <= 3; ++t)
        actor->push(RoleTag::actor, actor_reply("again", "search", "alpha ridge"));
    actor->push(RoleTag::actor, actor_reply("done", "answer", "x"));

    auto cm = std::make_shared<ScriptedBackend>();
    cm->push(RoleTag::cm_summarize, init_checklist_reply());
    for (int t = 1; t <= 2; ++t)
        cm->push(RoleTag::cm_summarize, summarize_reply("attempt " + std::to_string(t)));
    // no cm_reflect script: the triggered reflection cannot be served

    EpisodeConfig cfg;
    cfg.policy = {ManagementPolicy::Kind::arc_per_turn, 0, 0};
    cfg.actor_backend = actor;
    cfg.cm_backend = cm;
    cfg.environment = toy_environment();

    Trajectory traj = run_episode(test_query(), cfg);
    REQUIRE(traj.outcome == Outcome::answered);
    CHECK(traj.turns[2].degraded_reflection);
    CHECK_FALSE(traj.turns[2].reflection_applied);
    CHECK(memory_covers_exactly(traj.turns[2].state_after.memory, 2));
    CHECK(traj.totals.reflections == 0);
}

TEST_CASE("forced answer fires at the turn limit") {
    auto actor = std::make_shared<ScriptedBackend>();
    actor->push(RoleTag::actor, actor_reply("s1", "search", "alpha"));
    actor->push(RoleTag::actor, actor_reply("s2", "search", "beta"));
    actor->push(RoleTag::actor, actor_reply("forced now", "answer", "late answer"));

    std::mt19937 rng(8);
    ScriptedEpisode ep = make_scripted_episode(9, rng);  // only the cm script is used
    EpisodeConfig cfg = arc_config(ep);
    cfg.actor_backend = actor;
    cfg.budget.max_turns = 3;

    Trajectory traj = run_episode(test_query(), cfg);
    CHECK(traj.outcome == Outcome::forced_answer);
    CHECK(traj.final_answer == "late answer");
    REQUIRE(traj.turns.size() == 3);
    CHECK(traj.turns.back().turn == 3);
    CHECK(traj.turns.back().interaction.action.tool == Tool::answer);
}

TEST_CASE("exhausted actor script becomes a partial forced failure") {
    auto actor = std::make_shared<ScriptedBackend>();
    actor->push(RoleTag::actor, actor_reply("s1", "search", "alpha"));

    std::mt19937 rng(9);
    ScriptedEpisode ep = make_scripted_episode(5, rng);
    EpisodeConfig cfg = arc_config(ep);
    cfg.actor_backend = actor;

    Trajectory traj = run_episode(test_query(), cfg);
    CHECK(traj.outcome == Outcome::forced_failure);
    CHECK(traj.final_answer.empty());
    CHECK(traj.turns.size() == 1);  // the completed turn survives
}

TEST_CASE("run_batch preserves order and isolates failures") {
    std::vector<Query> queries = {{"qa", "question a", std::string("ga")},
                                  {"qb", "question b", std::string("gb")},
                                  {"qc", "question c", std::string("gc")}};

    auto make_cfg = [&](const Query& q, int trial) {
        std::mt19937 rng(static_cast<unsigned>(q.id[1] * 100 + trial));
        if (q.id == "qb") {
            // actor script left empty: this episode must fail alone
            ScriptedEpisode ep;
            ep.actor = std::make_shared<ScriptedBackend>();
            ep.cm = std::make_shared<ScriptedBackend>();
            ep.cm->push(RoleTag::cm_summarize, init_checklist_reply());
            return arc_config(ep);
        }
        return arc_config(make_scripted_episode(3, rng));
    };

    auto results = run_batch(queries, 2, 3, make_cfg);
    REQUIRE(results.size() == 6);
    for (size_t i = 0; i < results.size(); ++i)
        CHECK(results[i].query.id == queries[i / 2].id);
    CHECK(results[0].outcome == Outcome::answered);
    CHECK(results[2].outcome == Outcome::forced_failure);
    CHECK(results[3].outcome == Outcome::forced_failure);
    CHECK(results[4].outcome == Outcome::answered);
}

TEST_CASE("run_batch surfaces configuration errors") {
    std::vector<Query> queries = {{"qa", "question a", std::nullopt}};
    auto make_cfg = [&](const Query&, int) {
        EpisodeConfig cfg;  // no backends at all
        return cfg;
    };
    CHECK_THROWS_AS(run_batch(queries, 1, 2, make_cfg), ConfigError);
    CHECK_THROWS_AS(run_batch(queries, 0, 1, make_cfg), ConfigError);
}
