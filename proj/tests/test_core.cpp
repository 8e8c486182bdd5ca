#include <random>

#include "doctest.h"

#include "arc/core.hpp"
#include "arc/errors.hpp"
#include "support.hpp"

using namespace arc;

namespace {

Checklist make_checklist(std::initializer_list<std::pair<const char*, ItemStatus>> items,
                         int revision = 1) {
    Checklist c;
    for (const auto& [desc, status] : items)
        c.items.push_back({static_cast<int>(c.items.size()) + 1, desc, status});
    c.revision = revision;
    return c;
}

}  // namespace

TEST_CASE("checklist transitions outside reflection") {
    Checklist pending = make_checklist({{"find it", ItemStatus::pending}});
    Checklist done = make_checklist({{"find it", ItemStatus::done}});

    CHECK(checklist_transition_valid(pending, done, false));
    CHECK_FALSE(checklist_transition_valid(done, pending, false));

    SUBCASE("abandoned only via reflection") {
        Checklist abandoned = make_checklist({{"find it", ItemStatus::abandoned}});
        CHECK_FALSE(checklist_transition_valid(pending, abandoned, false));
        CHECK_FALSE(checklist_transition_valid(abandoned, pending, false));
        CHECK(checklist_transition_valid(pending, abandoned, true));
        // unchanged abandoned item is fine
        CHECK(checklist_transition_valid(abandoned, abandoned, false));
    }

    SUBCASE("description or size changes are reflection-only") {
        Checklist renamed = make_checklist({{"find something else", ItemStatus::pending}});
        CHECK_FALSE(checklist_transition_valid(pending, renamed, false));
        Checklist bigger = make_checklist(
            {{"find it", ItemStatus::pending}, {"check it", ItemStatus::pending}});
        CHECK_FALSE(checklist_transition_valid(pending, bigger, false));
        CHECK(checklist_transition_valid(pending, bigger, true));
    }
}

TEST_CASE("reflection accepts any well-formed rewrite") {
    Checklist before = make_checklist({{"a", ItemStatus::done},
                                       {"b", ItemStatus::in_progress},
                                       {"c", ItemStatus::pending},
                                       {"d", ItemStatus::pending}});
    Checklist after = make_checklist({{"w", ItemStatus::pending},
                                      {"x", ItemStatus::pending},
                                      {"y", ItemStatus::in_progress},
                                      {"z", ItemStatus::abandoned}},
                                     2);
    CHECK(checklist_transition_valid(before, after, true));

    Checklist malformed = after;
    malformed.items[1].index = 7;  // indices no longer contiguous
    CHECK_FALSE(checklist_transition_valid(before, malformed, true));
}

TEST_CASE("memory range invariants") {
    InteractionMemory mem;
    CHECK(memory_ranges_valid(mem));
    CHECK(memory_covers_exactly(mem, 0));

    mem.entries = {{1, 1, "a", false}, {2, 2, "b", false}, {3, 5, "c", true}};
    CHECK(memory_ranges_valid(mem));
    CHECK(memory_covers_exactly(mem, 5));
    CHECK_FALSE(memory_covers_exactly(mem, 6));

    SUBCASE("gaps rejected") {
        mem.entries = {{1, 1, "a", false}, {3, 3, "c", false}};
        CHECK_FALSE(memory_ranges_valid(mem));
    }
    SUBCASE("overlap rejected") {
        mem.entries = {{1, 3, "a", true}, {3, 4, "b", true}};
        CHECK_FALSE(memory_ranges_valid(mem));
    }
    SUBCASE("multi-turn range requires revised") {
        mem.entries = {{1, 4, "a", false}};
        CHECK_FALSE(memory_ranges_valid(mem));
    }
    SUBCASE("empty text rejected") {
        mem.entries = {{1, 1, "", false}};
        CHECK_FALSE(memory_ranges_valid(mem));
    }
}

TEST_CASE("json round-trip is identity over randomized states") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> small(1, 6);

    for (int iter = 0; iter < 50; ++iter) {
        ContextState state;
        int items = small(rng);
        for (int i = 1; i <= items; ++i)
            state.checklist.items.push_back(
                {i, "item " + std::to_string(rng()),
                 static_cast<ItemStatus>(rng() % 4)});
        state.checklist.revision = small(rng);

        int turn = 1;
        int entries = small(rng);
        for (int e = 0; e < entries; ++e) {
            int span = 1 + static_cast<int>(rng() % 3);
            state.memory.entries.push_back(
                {turn, turn + span - 1, "entry " + std::to_string(rng()), span > 1});
            turn += span;
        }
        if (rng() % 2) {
            Interaction interaction;
            interaction.turn = turn;
            interaction.reasoning = "reason " + std::to_string(rng());
            interaction.action = {static_cast<Tool>(rng() % 3),
                                  "arg " + std::to_string(rng())};
            interaction.observation = {"obs " + std::to_string(rng()), "search", false, 3};
            state.last_interaction = interaction;
        }

        json j = state;
        auto back = j.get<ContextState>();
        CHECK(back == state);
        // serialized form is stable too
        CHECK(json(back).dump() == j.dump());
    }

    Query q{"id9", "some question", std::string("gold")};
    CHECK(json(q).get<Query>() == q);
    Query no_gold{"id10", "another", std::nullopt};
    CHECK(json(no_gold).get<Query>() == no_gold);
    CHECK_FALSE(json(no_gold).contains("gold_answer"));
}

TEST_CASE("status and tool names") {
    CHECK(to_string(ItemStatus::in_progress) == "in_progress");
    CHECK(item_status_from_string("abandoned") == ItemStatus::abandoned);
    CHECK_THROWS_AS(item_status_from_string("finished"), Error);
    CHECK(tool_from_string("visit") == Tool::visit);
    CHECK_THROWS_AS(tool_from_string("browse"), Error);
}
