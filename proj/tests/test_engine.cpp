#include <algorithm>
#include <string>
#include <vector>

#include "builders.hpp"
#include "doctest.h"
#include "meshsim/engine.hpp"
#include "meshsim/errors.hpp"
#include "meshsim/report_io.hpp"
#include "oracles.hpp"

using namespace meshsim;

namespace {

NodeState node(NodeId id, double x, double y, double vx = 0, double vy = 0,
               double priority = 0) {
    return NodeState{id, {x, y}, {vx, vy}, priority};
}

ScenarioConfig explicit_config(std::vector<NodeState> nodes, std::vector<SessionSpec> sessions,
                               std::uint32_t max_slots, double range = 100) {
    ScenarioConfig c;
    c.world.range = range;
    c.explicit_nodes = std::move(nodes);
    c.sessions = std::move(sessions);
    c.max_slots = max_slots;
    c.seed = 1;
    return c;
}

bool has_issue(const std::vector<std::string>& issues, const std::string& needle) {
    return std::any_of(issues.begin(), issues.end(), [&](const std::string& s) {
        return s.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("engine: adjacent pair delivers in one hop and one transmission") {
    const auto report = run_scenario(
        explicit_config({node(0, 0, 0), node(1, 90, 0)}, {{0, 0, 1}}, 10));

    REQUIRE(report.sessions.size() == 1);
    CHECK(report.sessions[0].status == SessionStatus::delivered());
    CHECK(report.sessions[0].hop_count == 1);
    CHECK(report.sessions[0].end_slot == 1);

    CHECK(report.metrics.delivered == 1);
    CHECK(report.metrics.total_transmissions == 1);
    CHECK(report.metrics.total_collisions_detected == 0);
    CHECK(report.metrics.total_deferrals == 0);
    CHECK(report.metrics.total_recoveries == 0);
    CHECK(report.metrics.delivery_ratio == doctest::Approx(1.0));
    CHECK(report.metrics.hop_counts == std::vector<std::uint32_t>{1});

    // Early exit: nothing left in flight after slot 1, so only the injection
    // log and one working slot exist.
    CHECK(report.slots.size() == 2);
    CHECK(report.slots[0].injections == std::vector<SessionId>{0});
}

TEST_CASE("engine: four-node chain takes three hops, matching shortest path") {
    const auto cfg = explicit_config(
        {node(0, 0, 0), node(1, 90, 0), node(2, 180, 0), node(3, 270, 0)}, {{0, 0, 3}}, 20);
    const auto report = run_scenario(cfg);

    CHECK(report.sessions[0].status == SessionStatus::delivered());
    CHECK(report.sessions[0].hop_count == 3);
    CHECK(report.sessions[0].end_slot == 3);
    CHECK(report.slots.size() == 4);

    const auto topo = builders::topo(100, {{0, 0}, {90, 0}, {180, 0}, {270, 0}});
    CHECK(bfs_hop_distance(topo, 0, 3) == 3);
}

TEST_CASE("engine: two senders for one receiver — winner now, loser next slot") {
    // Node 0 (priority 0.9) and node 1 (priority 0.2) both relay to node 2.
    const auto cfg = explicit_config({node(0, 0, 0, 0, 0, 0.9), node(1, 200, 0, 0, 0, 0.2),
                                      node(2, 100, 0)},
                                     {{0, 0, 2}, {0, 1, 2}}, 10, 120);
    const auto report = run_scenario(cfg);

    CHECK(report.sessions[0].status == SessionStatus::delivered());
    CHECK(report.sessions[0].end_slot == 1);
    CHECK(report.sessions[1].status == SessionStatus::delivered());
    CHECK(report.sessions[1].end_slot == 2);

    REQUIRE(report.slots.size() == 3);
    const auto& storm = report.slots[1];
    REQUIRE(storm.resolutions.size() == 1);
    CHECK(storm.resolutions[0].winner == 0);
    CHECK(storm.resolutions[0].resolved);
    REQUIRE(storm.resolutions[0].deferred.size() == 1);
    CHECK(storm.resolutions[0].deferred[0] == TransmitIntent{1, 2, 1});
    REQUIRE(storm.transfers.size() == 1);
    CHECK(storm.transfers[0].contended);

    CHECK(report.metrics.total_transmissions == 2);
    CHECK(report.metrics.total_collisions_detected == 1);
    CHECK(report.metrics.total_deferrals == 1);
}

TEST_CASE("engine: deferred sessions enter the next slot's pool first") {
    // Sessions 1..3 contend for node 0 in slot 1 (winner: priority 0.9).
    // Session 0 is injected at the end of slot 1, so in slot 2 the pool must
    // read: deferred 2, deferred 3, then fresh 0.
    const auto cfg = explicit_config(
        {node(0, 0, 0), node(1, 50, 0, 0, 0, 0.9), node(2, 0, 50, 0, 0, 0.5),
         node(3, 100, 0, 0, 0, 0.3), node(4, 400, 400), node(5, 450, 400)},
        {{1, 4, 5}, {0, 1, 0}, {0, 2, 0}, {0, 3, 0}}, 10);
    const auto report = run_scenario(cfg);

    REQUIRE(report.slots.size() >= 4);
    CHECK(report.slots[1].injections == std::vector<SessionId>{0});

    const auto& pool = report.slots[2].intents;
    REQUIRE(pool.size() == 3);
    CHECK(pool[0].session_id == 2);
    CHECK(pool[1].session_id == 3);
    CHECK(pool[2].session_id == 0);

    for (const auto& s : report.sessions) CHECK(s.status == SessionStatus::delivered());
    CHECK(report.metrics.total_deferrals == 3);          // two in slot 1, one in slot 2
    CHECK(report.metrics.total_collisions_detected == 2);
    CHECK(report.metrics.total_transmissions == 4);
}

TEST_CASE("engine: a late start slot injects on time and acts one slot later") {
    const auto cfg =
        explicit_config({node(0, 0, 0), node(1, 90, 0)}, {{3, 0, 1}}, 10);
    const auto report = run_scenario(cfg);

    CHECK(report.slots[0].injections.empty());
    REQUIRE(report.slots.size() == 5);
    CHECK(report.slots[3].injections == std::vector<SessionId>{0});
    for (std::size_t k = 1; k <= 3; ++k) CHECK(report.slots[k].intents.empty());
    REQUIRE(report.slots[4].intents.size() == 1);
    CHECK(report.sessions[0].end_slot == 4);
}

TEST_CASE("engine: a start slot beyond the horizon leaves the session in flight") {
    const auto cfg =
        explicit_config({node(0, 0, 0), node(1, 90, 0)}, {{20, 0, 1}}, 5);
    const auto report = run_scenario(cfg);

    CHECK(report.sessions[0].status == SessionStatus::in_progress());
    CHECK_FALSE(report.sessions[0].end_slot.has_value());
    CHECK(report.metrics.in_flight_at_end == 1);
    CHECK(report.metrics.delivered + report.metrics.failed + report.metrics.in_flight_at_end ==
          report.metrics.sessions_total);
    CHECK(report.metrics.total_transmissions == 0);
    CHECK(report.slots.size() == 6);  // nothing to do, but the clock still runs
}

TEST_CASE("engine: certain link loss fails the session on its first attempt") {
    auto cfg = explicit_config({node(0, 0, 0), node(1, 90, 0)}, {{0, 0, 1}}, 10);
    cfg.protocol.link_loss_probability = 1.0;
    const auto report = run_scenario(cfg);

    CHECK(report.sessions[0].status == SessionStatus::failed(FailureReason::TransferError));
    CHECK(report.sessions[0].end_slot == 1);
    CHECK(report.metrics.failed == 1);
    CHECK(report.metrics.total_transmissions == 1);  // the lost attempt still went on air
    REQUIRE(report.slots[1].transfers.size() == 1);
    CHECK(report.slots[1].transfers[0].outcome.failure == TransferFailure::LinkLoss);
}

TEST_CASE("engine: isolated source exhausts recovery and fails with no route") {
    const auto cfg = explicit_config({node(0, 0, 0), node(1, 500, 0)}, {{0, 0, 1}}, 10);
    const auto report = run_scenario(cfg);

    CHECK(report.sessions[0].status == SessionStatus::failed(FailureReason::NoRoute));
    CHECK(report.sessions[0].end_slot == 3);  // limit 2: two attempts, then the refusal
    CHECK(report.metrics.total_recoveries == 3);
    CHECK(report.metrics.total_transmissions == 0);
    CHECK(report.slots.size() == 4);
    CHECK(report.slots[3].recoveries.size() == 1);
    CHECK(report.slots[3].recoveries[0].exhausted);
}

TEST_CASE("engine: identical seeds reproduce byte-identical reports") {
    ScenarioConfig cfg;
    cfg.node_count = 25;
    cfg.session_gen = SessionGenSpec{5, 5};
    cfg.max_slots = 50;
    cfg.seed = 42;

    const auto a = run_scenario(cfg);
    const auto b = run_scenario(cfg);
    CHECK(render_report_json(a) == render_report_json(b));
    CHECK(render_trace_csv(a) == render_trace_csv(b));
}

TEST_CASE("engine: count-form and its materialized explicit form run identically") {
    ScenarioConfig count_form;
    count_form.world = {300, 300, 100, 0, 15, 1};
    count_form.node_count = 15;
    count_form.session_gen = SessionGenSpec{4, 6};
    count_form.max_slots = 40;
    count_form.seed = 99;

    ScenarioConfig explicit_form = count_form;
    explicit_form.explicit_nodes = materialize_nodes(count_form);
    explicit_form.node_count = 0;
    explicit_form.sessions = materialize_sessions(count_form);
    explicit_form.session_gen.reset();

    const auto a = run_scenario(count_form);
    const auto b = run_scenario(explicit_form);
    CHECK(a.metrics == b.metrics);
    CHECK(a.sessions == b.sessions);
    CHECK(render_trace_csv(a) == render_trace_csv(b));
}

TEST_CASE("flooding: two connected nodes cost two transmissions") {
    // The destination got the packet in slot 1 but, knowing nothing of the
    // flood's purpose, still rebroadcasts once in slot 2.
    const auto report = run_flooding_baseline(
        explicit_config({node(0, 0, 0), node(1, 90, 0)}, {{0, 0, 1}}, 10));

    CHECK(report.sessions[0].status == SessionStatus::delivered());
    CHECK(report.sessions[0].hop_count == 1);
    CHECK(report.sessions[0].end_slot == 1);
    CHECK(report.metrics.total_transmissions == 2);
    CHECK(report.metrics.total_collisions_detected == 0);
    CHECK(report.slots.size() == 3);
}

TEST_CASE("flooding: a k-clique costs k transmissions and overlaps everywhere") {
    const auto report = run_flooding_baseline(explicit_config(
        {node(0, 0, 0), node(1, 10, 0), node(2, 20, 0), node(3, 0, 10), node(4, 10, 10)},
        {{0, 0, 1}}, 10));

    CHECK(report.sessions[0].status == SessionStatus::delivered());
    CHECK(report.sessions[0].hop_count == 1);
    CHECK(report.metrics.total_transmissions == 5);
    // Slot 2: the four first-hop receivers rebroadcast together, so every
    // node hears at least two of them.
    CHECK(report.metrics.total_collisions_detected == 5);
}

TEST_CASE("flooding: disconnected destination fails after the flood dies out") {
    const auto report = run_flooding_baseline(
        explicit_config({node(0, 0, 0), node(1, 500, 0)}, {{0, 0, 1}}, 10));

    CHECK(report.sessions[0].status == SessionStatus::failed(FailureReason::NoRoute));
    CHECK(report.sessions[0].end_slot == 1);
    CHECK(report.metrics.total_transmissions == 1);  // the source's lone broadcast
    CHECK(report.metrics.failed == 1);
}

TEST_CASE("flooding: link loss does not apply to the baseline") {
    auto cfg = explicit_config({node(0, 0, 0), node(1, 90, 0)}, {{0, 0, 1}}, 10);
    cfg.protocol.link_loss_probability = 1.0;
    const auto report = run_flooding_baseline(cfg);
    CHECK(report.sessions[0].status == SessionStatus::delivered());
}

TEST_CASE("flooding: delivery hop count is the shortest-path depth") {
    const auto report = run_flooding_baseline(explicit_config(
        {node(0, 0, 0), node(1, 90, 0), node(2, 180, 0)}, {{0, 0, 2}}, 10));
    CHECK(report.sessions[0].status == SessionStatus::delivered());
    CHECK(report.sessions[0].hop_count == 2);
    CHECK(report.metrics.total_transmissions == 3);  // every node broadcast once
}

TEST_CASE("hop-distance search agrees with the all-pairs oracle") {
    const auto t = builders::random_topo(31, 30, 400, 90);
    const auto want = oracle::all_pairs_hops(t);
    for (NodeId i = 0; i < 30; ++i) {
        for (NodeId j = 0; j < 30; ++j) {
            const auto got = bfs_hop_distance(t, i, j);
            if (want[i][j] == oracle::kNoPath) {
                CHECK_FALSE(got.has_value());
            } else {
                CHECK(got == want[i][j]);
            }
        }
    }
    CHECK(bfs_hop_distance(t, 4, 4) == 0);
    CHECK_THROWS_AS((void)bfs_hop_distance(t, 0, 99), UnknownNodeError);
}

TEST_CASE("metrics: empty inputs produce zeros with ratio 0") {
    const auto m = collect_metrics({}, {});
    CHECK(m.sessions_total == 0);
    CHECK(m.delivered == 0);
    CHECK(m.delivery_ratio == doctest::Approx(0.0));
    CHECK(m.hop_counts.empty());
}

TEST_CASE("metrics: ratio reflects the delivered share") {
    std::vector<SessionSummary> sessions(2);
    sessions[0].status = SessionStatus::delivered();
    sessions[0].hop_count = 4;
    sessions[1].status = SessionStatus::failed(FailureReason::NoRoute);
    const auto m = collect_metrics({}, sessions);
    CHECK(m.delivered == 1);
    CHECK(m.failed == 1);
    CHECK(m.delivery_ratio == doctest::Approx(0.5));
    CHECK(m.hop_counts == std::vector<std::uint32_t>{4});
}

TEST_CASE("metrics: recount from raw logs matches the report on random runs") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScenarioConfig cfg;
        cfg.world = {300, 300, 100, 0, 15, 1};
        cfg.node_count = 20;
        cfg.session_gen = SessionGenSpec{6, 8};
        cfg.max_slots = 60;
        cfg.seed = seed;

        const auto report = run_scenario(cfg);
        CHECK(collect_metrics(report.slots, report.sessions) == report.metrics);
        CHECK(report.metrics.delivered + report.metrics.failed +
                  report.metrics.in_flight_at_end ==
              report.metrics.sessions_total);
        CHECK(report.metrics.hop_counts.size() == report.metrics.delivered);
        for (const auto h : report.metrics.hop_counts) CHECK(h >= 1);
        for (const auto& s : report.sessions) {
            if (!s.status.in_flight()) {
                REQUIRE(s.end_slot.has_value());
                CHECK(*s.end_slot <= cfg.max_slots);
            } else {
                CHECK_FALSE(s.end_slot.has_value());
            }
        }
    }
}

TEST_CASE("scenario validation catches each class of bad input") {
    ScenarioConfig cfg;
    cfg.node_count = 10;
    cfg.max_slots = 10;
    cfg.sessions = {{0, 0, 1}};
    CHECK(validate_scenario(cfg).empty());

    SUBCASE("world geometry") {
        cfg.world.width = 0;
        cfg.world.range = -5;
        const auto issues = validate_scenario(cfg);
        CHECK(has_issue(issues, "world.width"));
        CHECK(has_issue(issues, "world.range"));
    }
    SUBCASE("speed bounds ordering") {
        cfg.world.speed_min = 10;
        cfg.world.speed_max = 5;
        CHECK(has_issue(validate_scenario(cfg), "speed_min"));
    }
    SUBCASE("protocol knobs") {
        cfg.protocol.recovery_limit = 0;
        cfg.protocol.link_loss_probability = 1.5;
        const auto issues = validate_scenario(cfg);
        CHECK(has_issue(issues, "recovery_limit"));
        CHECK(has_issue(issues, "link_loss_probability"));
    }
    SUBCASE("horizon") {
        cfg.max_slots = 0;
        CHECK(has_issue(validate_scenario(cfg), "max_slots"));
    }
    SUBCASE("too few nodes") {
        cfg.node_count = 1;
        cfg.sessions.clear();
        CHECK(has_issue(validate_scenario(cfg), "at least 2"));
    }
    SUBCASE("explicit node problems") {
        cfg.node_count = 0;
        cfg.explicit_nodes = {node(0, 0, 0), node(0, 50, 0), node(9, 2000, 0),
                              node(2, 10, 10, 30, 40, 5.0)};
        const auto issues = validate_scenario(cfg);
        CHECK(has_issue(issues, "nodes[1].id: duplicate"));
        CHECK(has_issue(issues, "nodes[2].id: ids must be dense"));  // 9 in a 4-node list
        CHECK(has_issue(issues, "nodes[2]: position"));
        CHECK(has_issue(issues, "nodes[3].priority"));
        CHECK(has_issue(issues, "nodes[3]: speed 50"));  // bounds default 0..20
    }
    SUBCASE("session endpoints") {
        cfg.sessions = {{0, 0, 99}, {0, 7, 7}};
        const auto issues = validate_scenario(cfg);
        CHECK(has_issue(issues, "sessions[0].destination: node id 99 out of range"));
        CHECK(has_issue(issues, "sessions[1]: source and destination must differ"));
    }
    SUBCASE("two session forms at once") {
        cfg.session_gen = SessionGenSpec{3, 0};
        CHECK(has_issue(validate_scenario(cfg), "mutually exclusive"));
    }
    SUBCASE("run refuses an invalid config") {
        cfg.max_slots = 0;
        CHECK_THROWS_AS((void)run_scenario(cfg), ValidationError);
        CHECK_THROWS_AS((void)run_flooding_baseline(cfg), ValidationError);
    }
}

TEST_CASE("generated session endpoints are always distinct and in range") {
    ScenarioConfig cfg;
    cfg.node_count = 7;
    cfg.session_gen = SessionGenSpec{200, 12};
    cfg.max_slots = 5;
    cfg.seed = 1234;
    const auto specs = materialize_sessions(cfg);
    REQUIRE(specs.size() == 200);
    for (const auto& s : specs) {
        CHECK(s.source < 7);
        CHECK(s.destination < 7);
        CHECK(s.source != s.destination);
        CHECK(s.start_slot >= 0);
        CHECK(s.start_slot <= 12);
    }
}
