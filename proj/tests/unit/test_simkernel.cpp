#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/oracles.hpp"
#include "support/test_support.hpp"
#include "taskmapper/error.hpp"
#include "taskmapper/simkernel.hpp"

using namespace taskmapper;
using namespace taskmapper::simkernel;
using appmodel::ApplicationModel;
using mapping::Mapping;

namespace {

constexpr double kTol = 1e-9;

ApplicationModel normalized(ApplicationModel app) {
    return appmodel::normalize_application(std::move(app));
}

void check_audit(const SimulationResult& r) {
    CHECK(r.audit.max_conservation_error <= kTol);
    CHECK(r.audit.max_oversubscription <= kTol);
}

double phase_time(const SimulationResult& r, const std::string& runnable, Phase phase,
                  EventKind kind) {
    for (const auto& e : r.timeline) {
        if (e.runnable == runnable && e.kind == kind && e.phase == phase) {
            return e.time;
        }
    }
    FAIL("phase event not found for " << runnable);
    return -1.0;
}

double finish_of(const SimulationResult& r, const std::string& runnable) {
    for (const auto& s : r.spans) {
        if (s.runnable == runnable) {
            return s.finish;
        }
    }
    FAIL("no span for " << runnable);
    return -1.0;
}

/// Two hosts h1, h2 joined by one link; plus a frontend reachable from both.
platform::PlatformModel two_hosts(double bandwidth, double latency, double speed = 1e9) {
    using namespace platform;
    return PlatformModel(
        {{"h1", "n", speed, 0, 0, false}, {"h2", "n", speed, 0, 0, false}, {"FE", "f", 1, 0, 0, true}},
        {{"wire", bandwidth, latency}, {"fe", 1e9, 0}},
        {{{"h2", "h1", {"wire"}}, true}, {{"FE", "h1", {"fe"}}, true}, {{"FE", "h2", {"fe", "wire"}}, true}});
}

Mapping place(std::map<std::string, std::string> runnables,
              std::map<std::string, std::string> labels = {}) {
    return Mapping{std::move(runnables), std::move(labels)};
}

} // namespace

TEST_SUITE("simkernel") {

TEST_CASE("share_resources worked examples") {
    const std::vector<double> link{10e6};
    const std::vector<ResourceSet> two{{0}, {0}};
    const auto r1 = share_resources(link, two);
    CHECK(r1 == std::vector<double>{5e6, 5e6});

    const std::vector<double> host{3e9};
    const auto r2 = share_resources(host, std::vector<ResourceSet>{{0}, {0}, {0}});
    for (double r : r2) {
        CHECK(r == doctest::Approx(1e9).epsilon(1e-15));
    }

    const std::vector<double> ab{10, 4};
    const auto r3 = share_resources(ab, std::vector<ResourceSet>{{0}, {0, 1}, {1}});
    CHECK(r3[0] == doctest::Approx(8).epsilon(1e-15));
    CHECK(r3[1] == doctest::Approx(2).epsilon(1e-15));
    CHECK(r3[2] == doctest::Approx(2).epsilon(1e-15));

    // A resource listed twice in one action counts once.
    const auto r4 = share_resources(link, std::vector<ResourceSet>{{0, 0}, {0}});
    CHECK(r4 == std::vector<double>{5e6, 5e6});

    CHECK(share_resources(link, std::vector<ResourceSet>{}).empty());
    CHECK_THROWS_AS(share_resources(link, std::vector<ResourceSet>{{}}), std::invalid_argument);
    CHECK_THROWS_AS(share_resources(link, std::vector<ResourceSet>{{1}}), std::invalid_argument);
}

TEST_CASE("share_resources matches the exact water-filling oracle") {
    std::mt19937_64 rng(314159);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t resources = 1 + rng() % 6;
        const std::size_t actions = 1 + rng() % 10;
        std::vector<double> caps;
        std::vector<oracle::Rational> exact_caps;
        for (std::size_t r = 0; r < resources; ++r) {
            const auto c = static_cast<std::int64_t>(1 + rng() % 50);
            caps.push_back(static_cast<double>(c));
            exact_caps.emplace_back(c);
        }
        std::vector<ResourceSet> sets;
        std::vector<std::vector<std::size_t>> plain;
        for (std::size_t a = 0; a < actions; ++a) {
            ResourceSet s;
            const std::size_t k = 1 + rng() % resources;
            for (std::size_t i = 0; i < k; ++i) {
                s.push_back(rng() % resources);
            }
            sets.push_back(s);
            plain.push_back(s);
        }
        const auto got = share_resources(caps, sets);
        const auto want = oracle::water_filling(exact_caps, plain);
        for (std::size_t a = 0; a < actions; ++a) {
            const double w = static_cast<double>(want[a]);
            CHECK(std::abs(got[a] - w) <= kTol * w);
        }
        CHECK(oracle::check_max_min(caps, plain, got, kTol).empty());
    }
}

TEST_CASE("simulate: single runnable and fair sharing on one host") {
    const auto p = support::star_platform({{"H", 1e9}});
    ApplicationModel one;
    one.tasks.push_back(support::single_task("T", "A", {}, 10e9, {}));
    one = normalized(one);
    auto r = simulate(one, p, place({{"A", "H"}}));
    CHECK(r.makespan == doctest::Approx(10.0).epsilon(1e-12));
    check_audit(r);

    ApplicationModel two;
    two.tasks.push_back(support::single_task("T1", "A", {}, 10e9, {}));
    two.tasks.push_back(support::single_task("T2", "B", {}, 10e9, {}));
    two = normalized(two);
    r = simulate(two, p, place({{"A", "H"}, {"B", "H"}}));
    CHECK(r.makespan == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(finish_of(r, "A") == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(finish_of(r, "B") == doctest::Approx(20.0).epsilon(1e-12));
    check_audit(r);
}

TEST_CASE("advance: re-share after the first completion") {
    const auto p = support::star_platform({{"H", 2.0}});
    ApplicationModel app;
    app.tasks.push_back(support::single_task("T1", "A", {}, 4.0, {}));
    app.tasks.push_back(support::single_task("T2", "B", {}, 6.0, {}));
    app = normalized(app);
    Kernel k(app, p, place({{"A", "H"}, {"B", "H"}}));
    CHECK(k.live_actions() == 2);
    REQUIRE(k.advance());
    CHECK(k.now() == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(k.state("A") == ProcessState::Done);
    CHECK(k.state("B") == ProcessState::Computing);
    REQUIRE(k.advance());
    CHECK(k.now() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(k.finished());
    CHECK_FALSE(k.advance());
    CHECK(k.now() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(k.result().makespan == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("empty application finishes immediately") {
    const auto p = support::star_platform({{"H"}});
    ApplicationModel app;
    Kernel k(app, p, {});
    CHECK(k.finished());
    CHECK_FALSE(k.advance());
    CHECK(simulate(app, p, {}).makespan == 0.0);
}

TEST_CASE("remote read after an activation: 0.1 s latency then 8 s of bytes") {
    const auto p = two_hosts(1e6, 0.1);
    ApplicationModel app;
    app.labels = {{"L", 8'000'000}};
    app.tasks.push_back(support::single_task("TA", "A", {}, 0.0, {"L"}));
    app.tasks.push_back(support::single_task("TB", "B", {"L"}, 0.0, {}));
    app.activations = {{"TA", "TB"}};
    app = normalized(app);
    const auto r = simulate(app, p, place({{"A", "h2"}, {"B", "h1"}}, {{"L", "h2"}}));
    // A's write is local, so it lands at t=0; the activation takes the route
    // latency; B's read then takes latency + size/bandwidth.
    CHECK(finish_of(r, "A") == 0.0);
    const double read_start = phase_time(r, "B", Phase::Reading, EventKind::PhaseEnter);
    const double read_end = phase_time(r, "B", Phase::Reading, EventKind::PhaseExit);
    CHECK(read_start == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(read_end - read_start == doctest::Approx(8.1).epsilon(1e-12));
    CHECK(r.makespan == doctest::Approx(8.2).epsilon(1e-12));
    check_audit(r);

    // Same exchange with the label on the reader's host: the write pays.
    const auto w = simulate(app, p, place({{"A", "h2"}, {"B", "h1"}}, {{"L", "h1"}}));
    CHECK(finish_of(w, "A") == doctest::Approx(8.1).epsilon(1e-12));
    CHECK(w.makespan == doctest::Approx(8.2).epsilon(1e-12));
}

TEST_CASE("concurrent reads") {
    SUBCASE("same link: both finish at 2B/W") {
        const auto p = two_hosts(1e6, 0.0);
        ApplicationModel app;
        app.labels = {{"X", 3'000'000}, {"Y", 3'000'000}};
        app.tasks.push_back(support::single_task("T", "R", {"X", "Y"}, 0.0, {}));
        app = normalized(app);
        const auto r = simulate(app, p, place({{"R", "h1"}}, {{"X", "h2"}, {"Y", "h2"}}));
        CHECK(r.makespan == doctest::Approx(6.0).epsilon(1e-12));
        int ends = 0;
        for (const auto& e : r.timeline) {
            if (e.kind == EventKind::TransferEnd) {
                CHECK(e.time == doctest::Approx(6.0).epsilon(1e-12));
                ++ends;
            }
        }
        CHECK(ends == 2);
        check_audit(r);
    }
    SUBCASE("disjoint routes: the slower one decides") {
        using namespace platform;
        const PlatformModel p(
            {{"R", "n", 1, 0, 0, false}, {"S1", "n", 1, 0, 0, false}, {"S2", "n", 1, 0, 0, false},
             {"FE", "f", 1, 0, 0, true}},
            {{"a", 1e6, 0.5}, {"b", 2e6, 0.25}},
            {{{"S1", "R", {"a"}}, true}, {{"S2", "R", {"b"}}, true}});
        ApplicationModel app;
        app.labels = {{"X", 2'000'000}, {"Y", 8'000'000}};
        app.tasks.push_back(support::single_task("T", "Q", {"X", "Y"}, 0.0, {}));
        app = normalized(app);
        const auto r = simulate(app, p, place({{"Q", "R"}}, {{"X", "S1"}, {"Y", "S2"}}));
        CHECK(r.makespan == doctest::Approx(std::max(0.5 + 2.0, 0.25 + 4.0)).epsilon(1e-12));
    }
}

TEST_CASE("source runnable with only a write enters Writing at t=0") {
    const auto p = two_hosts(1e6, 0.0);
    ApplicationModel app;
    app.labels = {{"L", 1'000'000}};
    app.tasks.push_back(support::single_task("T", "W", {}, 0.0, {"L"}));
    app = normalized(app);
    const auto r = simulate(app, p, place({{"W", "h1"}}, {{"L", "h2"}}));
    CHECK(phase_time(r, "W", Phase::Writing, EventKind::PhaseEnter) == 0.0);
    CHECK(r.makespan == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& e : r.timeline) {
        if (e.kind == EventKind::PhaseEnter || e.kind == EventKind::PhaseExit) {
            CHECK(e.phase != Phase::Waiting);
        }
    }
}

TEST_CASE("kernel states follow the lifecycle") {
    const auto p = two_hosts(1e6, 0.0, 1.0);
    ApplicationModel app;
    app.labels = {{"In", 1'000'000}, {"Out", 2'000'000}};
    app.tasks.push_back(support::single_task("T0", "P", {}, 1.0, {}));
    app.tasks.push_back(support::single_task("T1", "Q", {"In"}, 3.0, {"Out"}));
    app.activations = {{"T0", "T1"}};
    app = normalized(app);
    Kernel k(app, p, place({{"P", "h1"}, {"Q", "h1"}}, {{"In", "h2"}, {"Out", "h2"}}));
    CHECK(k.state("Q") == ProcessState::WaitingActivations);
    std::vector<ProcessState> seen{k.state("Q")};
    while (k.advance()) {
        if (seen.back() != k.state("Q")) {
            seen.push_back(k.state("Q"));
        }
    }
    CHECK(seen == std::vector<ProcessState>{ProcessState::WaitingActivations, ProcessState::Reading,
                                            ProcessState::Computing, ProcessState::Writing,
                                            ProcessState::Done});
    CHECK(k.result().makespan == doctest::Approx(1 + 1 + 3 + 2).epsilon(1e-12));
    CHECK_THROWS(k.state("nobody"));
}

TEST_CASE("mapping problems surface as MappingError") {
    const auto app = support::reference_escience();
    const auto p = support::reference_platform();
    auto m = mapping::map_random(app, p, 1);
    m.runnable_to_host.erase("R1");
    CHECK_THROWS_AS(simulate(app, p, m), MappingError);

    // A route that the mapping needs but the platform lacks.
    using namespace platform;
    const PlatformModel islands({{"A", "n", 1, 0, 0, false}, {"B", "n", 1, 0, 0, false},
                                 {"FE", "f", 1, 0, 0, true}},
                                {}, {});
    ApplicationModel two;
    two.labels = {{"L", 10}};
    two.tasks.push_back(support::single_task("T1", "X", {}, 1, {"L"}));
    two.tasks.push_back(support::single_task("T2", "Y", {"L"}, 1, {}));
    two = normalized(two);
    CHECK_THROWS_AS(simulate(two, islands, place({{"X", "A"}, {"Y", "B"}}, {{"L", "A"}})),
                    MappingError);
    CHECK_NOTHROW(simulate(two, islands, place({{"X", "A"}, {"Y", "A"}}, {{"L", "A"}})));
}

TEST_CASE("overload: 15 runnables against 4 on an identical host") {
    const auto p = support::star_platform({{"BUSY", 1e9}, {"CALM", 1e9}});
    ApplicationModel app;
    std::map<std::string, std::string> where;
    for (int i = 0; i < 19; ++i) {
        const auto id = "R" + std::to_string(100 + i);
        app.tasks.push_back(support::single_task("T" + std::to_string(i), id, {}, 1e9, {}));
        where[id] = i < 15 ? "BUSY" : "CALM";
    }
    app = normalized(app);
    const auto r = simulate(app, p, place(where));
    CHECK(finish_of(r, "R100") / finish_of(r, "R115") == doctest::Approx(15.0 / 4.0).epsilon(kTol));
    check_audit(r);
}

TEST_CASE("no-communication runs match the exact fair-share DAG oracle") {
    std::mt19937_64 rng(2718);
    for (int iter = 0; iter < 150; ++iter) {
        oracle::DagInstance inst;
        const std::size_t n = 1 + rng() % 8;
        const std::size_t hosts = 1 + rng() % 3;
        for (std::size_t h = 0; h < hosts; ++h) {
            inst.speed.push_back(static_cast<std::int64_t>(1 + rng() % 5));
        }
        for (std::size_t i = 0; i < n; ++i) {
            inst.work.push_back(static_cast<std::int64_t>(1 + rng() % 20));
            inst.host.push_back(rng() % hosts);
        }
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng() % 3 == 0) {
                    inst.edges.push_back({a, b});
                }
            }
        }

        std::vector<support::HostSpec> specs;
        for (std::size_t h = 0; h < hosts; ++h) {
            specs.push_back({"H" + std::to_string(h), static_cast<double>(inst.speed[h])});
        }
        const auto p = support::star_platform(specs, 1e6, 0.0);
        // Each runnable is its own task; labels stay on their only user's host.
        ApplicationModel app;
        std::map<std::string, std::string> rmap;
        std::map<std::string, std::string> lmap;
        auto rid = [](std::size_t i) { return "R" + std::to_string(i); };
        for (std::size_t i = 0; i < n; ++i) {
            const auto label = "L" + std::to_string(i);
            app.labels.push_back({label, 1000});
            app.tasks.push_back(support::single_task("T" + std::to_string(i), rid(i), {label},
                                                     static_cast<double>(inst.work[i]), {label}));
            rmap[rid(i)] = specs[inst.host[i]].id;
            lmap[label] = specs[inst.host[i]].id;
        }
        for (const auto& [a, b] : inst.edges) {
            app.activations.push_back({"T" + std::to_string(a), "T" + std::to_string(b)});
        }
        app = normalized(app);
        const auto r = simulate(app, p, place(rmap, lmap));
        const auto want = oracle::fair_share_schedule(inst);
        CHECK(r.makespan == doctest::Approx(static_cast<double>(want.makespan)).epsilon(kTol));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(finish_of(r, rid(i)) ==
                  doctest::Approx(static_cast<double>(want.finish[i])).epsilon(kTol));
        }
        check_audit(r);
    }
}

TEST_CASE("invariants over random eScience mappings") {
    const auto app = support::reference_escience();
    const auto p = support::reference_platform();
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto m = mapping::map_random(app, p, seed);
        const auto r = simulate(app, p, m);
        check_audit(r);
        double last = 0.0;
        double max_time = 0.0;
        for (const auto& e : r.timeline) {
            CHECK(e.time >= last);
            last = e.time;
            max_time = std::max(max_time, e.time);
        }
        CHECK(r.makespan == max_time);
        double total = 0.0;
        for (const auto& e : r.per_host_energy) {
            total += e.joules;
        }
        CHECK(r.total_energy == doctest::Approx(total).epsilon(kTol));
        for (const auto& s : r.spans) {
            CHECK(s.ready <= s.finish);
            CHECK(s.finish <= r.makespan);
        }

        // Determinism.
        const auto again = simulate(app, p, m);
        CHECK(again.timeline == r.timeline);
        CHECK(again.makespan == r.makespan);
        CHECK(again.total_energy == r.total_energy);
    }
}

TEST_CASE("host renaming leaves makespan and energy unchanged") {
    const auto app = support::reference_escience();
    const auto p = support::reference_platform();
    // Rename every host by reversing its id, with routes and mapping to match.
    auto rename = [](const std::string& id) { return "X" + std::string(id.rbegin(), id.rend()); };
    std::vector<platform::Host> hosts = p.hosts();
    for (auto& h : hosts) {
        h.id = rename(h.id);
    }
    std::vector<platform::RouteDeclaration> routes = p.route_declarations();
    for (auto& d : routes) {
        d.route.src = rename(d.route.src);
        d.route.dst = rename(d.route.dst);
    }
    const platform::PlatformModel q(hosts, p.links(), routes);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = mapping::map_random(app, p, seed);
        Mapping renamed = m;
        for (auto& [k, v] : renamed.runnable_to_host) {
            v = rename(v);
        }
        for (auto& [k, v] : renamed.label_to_host) {
            v = rename(v);
        }
        const auto a = simulate(app, p, m);
        const auto b = simulate(app, q, renamed);
        CHECK(a.makespan == b.makespan);
        CHECK(a.total_energy == doctest::Approx(b.total_energy).epsilon(1e-12));
    }
}

TEST_CASE("best, good, bad and worst reference mappings keep their order") {
    const auto app = support::reference_escience();
    const auto p = support::reference_platform();
    const auto best = simulate(app, p, mapping::map_all_on(app, p, "HOST_0_2"));
    const auto good = simulate(
        app, p, mapping::load_mapping(support::source_path("mappings/escience32-m_good.yaml"), app, p));
    const auto bad = simulate(
        app, p, mapping::load_mapping(support::source_path("mappings/escience32-m_bad.yaml"), app, p));
    const auto worst = simulate(app, p, mapping::map_all_on(app, p, "HOST_0_1"));
    CHECK(best.makespan < good.makespan);
    CHECK(good.makespan < bad.makespan);
    CHECK(bad.makespan < worst.makespan);
    CHECK(worst.makespan / best.makespan >= 5.0);
}

TEST_CASE("timeline can be switched off") {
    const auto app = support::reference_escience();
    const auto p = support::reference_platform();
    const auto m = mapping::map_random(app, p, 9);
    const auto with = simulate(app, p, m);
    const auto without = simulate(app, p, m, {.record_timeline = false});
    CHECK(without.timeline.empty());
    CHECK_FALSE(with.timeline.empty());
    CHECK(with.makespan == without.makespan);
    CHECK(with.total_energy == without.total_energy);
}

} // TEST_SUITE
