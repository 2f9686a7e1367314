#include <doctest.h>

#include <random>
#include <sstream>

#include "support/test_support.hpp"
#include "taskmapper/error.hpp"
#include "taskmapper/metrics.hpp"
#include "taskmapper/simkernel.hpp"

using namespace taskmapper;
using namespace taskmapper::metrics;

namespace {

platform::PlatformModel scaled(const platform::PlatformModel& p, double factor) {
    auto hosts = p.hosts();
    for (auto& h : hosts) {
        h.p_idle *= factor;
        h.p_full *= factor;
    }
    return platform::PlatformModel(hosts, p.links(), p.route_declarations());
}

BatchRow row(std::uint64_t id, double makespan, double energy) {
    BatchRow r;
    r.mapping_id = r.seed = id;
    r.strategy = "random";
    r.makespan = makespan;
    r.total_energy = energy;
    r.host_energy = {energy};
    return r;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("energy worked examples") {
    const auto p = support::star_platform({{"H", 1.0, 100.0, 200.0}});
    CHECK(integrate_energy({}, p, 2.0)[0] == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(integrate_energy({{{1.0, 1.0}}}, p, 2.0)[0] == doctest::Approx(300.0).epsilon(1e-12));
    CHECK(integrate_energy({{{1.0, 1.0}, {1.0, 0.0}}}, p, 2.0)[0] ==
          doctest::Approx(300.0).epsilon(1e-12));
    CHECK_THROWS_AS(integrate_energy({{{1.0, 1.5}}}, p, 2.0), DomainError);
    CHECK_THROWS_AS(integrate_energy({{{-1.0, 0.5}}}, p, 2.0), DomainError);
}

TEST_CASE("idle platform for two seconds") {
    const auto p = support::star_platform({{"H", 1.0, 100.0, 200.0}});
    SimulationResult r;
    r.makespan = 2.0;
    attach_energy(r, p);
    CHECK(r.per_host_energy.size() == 2);
    CHECK(r.per_host_energy[0].host == "H");
    CHECK(r.per_host_energy[0].joules == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(r.total_energy == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("interval refinement does not change energy") {
    std::mt19937_64 rng(8);
    const auto p = support::star_platform({{"H", 1.0, 64.0, 192.0}});
    for (int i = 0; i < 500; ++i) {
        // Dyadic values keep every product exact.
        const double d = static_cast<double>(1 + rng() % 1024) / 256.0;
        const double cut = static_cast<double>(rng() % 1024) / 1024.0 * d;
        const double u = static_cast<double>(rng() % 5) / 4.0;
        const double whole = integrate_energy({{{d, u}}}, p, d)[0];
        const double split = integrate_energy({{{cut, u}, {d - cut, u}}}, p, d)[0];
        CHECK(whole == split);
    }
}

TEST_CASE("energy scales exactly with power and respects the idle floor") {
    const auto app = support::reference_escience();
    const auto p = support::reference_platform();
    const auto p2 = scaled(p, 2.0);
    double idle = 0.0;
    for (const auto& h : p.hosts()) {
        idle += h.p_idle;
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = mapping::map_random(app, p, seed);
        const auto a = simkernel::simulate(app, p, m, {.record_timeline = false});
        const auto b = simkernel::simulate(app, p2, m, {.record_timeline = false});
        CHECK(b.total_energy == 2.0 * a.total_energy);
        CHECK(a.total_energy >= idle * a.makespan * (1 - 1e-12));
    }
}

TEST_CASE("swapping two identical hosts keeps total energy") {
    const auto p = support::star_platform({{"A", 2.0, 10.0, 30.0}, {"B", 2.0, 10.0, 30.0}}, 100.0, 0.01);
    appmodel::ApplicationModel app;
    app.labels = {{"L", 50}};
    app.tasks.push_back(support::single_task("T1", "X", {}, 8.0, {"L"}));
    app.tasks.push_back(support::single_task("T2", "Y", {"L"}, 3.0, {}));
    app.tasks.push_back(support::single_task("T3", "Z", {}, 5.0, {}));
    app.activations = {{"T1", "T2"}};
    app = appmodel::normalize_application(app);
    const mapping::Mapping m{{{"X", "A"}, {"Y", "B"}, {"Z", "A"}}, {{"L", "A"}}};
    const mapping::Mapping swapped{{{"X", "B"}, {"Y", "A"}, {"Z", "B"}}, {{"L", "B"}}};
    const auto a = simkernel::simulate(app, p, m);
    const auto b = simkernel::simulate(app, p, swapped);
    CHECK(a.makespan == b.makespan);
    CHECK(a.total_energy == doctest::Approx(b.total_energy).epsilon(1e-12));
}

TEST_CASE("batch summary") {
    SUBCASE("single row") {
        const std::vector<BatchRow> rows{row(4, 1.5, 20.0)};
        const auto s = summarize_batch(rows);
        CHECK(s.rows == 1);
        CHECK(s.makespan.min == 1.5);
        CHECK(s.makespan.max == 1.5);
        CHECK(s.makespan.mean == 1.5);
        CHECK(s.makespan.argmin == 4);
        CHECK(s.energy.argmax == 4);
        CHECK_FALSE(s.wall_ms.has_value());
    }
    SUBCASE("empty") {
        CHECK_THROWS_AS(summarize_batch(std::vector<BatchRow>{}), EmptyBatchError);
    }
    SUBCASE("argmin/argmax, first row wins ties, invariant under rescaling") {
        std::vector<BatchRow> rows{row(0, 3.0, 9.0), row(1, 1.0, 12.0), row(2, 1.0, 7.0),
                                   row(3, 4.0, 12.0)};
        const auto s = summarize_batch(rows);
        CHECK(s.makespan.argmin == 1);
        CHECK(s.makespan.argmax == 3);
        CHECK(s.energy.argmin == 2);
        CHECK(s.energy.argmax == 1);
        CHECK(s.makespan.mean == doctest::Approx(2.25));
        for (auto& r : rows) {
            r.total_energy *= 3.6e-3;
        }
        const auto k = summarize_batch(rows);
        CHECK(k.energy.argmin == s.energy.argmin);
        CHECK(k.energy.argmax == s.energy.argmax);
    }
    SUBCASE("reference mappings: best is argmin, worst is argmax") {
        const auto app = support::reference_escience();
        const auto p = support::reference_platform();
        const std::vector<mapping::Mapping> maps = {
            mapping::map_all_on(app, p, "HOST_0_2"),
            mapping::parse_mapping(support::source_path("mappings/escience32-m_good.yaml")),
            mapping::parse_mapping(support::source_path("mappings/escience32-m_bad.yaml")),
            mapping::map_all_on(app, p, "HOST_0_1")};
        std::vector<BatchRow> rows;
        for (std::size_t i = 0; i < maps.size(); ++i) {
            rows.push_back(make_row(i, i, "reference", simkernel::simulate(app, p, maps[i]), false));
        }
        const auto s = summarize_batch(rows);
        CHECK(s.makespan.argmin == 0);
        CHECK(s.makespan.argmax == 3);
    }
    SUBCASE("wall time statistics only when every row has one") {
        std::vector<BatchRow> rows{row(0, 1, 1), row(1, 2, 2)};
        rows[0].sim_wall_ms = 0.5;
        CHECK_FALSE(summarize_batch(rows).wall_ms.has_value());
        rows[1].sim_wall_ms = 0.25;
        REQUIRE(summarize_batch(rows).wall_ms.has_value());
        CHECK(summarize_batch(rows).wall_ms->argmin == 1);
    }
}

TEST_CASE("format_significant") {
    CHECK(format_significant(0.0102) == "0.0102000000");
    CHECK(format_significant(1.02) == "1.02000000");
    CHECK(format_significant(775.2) == "775.200000");
    CHECK(format_significant(200.0) == "200.000000");
    CHECK(format_significant(123456789.0) == "123456789");
    CHECK(format_significant(123456789012.0) == "123456789000");
    CHECK(format_significant(9.9999999999) == "10.0000000");
    CHECK(format_significant(-2.5) == "-2.50000000");
    CHECK(format_significant(1.5e-7) == "0.000000150000000");
    CHECK(format_significant(0.0) == "0");
    CHECK(format_significant(1.0 / 3.0) == "0.333333333");
    CHECK(format_significant(2.0 / 3.0, 3) == "0.667");

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> mant(1.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = mant(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
        const auto s = format_significant(v);
        CHECK(s.find('e') == std::string::npos);
        std::string digits;
        bool started = false;
        for (char c : s) {
            if (c >= '1' && c <= '9') {
                started = true;
            }
            if (started && c != '.') {
                digits.push_back(c);
            }
        }
        // Trailing zeros of integers past the 9th digit are padding.
        CHECK(digits.size() >= 9);
        CHECK(std::stod(s) == doctest::Approx(v).epsilon(1e-8));
    }
}

TEST_CASE("CSV layout") {
    const auto p = support::reference_platform();
    CHECK(csv_header(p) ==
          "mapping_id,seed,strategy,makespan_s,total_energy_j,sim_wall_ms,energy_HOST_0_0_j,"
          "energy_HOST_0_1_j,energy_HOST_0_2_j,energy_HOST_1_0_j,energy_HOST_1_1_j,"
          "energy_FRONTEND_j");

    auto r = row(7, 0.5, 12.25);
    r.host_energy = {1, 2, 3, 4, 5, 6};
    std::ostringstream a;
    write_csv_row(a, r);
    CHECK(a.str() == "7,7,random,0.500000000,12.2500000,,1.00000000,2.00000000,3.00000000,"
                     "4.00000000,5.00000000,6.00000000\n");
    r.sim_wall_ms = 1.25;
    std::ostringstream b;
    write_csv_row(b, r);
    CHECK(b.str().find(",12.2500000,1.25000000,") != std::string::npos);

    const std::vector<BatchRow> rows{row(3, 2.0, 10.0), row(4, 1.0, 30.0)};
    std::ostringstream c;
    write_summary_comments(c, summarize_batch(rows));
    CHECK(c.str() == "# rows=2\n"
                     "# min_makespan=1.00000000 id=4\n"
                     "# max_makespan=2.00000000 id=3\n"
                     "# mean_makespan=1.50000000\n"
                     "# min_total_energy=10.0000000 id=3\n"
                     "# max_total_energy=30.0000000 id=4\n"
                     "# mean_total_energy=20.0000000\n");

    const auto single = support::star_platform({{"H"}});
    std::ostringstream d;
    write_batch_csv(d, single, rows, false);
    const auto text = d.str();
    CHECK(text.find('#') == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

} // TEST_SUITE
