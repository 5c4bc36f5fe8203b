#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "qcrapp/commands.hpp"
#include "qcrapp/config.hpp"
#include "qcrapp/csv.hpp"
#include "qcrapp/schema.hpp"
#include "qcrapp/sweep.hpp"
#include "qcrlab/constants.hpp"
#include "qcrlab/spectrum.hpp"

using namespace qcr;
using namespace qcr::app;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return json::parse(in);
}

std::string emit(const Table& t) {
    std::ostringstream os;
    write_table(os, t);
    return os.str();
}

std::string error_of(json doc) {
    try {
        resolve_config(std::move(doc));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("schema: shared valid/invalid cases") {
    const auto cases = read_json(QCR_SOURCE_DIR "/tests/cli/schema_cases.json");
    const SchemaValidator v(config_schema());
    for (const auto& c : cases) {
        json inst = c["config"];
        bool ok = true;
        try {
            v.apply(inst);
        } catch (const ConfigError&) {
            ok = false;
        }
        CHECK_MESSAGE(ok == c["valid"].get<bool>(), c["config"].dump());
    }
}

TEST_CASE("schema: defaults are filled recursively") {
    auto cfg = resolve_config(json::parse(R"({"command":"sweep-bias","params":{},"grid":{"values":[0.5]}})"));
    const auto& p = cfg.params;
    CHECK(p["junction"]["delta_uev"] == 200.0);
    CHECK(p["junction"]["dynes"] == 1e-4);
    CHECK(p["junction"]["r_t"] == 20000);
    CHECK(p["device"]["junctions"] == 2);
    CHECK(p["mode"]["f_ghz"] == 10);
    CHECK(p["mode"]["rho"].get<double>() == doctest::Approx(default_rho(0.2, 50.0)).epsilon(1e-15));

    auto rf = resolve_config(json::parse(R"({"command":"rf-sweep","params":{},"grid":{"values":[0]}})"));
    CHECK(rf.params["support"]["f_ghz"] == 6);
    CHECK(rf.params["support"]["impedance"] == 50);
    CHECK(rf.params["statistics"] == "coherent");
}

TEST_CASE("config: errors name the offending field") {
    auto base = json::parse(R"({"command":"sweep-bias","params":{},"grid":{"values":[0, 0.5]}})");
    auto with = [&](const char* ptr, json v) {
        auto d = base;
        d[json::json_pointer(ptr)] = std::move(v);
        return error_of(d);
    };
    CHECK(with("/params/junction/r_t", -5).rfind("params.junction.r_t:", 0) == 0);
    CHECK(with("/params/mode/impedance", 0).rfind("params.mode.impedance:", 0) == 0);
    CHECK(with("/params/junction/bogus", 1).rfind("params.junction.bogus: unknown field", 0) == 0);
    CHECK(with("/grid/values", json::array({0.0, 0.5, 0.2})).rfind("grid:", 0) == 0);
    CHECK(with("/grid/values", json::array({0.0, -0.5})).rfind("grid:", 0) == 0);

    auto both = base;
    both["params"]["junction"] = {{"delta_uev", 200}, {"delta_ghz", 50}};
    CHECK(error_of(both).rfind("params.junction.delta_ghz:", 0) == 0);

    auto ep = json::parse(R"({"command":"ep-map","params":{"kappa1":1e6,"kappa_ext":2e6},"grid":{"values":[0]}})");
    CHECK(error_of(ep).rfind("params.kappa_ext:", 0) == 0);
    auto th = json::parse(R"({"command":"thermal","params":{"a_coeff":1,"ep_sigma":2e9,"volume":1e-19},"grid":{"values":[0.1]}})");
    CHECK(error_of(th).rfind("params:", 0) == 0);
    auto cal = json::parse(R"({"command":"calibrate","params":{"data":"x.csv"}})");
    CHECK(error_of(cal).rfind("params.p_out_zero:", 0) == 0);
}

TEST_CASE("config: energy units at the boundary") {
    auto a = resolve_config(json::parse(R"({"command":"sweep-bias","params":{"junction":{"delta_ghz":50}},"grid":{"values":[1]}})"));
    const double d = junction_from(a.params["junction"]).delta;
    CHECK(d == doctest::Approx(planck * 50e9).epsilon(1e-14));
    CHECK(bias_from_x(1.0, junction_from(a.params["junction"])) == doctest::Approx(2.0 * planck * 50e9 / e_charge).epsilon(1e-14));
}

TEST_CASE("config: grid expansion") {
    auto c = resolve_config(json::parse(R"({"command":"sweep-bias","params":{},"grid":{"start":0,"stop":1.4,"points":281}})"));
    REQUIRE(c.grid.size() == 281);
    CHECK(c.grid.front() == 0.0);
    CHECK(c.grid.back() == 1.4);
    for (std::size_t i = 1; i < c.grid.size(); ++i) CHECK(c.grid[i] > c.grid[i - 1]);
    auto d = resolve_config(json::parse(R"({"command":"thermal","params":{},"grid":{"start":0.3,"stop":0.1,"points":3}})"));
    REQUIRE(d.grid.size() == 3);
    CHECK(d.grid[0] == 0.3);
    CHECK(d.grid[1] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(d.grid[2] == 0.1);
}

TEST_CASE("csv: values round-trip exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-320, 300);
    Table t;
    t.columns = {"a", "b", "c"};
    t.units = {"1", "V", "1/s"};
    for (int i = 0; i < 2000; ++i) t.rows.push_back({mant(rng) * std::pow(10.0, ex(rng)), mant(rng), std::ldexp(mant(rng), ex(rng))});
    t.rows.push_back({0.0, -0.0, std::numeric_limits<double>::denorm_min()});
    t.rows.push_back({std::numeric_limits<double>::max(), -std::numeric_limits<double>::infinity(), std::nan("")});
    t.rows.push_back({-std::nan(""), 1e-300, 0.1});

    const std::string once = emit(t);
    std::istringstream in(once);
    const Table back = read_table(in);
    CHECK(back.columns == t.columns);
    CHECK(back.units == t.units);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t k = 0; k < 3; ++k) {
            const double x = t.rows[i][k], y = back.rows[i][k];
            if (std::isnan(x)) {
                CHECK(std::isnan(y));
            } else {
                CHECK(std::signbit(x) == std::signbit(y));
                CHECK(x == y);
            }
        }
    CHECK(emit(back) == once);
    CHECK(format_value(-std::nan("")) == "nan");
}

TEST_CASE("csv: malformed input") {
    auto parse = [](const char* s) {
        std::istringstream in(s);
        return read_table(in);
    };
    CHECK_THROWS_AS(parse(""), ConfigError);
    CHECK_THROWS_AS(parse("a,b\n1\n"), ConfigError);
    CHECK_THROWS_AS(parse("a,b\n1,x\n"), ConfigError);
    CHECK_THROWS_AS(parse("# V\na,b\n1,2\n"), ConfigError);
    const auto t = parse("bias_V,power_W\n1,2\n3,4\n");
    CHECK(t.units.empty());
    CHECK(t.rows.size() == 2);
    CHECK(t.column("power_W") == 1);
    CHECK_THROWS_AS(t.column("nope"), ConfigError);
}

TEST_CASE("ordered_sweep: grid order regardless of completion order") {
    for (unsigned threads : {1u, 2u, 7u, 32u}) {
        std::vector<std::size_t> seen;
        ordered_sweep(
            200, threads,
            [](std::size_t i) {
                volatile double acc = 0;
                for (std::size_t k = 0; k < (199 - i) * 500; ++k) acc = acc + 1.0;
                return Row{static_cast<double>(i)};
            },
            [&](std::size_t i, const Row& r) {
                CHECK(r[0] == static_cast<double>(i));
                seen.push_back(i);
            });
        REQUIRE(seen.size() == 200);
        for (std::size_t i = 0; i < 200; ++i) CHECK(seen[i] == i);
    }
    ordered_sweep(0, 4, [](std::size_t) { return Row{}; }, [](std::size_t, const Row&) { FAIL("no rows"); });
}

TEST_CASE("ordered_sweep: first failure propagates") {
    std::atomic<int> calls{0};
    CHECK_THROWS_AS(ordered_sweep(
                        1000, 4,
                        [&](std::size_t i) {
                            ++calls;
                            if (i == 10) throw std::runtime_error("boom");
                            return Row{0.0};
                        },
                        [](std::size_t, const Row&) {}),
                    std::runtime_error);
    CHECK(calls.load() < 1000);
    CHECK_THROWS_AS(ordered_sweep(
                        5, 2, [](std::size_t) { return Row{0.0}; },
                        [](std::size_t i, const Row&) {
                            if (i == 3) throw std::logic_error("sink");
                        }),
                    std::logic_error);
}

TEST_CASE("diff_lamb: zeros, antisymmetry, subtraction oracle") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> w(0.0, 1e6);
    auto random_table = [&] {
        Table t;
        t.columns = {"bias", "v", "omega_l", "shift_mhz", "abs_err"};
        t.units = {"1", "V", "rad/s", "MHz", "rad/s"};
        for (int i = 0; i < 57; ++i) {
            const double x = 0.025 * i;
            const double o = w(rng);
            t.rows.push_back({x, 4e-4 * x, o, o / two_pi * 1e-6, 1e-3});
        }
        return t;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const Table a = random_table();
        const Table b = random_table();
        const Table same = diff_lamb(a, a);
        for (const auto& r : same.rows) CHECK(r[1] == 0.0);
        const Table ab = diff_lamb(a, b);
        const Table ba = diff_lamb(b, a);
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(ab.rows[i][0] == a.rows[i][0]);
            CHECK(ab.rows[i][1] == a.rows[i][2] - b.rows[i][2]);
            CHECK(ab.rows[i][1] == -ba.rows[i][1]);
            CHECK(ab.rows[i][2] == doctest::Approx(ab.rows[i][1] / two_pi * 1e-6).epsilon(1e-15));
        }
    }
    Table a = random_table();
    Table shorter = a;
    shorter.rows.pop_back();
    CHECK_THROWS_AS(diff_lamb(a, shorter), ConfigError);
    Table shifted = a;
    shifted.rows[3][0] += 1e-12;
    CHECK_THROWS_AS(diff_lamb(a, shifted), ConfigError);
}

TEST_CASE("plan_run: sweep-bias rows equal the library calls") {
    auto cfg = load_config_file(QCR_SOURCE_DIR "/configs/sweep_bias.json");
    const Plan p = plan_run(cfg, 0);
    REQUIRE(p.rows == 281);
    CHECK(p.columns == std::vector<std::string>{"bias", "v", "gamma_up", "gamma_down", "p1", "T_eff"});
    const auto j = junction_from(cfg.params["junction"]);
    const auto m = mode_from(cfg.params["mode"]);
    const auto dev = device_from(cfg.params["device"]);
    for (std::size_t i : {0u, 70u, 140u, 280u}) {
        const Row r = p.row(i);
        const auto rates = transition_rates(r[1], m, j, dev);
        CHECK(r[2] == rates.up);
        CHECK(r[3] == rates.down);
        CHECK(r[4] == steady_p1(rates));
    }
}

TEST_CASE("plan_run: calibrate recovers the injected chain from the seeded trace") {
    auto cfg = load_config_file(QCR_SOURCE_DIR "/configs/calibrate.json");
    const Plan p1 = plan_run(cfg, 1);
    const Plan p2 = plan_run(cfg, 1);
    const Plan p3 = plan_run(cfg, 2);
    CHECK(p1.result == p2.result);
    CHECK(p1.result != p3.result);
    CHECK(p1.result["gain"].get<double>() == doctest::Approx(1e5).epsilon(0.01));
    CHECK(p1.result["t_noise"].get<double>() == doctest::Approx(5.0).epsilon(0.02));

    cfg.params["synthetic"]["noise_rel"] = 0.0;
    const Plan exact = plan_run(cfg, 1);
    CHECK(exact.result["gain"].get<double>() == doctest::Approx(1e5).epsilon(1e-6));
    CHECK(exact.result["t_noise"].get<double>() == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("plan_run: reflection calibration on a synthetic trace") {
    auto cfg = resolve_config(json::parse(R"({"command":"calibrate",
        "params":{"kind":"reflection","synthetic":{"f_r_ghz":4.55,"gamma_tr":1e7,"gamma_int":2e6}},
        "grid":{"start":4.54,"stop":4.56,"points":401}})"));
    const Plan p = plan_run(cfg, 3);
    CHECK(p.result["f_r_hz"].get<double>() == doctest::Approx(4.55e9).epsilon(1e-9));
    CHECK(p.result["gamma_tr"].get<double>() == doctest::Approx(1e7).epsilon(1e-6));
    CHECK(p.result["gamma_int"].get<double>() == doctest::Approx(2e6).epsilon(1e-6));
}
