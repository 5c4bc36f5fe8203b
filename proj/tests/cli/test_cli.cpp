#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qcrapp/csv.hpp"
#include "qcrapp/schema.hpp"

namespace fs = std::filesystem;
using namespace qcr::app;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("qcrlab_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the CLI with stderr captured to `err`; returns the exit status.
int qcrlab(const std::string& args, std::string* err = nullptr) {
    const fs::path log = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + QCRLAB_EXE + "\" " + args + " 2> \"" + log.string() + "\"";
    const int raw = std::system(cmd.c_str());
    if (err) *err = slurp(log);
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string cfg(const char* name) { return std::string(QCR_SOURCE_DIR "/configs/") + name; }

fs::path write_config(const std::string& name, const json& j) {
    const auto p = scratch() / name;
    std::ofstream(p) << j.dump();
    return p;
}

} // namespace

TEST_CASE("sweep-bias: 281 points spanning more than three decades") {
    const auto out = scratch() / "sweep.csv";
    REQUIRE(qcrlab("--config " + cfg("sweep_bias.json") + " --out " + out.string()) == 0);
    const Table t = read_table_file(out.string());
    REQUIRE(t.rows.size() == 281);
    CHECK(t.columns == std::vector<std::string>{"bias", "v", "gamma_up", "gamma_down", "p1", "T_eff"});
    CHECK(t.units == std::vector<std::string>{"1", "V", "1/s", "1/s", "1", "K"});
    double lo = 1e300, hi = 0;
    for (const auto& r : t.rows) {
        lo = std::min(lo, r[3]);
        hi = std::max(hi, r[3]);
    }
    CHECK(hi / lo >= 1e3);
    CHECK(t.rows.front()[0] == 0.0);
    CHECK(t.rows.back()[0] == 1.4);

    const json side = json::parse(slurp(out.string() + ".json"));
    CHECK(side["command"] == "sweep-bias");
    CHECK(side["grid"].size() == 281);
    CHECK(side["params"]["junction"]["delta_uev"].get<double>() > 0.0);
    CHECK(side["params"]["junction"]["dynes"] == 1e-4);
    CHECK(side["params"]["device"]["junctions"] == 2);
    CHECK(side["params"]["mode"].contains("rho"));
    CHECK(side["columns"].size() == 6);
}

TEST_CASE("determinism: identical config gives byte-identical output at any thread count") {
    const auto a = scratch() / "det_a.csv";
    const auto b = scratch() / "det_b.csv";
    REQUIRE(qcrlab("--config " + cfg("sweep_bias.json") + " --threads 1 --out " + a.string()) == 0);
    REQUIRE(qcrlab("--config " + cfg("sweep_bias.json") + " --threads 8 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a.string() + ".json") == slurp(b.string() + ".json"));

    const auto c = scratch() / "cal_a.csv";
    const auto d = scratch() / "cal_b.csv";
    REQUIRE(qcrlab("--config " + cfg("calibrate.json") + " --seed 9 --out " + c.string()) == 0);
    REQUIRE(qcrlab("--config " + cfg("calibrate.json") + " --seed 9 --threads 3 --out " + d.string()) == 0);
    CHECK(slurp(c) == slurp(d));
    CHECK(slurp(c.string() + ".json") == slurp(d.string() + ".json"));
}

TEST_CASE("malformed config: negative r_t exits 2 and writes nothing") {
    json j = json::parse(slurp(cfg("sweep_bias.json")));
    j["params"]["junction"]["r_t"] = -5;
    const auto path = write_config("neg_rt.json", j);
    const auto out = scratch() / "neg_rt.csv";
    std::string err;
    CHECK(qcrlab("--config " + path.string() + " --out " + out.string(), &err) == 2);
    CHECK(err.find("params.junction.r_t") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
    CHECK_FALSE(fs::exists(out.string() + ".json"));
    CHECK_FALSE(fs::exists(out.string() + ".partial"));
}

TEST_CASE("exit codes") {
    std::string err;
    const auto out = scratch() / "x.csv";
    const auto bad_json = scratch() / "broken.json";
    std::ofstream(bad_json) << "{ \"command\": ";
    CHECK(qcrlab("--config " + bad_json.string() + " --out " + out.string()) == 2);
    CHECK(qcrlab("--config " + (scratch() / "missing.json").string()) == 2);
    CHECK(qcrlab("--bogus-flag") == 2);

    // No output path anywhere.
    json j = json::parse(slurp(cfg("thermal.json")));
    j.erase("out_path");
    CHECK(qcrlab("--config " + write_config("no_out.json", j).string(), &err) == 2);
    CHECK(err.find("out_path") != std::string::npos);

    // Hot bath on a short ladder: the truncation guard fails numerically.
    json hot = json::parse(slurp(cfg("reset_sim.json")));
    hot["params"]["bath"] = {{"gamma", 1e8}, {"temp", 5.0}};
    hot["params"]["n_cut"] = 20;
    const auto hot_out = scratch() / "hot.csv";
    CHECK(qcrlab("--config " + write_config("hot.json", hot).string() + " --out " + hot_out.string(), &err) == 3);
    CHECK(err.find("numeric failure") != std::string::npos);
    CHECK_FALSE(fs::exists(hot_out));
}

TEST_CASE("every shipped config runs and its CSV round-trips") {
    for (const auto& entry : fs::directory_iterator(QCR_SOURCE_DIR "/configs")) {
        if (entry.path().extension() != ".json") continue;
        const auto name = entry.path().stem().string();
        const auto out = scratch() / (name + ".csv");
        INFO(name);
        REQUIRE(qcrlab("--config " + entry.path().string() + " --out " + out.string()) == 0);
        const std::string bytes = slurp(out);
        std::istringstream in(bytes);
        const Table t = read_table(in);
        CHECK(t.rows.size() > 0);
        std::ostringstream again;
        write_table(again, t);
        CHECK(again.str() == bytes);
        CHECK(json::parse(slurp(out.string() + ".json"))["command"].is_string());
    }
}

TEST_CASE("diff-lamb through the CLI") {
    json base = json::parse(slurp(cfg("lamb_shift.json")));
    base["grid"]["points"] = 6;
    base["params"]["spectrum_points"] = 1001;
    const auto a = scratch() / "lamb_a.csv";
    REQUIRE(qcrlab("--config " + write_config("lamb_a.json", base).string() + " --out " + a.string()) == 0);
    json j = base;
    j["params"]["junction"]["r_t"] = 40000;
    const auto b = scratch() / "lamb_b.csv";
    REQUIRE(qcrlab("--config " + write_config("lamb_b.json", j).string() + " --out " + b.string()) == 0);

    const auto d_aa = scratch() / "d_aa.csv";
    const auto d_ab = scratch() / "d_ab.csv";
    const auto d_ba = scratch() / "d_ba.csv";
    REQUIRE(qcrlab("diff-lamb " + a.string() + " " + a.string() + " --out " + d_aa.string()) == 0);
    REQUIRE(qcrlab("diff-lamb " + a.string() + " " + b.string() + " --out " + d_ab.string()) == 0);
    REQUIRE(qcrlab("diff-lamb " + b.string() + " " + a.string() + " --out " + d_ba.string()) == 0);

    const Table ta = read_table_file(a.string()), tb = read_table_file(b.string());
    const Table aa = read_table_file(d_aa.string()), ab = read_table_file(d_ab.string()),
                ba = read_table_file(d_ba.string());
    REQUIRE(ab.rows.size() == ta.rows.size());
    for (std::size_t i = 0; i < ta.rows.size(); ++i) {
        CHECK(aa.rows[i][1] == 0.0);
        CHECK(ab.rows[i][1] == ta.rows[i][2] - tb.rows[i][2]);
        CHECK(ab.rows[i][1] == -ba.rows[i][1]);
    }

    // Mismatched grids.
    json k = base;
    k["grid"]["points"] = 3;
    const auto c = scratch() / "lamb_c.csv";
    REQUIRE(qcrlab("--config " + write_config("lamb_c.json", k).string() + " --out " + c.string()) == 0);
    const auto d_ac = scratch() / "d_ac.csv";
    CHECK(qcrlab("diff-lamb " + a.string() + " " + c.string() + " --out " + d_ac.string()) == 2);
    CHECK_FALSE(fs::exists(d_ac));
}

TEST_CASE("calibrate ingests its own output") {
    const auto first = scratch() / "cal_first.csv";
    REQUIRE(qcrlab("--config " + cfg("calibrate.json") + " --seed 4 --out " + first.string()) == 0);
    const json side = json::parse(slurp(first.string() + ".json"));
    json j = {{"command", "calibrate"},
              {"params", {{"kind", "power"}, {"data", first.string()}, {"p_out_zero", side["params"]["p_out_zero"]}}}};
    const auto second = scratch() / "cal_second.csv";
    REQUIRE(qcrlab("--config " + write_config("cal_data.json", j).string() + " --out " + second.string()) == 0);
    const json side2 = json::parse(slurp(second.string() + ".json"));
    CHECK(side2["result"]["gain"] == side["result"]["gain"]);
    CHECK(side2["result"]["t_noise"] == side["result"]["t_noise"]);
    CHECK(slurp(second) == slurp(first));
}

TEST_CASE("QCRLAB_LOG raises verbosity") {
    std::string err;
    const auto out = scratch() / "log.csv";
    ::setenv("QCRLAB_LOG", "info", 1);
    REQUIRE(qcrlab("--config " + cfg("thermal.json") + " --out " + out.string(), &err) == 0);
    ::unsetenv("QCRLAB_LOG");
    CHECK(err.find("wrote 29 rows") != std::string::npos);
    REQUIRE(qcrlab("--config " + cfg("thermal.json") + " --out " + out.string(), &err) == 0);
    CHECK(err.empty());
}
