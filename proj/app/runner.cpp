#include "qcrapp/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qcrapp/commands.hpp"
#include "qcrapp/sweep.hpp"
#include "qcrlab/errors.hpp"

namespace qcr::app {

namespace fs = std::filesystem;

namespace {

// Written next to the target and renamed into place once complete.
class StagedFile {
public:
    explicit StagedFile(fs::path target) : target_(std::move(target)), tmp_(target_.string() + ".partial") {
        os_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!os_) throw ConfigError("out_path: cannot write " + target_.string());
    }
    ~StagedFile() {
        if (!committed_) {
            os_.close();
            std::error_code ec;
            fs::remove(tmp_, ec);
        }
    }
    std::ofstream& stream() { return os_; }
    void commit() {
        os_.close();
        if (!os_) throw std::runtime_error("write failed: " + tmp_.string());
        fs::rename(tmp_, target_);
        committed_ = true;
    }

private:
    fs::path target_;
    fs::path tmp_;
    std::ofstream os_;
    bool committed_{false};
};

template <class F>
int guarded(F&& f) {
    try {
        f();
        return kExitOk;
    } catch (const ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        return kExitConfig;
    } catch (const DomainError& e) {
        spdlog::error("invalid parameters: {}", e.what());
        return kExitConfig;
    } catch (const NumericError& e) {
        spdlog::error("numeric failure: {} (achieved {:g})", e.what(), e.achieved());
        return kExitNumeric;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitFailure;
    }
}

} // namespace

void init_logging() {
    auto logger = spdlog::stderr_color_mt("qcrlab");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lv = std::getenv("QCRLAB_LOG")) spdlog::set_level(spdlog::level::from_str(lv));
}

int run(const RunOptions& opt) {
    return guarded([&] {
        const RunConfig cfg = load_config_file(opt.config_path);
        const auto out = opt.out_path ? opt.out_path : cfg.out_path;
        if (!out) throw ConfigError("out_path: not given in the config or with --out");
        spdlog::info("{}: {} grid points", cfg.command, cfg.grid.size());

        Plan plan = plan_run(cfg, opt.seed);
        json side = provenance(cfg);
        side["columns"] = plan.columns;
        side["units"] = plan.units;
        side["result"] = plan.result;
        if (plan.uses_seed) side["seed"] = opt.seed;

        StagedFile csv(*out);
        StagedFile meta(*out + ".json");
        write_header(csv.stream(), plan.columns, plan.units);
        const unsigned nt = resolve_threads(opt.threads);
        ordered_sweep(plan.rows, nt, plan.row, [&](std::size_t i, const Row& r) {
            write_row(csv.stream(), r);
            spdlog::debug("row {} done", i);
        });
        meta.stream() << side.dump(2) << '\n';
        csv.commit();
        meta.commit();
        spdlog::info("wrote {} rows to {}", plan.rows, *out);
    });
}

int run_diff_lamb(const std::string& a, const std::string& b, const std::string& out) {
    return guarded([&] {
        const Table d = diff_lamb(read_table_file(a), read_table_file(b));
        StagedFile f(out);
        write_table(f.stream(), d);
        f.commit();
    });
}

} // namespace qcr::app
