#pragma once

// Campaign execution: a bounded worker pool runs every scenario of the
// pick-freeze design, appending one durable JSON record per attempt to
// runs.jsonl. Restarts skip records whose status is done and whose scenario
// checksum still matches. The result table is assembled in design order, so
// it is bit-identical no matter how many workers ran or in which order runs
// finished.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "swegsa/ascii_grid.hpp"
#include "swegsa/campaign/config.hpp"
#include "swegsa/campaign/probe.hpp"
#include "swegsa/campaign/scenario.hpp"
#include "swegsa/csv.hpp"
#include "swegsa/gsa/design.hpp"
#include "swegsa/swe/solver.hpp"

namespace swegsa::campaign {

struct RunTask {
    std::string run_id;
    std::string matrix;  // "A", "B" or "AB<i>"
    int row = 0;
    std::vector<double> values;
};

struct RunOutput {
    std::vector<double> scalars;        // one per scalar probe, config order
    std::optional<Raster> map;          // present when a full_map probe exists
};

using SimulatorFn = std::function<RunOutput(const StudyConfig&, const Scenario&)>;

/// Initial flow state for a scenario DEM per the configured init spec.
inline swe::FlowState initial_state(const StudyConfig& cfg, const Raster& dem) {
    const ScenarioSpec& sc = cfg.scenario;
    swe::FlowState state(dem.grid);
    switch (sc.init.kind) {
        case InitSpec::Kind::Dry:
            break;
        case InitSpec::Kind::Depth:
            for (auto& h : state.h) h = sc.init.value;
            break;
        case InitSpec::Kind::Level:
            for (std::size_t c = 0; c < state.h.size(); ++c)
                state.h[c] = std::max(0.0, sc.init.value - dem.values[c]);
            break;
        case InitSpec::Kind::DepthRaster: {
            Raster depth = read_ascii_grid(cfg.resolve_path(sc.init.path));
            if (depth.grid.cellsize != dem.grid.cellsize)
                depth = resample_dem(depth, dem.grid.cellsize);
            require_same_grid(depth.grid, dem.grid, "init depth raster");
            for (std::size_t c = 0; c < state.h.size(); ++c)
                state.h[c] = depth.values[c] == depth.nodata ? 0.0
                                                             : std::max(0.0, depth.values[c]);
            break;
        }
    }
    return state;
}

/// Friction model for a scenario (per-cell map resampled to the run grid).
inline swe::FrictionModel friction_model(const StudyConfig& cfg, const Scenario& scenario) {
    const ScenarioSpec& sc = cfg.scenario;
    swe::FrictionModel friction;
    friction.law = sc.friction_law;
    friction.coefficient = scenario.manning_override > 0.0 ? scenario.manning_override
                                                           : sc.friction_coef;
    if (!sc.friction_map.empty()) {
        Raster fr = read_ascii_grid(cfg.resolve_path(sc.friction_map));
        if (fr.grid.cellsize != scenario.dem.grid.cellsize)
            fr = resample_dem(fr, scenario.dem.grid.cellsize);
        require_same_grid(fr.grid, scenario.dem.grid, "friction map");
        friction.per_cell = fr.values;
    }
    return friction;
}

/// Build solver inputs from a realized scenario and run the simulation.
inline RunOutput default_simulator(const StudyConfig& cfg, const Scenario& scenario) {
    const ScenarioSpec& sc = cfg.scenario;
    const Raster& dem = scenario.dem;
    const swe::Topography topo(dem);
    const swe::FlowState state = initial_state(cfg, dem);
    const swe::FrictionModel friction = friction_model(cfg, scenario);
    const swe::SimulationOutput sim =
        swe::run_simulation(topo, state, friction, sc.solver, sc.t_end,
                            sc.inflow ? &*sc.inflow : nullptr);
    RunOutput out;
    for (const auto& np : cfg.probes) {
        if (np.probe.kind == Probe::Kind::FullMap) {
            if (!out.map)
                out.map = extract_full_map(sim, sc.solver.h_dry, cfg.analysis_resolution());
        } else {
            out.scalars.push_back(extract_output(sim, np.probe));
        }
    }
    return out;
}

struct CampaignOptions {
    int workers = 0;          // 0 = config max_workers
    bool resume = false;
    int retry = -1;           // -1 = config retry budget
    long long max_records = -1;  // stop after appending N records (checkpointing/tests)
    SimulatorFn simulator;    // defaults to default_simulator
};

struct CampaignResult {
    bool complete = false;
    int done = 0, failed = 0, skipped = 0;
    int high_water = 0;  // max concurrent simulations observed
    CsvTable table;
    std::vector<RunTask> tasks;
};

inline std::vector<RunTask> build_tasks(const gsa::SampleDesign& design) {
    std::vector<RunTask> tasks;
    const int p = design.p();
    char id[64];
    auto make = [&](const std::string& matrix, int row, std::vector<double> values) {
        std::snprintf(id, sizeof id, "%s_%05d", matrix.c_str(), row);
        tasks.push_back({id, matrix, row, std::move(values)});
    };
    for (int row = 0; row < design.n; ++row) {
        std::vector<double> vals(p);
        for (int c = 0; c < p; ++c) vals[c] = design.a_at(row, c);
        make("A", row, std::move(vals));
    }
    for (int row = 0; row < design.n; ++row) {
        std::vector<double> vals(p);
        for (int c = 0; c < p; ++c) vals[c] = design.b_at(row, c);
        make("B", row, std::move(vals));
    }
    for (int i = 0; i < p; ++i)
        for (int row = 0; row < design.n; ++row)
            make("AB" + std::to_string(i + 1), row, design.ab_row(i, row));
    return tasks;
}

namespace detail {

struct LogRecord {
    std::string status;  // "done" or "failed"
    std::uint64_t checksum = 0;
    std::vector<double> scalars;
    std::string map_path;
    std::string error;
};

// Latest record per run_id; tolerates a torn final line after a kill.
inline std::map<std::string, LogRecord> read_record_log(const std::string& path) {
    std::map<std::string, LogRecord> records;
    std::ifstream in(path);
    if (!in) return records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("run_id")) continue;
        LogRecord rec;
        rec.status = j.value("status", "");
        rec.checksum = std::stoull(j.value("checksum", "0"), nullptr, 16);
        if (j.contains("outputs") && j["outputs"].is_array())
            for (const auto& v : j["outputs"]) rec.scalars.push_back(v.get<double>());
        rec.map_path = j.value("map", "");
        rec.error = j.value("error", "");
        records[j["run_id"].get<std::string>()] = std::move(rec);
    }
    return records;
}

inline std::string checksum_hex(std::uint64_t checksum) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
    return buf;
}

}  // namespace detail

inline CampaignResult run_campaign(const StudyConfig& cfg, const gsa::SampleDesign& design,
                                   const std::string& outdir, const CampaignOptions& opts = {}) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);
    fs::create_directories(outdir + "/maps");

    const int workers = opts.workers > 0 ? opts.workers : cfg.max_workers;
    const int retries = opts.retry >= 0 ? opts.retry : cfg.retry;
    SimulatorFn simulate = opts.simulator ? opts.simulator : default_simulator;

    DemRegistry dems = load_dem_registry(cfg, [](const std::string& p) { return read_ascii_grid(p); });

    std::vector<std::string> scalar_probes, map_probes;
    for (const auto& np : cfg.probes)
        (np.probe.kind == Probe::Kind::FullMap ? map_probes : scalar_probes).push_back(np.name);

    CampaignResult result;
    result.tasks = build_tasks(design);
    const std::size_t total = result.tasks.size();

    // Realize scenarios up front; checksums drive the resume decision.
    std::vector<Scenario> scenarios(total);
    for (std::size_t k = 0; k < total; ++k)
        scenarios[k] = realize_scenario(cfg, dems, result.tasks[k].values, result.tasks[k].run_id);

    const std::string log_path = outdir + "/runs.jsonl";
    std::map<std::string, detail::LogRecord> previous;
    if (opts.resume) previous = detail::read_record_log(log_path);

    std::vector<detail::LogRecord> final_records(total);
    std::vector<bool> pending(total, true);
    for (std::size_t k = 0; k < total; ++k) {
        auto it = previous.find(result.tasks[k].run_id);
        if (it == previous.end()) continue;
        const detail::LogRecord& rec = it->second;
        if (rec.status != "done" || rec.checksum != scenarios[k].checksum) continue;
        if (rec.scalars.size() != scalar_probes.size()) continue;
        if (!map_probes.empty() &&
            (rec.map_path.empty() || !fs::exists(outdir + "/" + rec.map_path)))
            continue;
        final_records[k] = rec;
        pending[k] = false;
        ++result.skipped;
    }

    std::ofstream log(log_path, std::ios::app);
    if (!log) throw IoError("cannot open record log " + log_path);

    std::vector<std::size_t> queue;
    for (std::size_t k = 0; k < total; ++k)
        if (pending[k]) queue.push_back(k);

    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<int> active{0}, high_water{0};
    std::atomic<long long> records_written{0};
    std::atomic<bool> stop{false};

    auto execute = [&](std::size_t k) {
        const RunTask& task = result.tasks[k];
        const Scenario& scenario = scenarios[k];
        detail::LogRecord rec;
        rec.checksum = scenario.checksum;
        for (int attempt = 0; attempt <= retries; ++attempt) {
            const auto t0 = std::chrono::steady_clock::now();
            std::string error;
            bool retryable = true;
            try {
                const RunOutput out = simulate(cfg, scenario);
                rec.status = "done";
                rec.scalars = out.scalars;
                if (out.map) {
                    rec.map_path = "maps/" + task.run_id + ".asc";
                    const std::string final_path = outdir + "/" + rec.map_path;
                    const std::string tmp = final_path + ".tmp";
                    write_ascii_grid(*out.map, tmp);
                    fs::rename(tmp, final_path);
                }
            } catch (const swe::NonFiniteError& e) {
                error = e.what();
                retryable = false;  // deterministic failure, retrying cannot help
            } catch (const std::exception& e) {
                error = e.what();
            }
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (!error.empty()) {
                rec.status = "failed";
                rec.error = error;
                rec.scalars.clear();
                rec.map_path.clear();
            }
            {
                std::lock_guard<std::mutex> lk(log_mutex);
                nlohmann::json j;
                j["run_id"] = task.run_id;
                j["status"] = rec.status;
                j["attempt"] = attempt;
                j["checksum"] = detail::checksum_hex(rec.checksum);
                if (rec.status == "done") {
                    j["outputs"] = rec.scalars;
                    if (!rec.map_path.empty()) j["map"] = rec.map_path;
                } else {
                    j["error"] = rec.error;
                }
                j["wall_s"] = wall;
                log << j.dump() << '\n';
                log.flush();
                if (opts.max_records >= 0 && ++records_written >= opts.max_records)
                    stop.store(true);
            }
            if (rec.status == "done" || !retryable) break;
        }
        final_records[k] = rec;
    };

    auto worker_loop = [&]() {
        for (;;) {
            if (stop.load()) break;
            const std::size_t qi = next.fetch_add(1);
            if (qi >= queue.size()) break;
            const int cur = active.fetch_add(1) + 1;
            int seen = high_water.load();
            while (cur > seen && !high_water.compare_exchange_weak(seen, cur)) {
            }
            execute(queue[qi]);
            active.fetch_sub(1);
        }
    };

    {
        const int nthreads = static_cast<int>(std::min<std::size_t>(workers, queue.size()));
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker_loop);
        for (auto& t : pool) t.join();
    }
    result.high_water = high_water.load();

    for (std::size_t k = 0; k < total; ++k) {
        if (final_records[k].status == "done") ++result.done;
        else ++result.failed;
    }
    result.complete = result.failed == 0;

    // Result table in design order: identical bytes for any worker count.
    CsvTable& table = result.table;
    table.header = {"run_id", "matrix", "row"};
    for (const auto& prm : design.params) table.header.push_back(prm.name);
    for (const auto& name : scalar_probes) table.header.push_back(name);
    for (const auto& name : map_probes) table.header.push_back(name);
    for (std::size_t k = 0; k < total; ++k) {
        const RunTask& task = result.tasks[k];
        const detail::LogRecord& rec = final_records[k];
        std::vector<std::string> row = {task.run_id, task.matrix, std::to_string(task.row)};
        for (double v : task.values) row.push_back(csv_double(v));
        if (rec.status == "done") {
            for (double v : rec.scalars) row.push_back(csv_double(v));
            for (std::size_t m = 0; m < map_probes.size(); ++m) row.push_back(rec.map_path);
        } else {
            for (std::size_t s = 0; s < scalar_probes.size() + map_probes.size(); ++s)
                row.push_back("");
        }
        table.rows.push_back(std::move(row));
    }
    if (result.complete) write_csv(table, outdir + "/results.csv");
    return result;
}

}  // namespace swegsa::campaign
