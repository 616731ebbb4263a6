// swegsa: shallow-water flood simulation campaigns with variance-based
// global sensitivity analysis. Subcommands: simulate, sample, run, analyze,
// map. Exit codes: 0 ok, 2 config/usage error, 3 numerical failure,
// 4 incomplete campaign.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swegsa/ascii_grid.hpp"
#include "swegsa/campaign/analysis.hpp"
#include "swegsa/campaign/config.hpp"
#include "swegsa/campaign/runner.hpp"
#include "swegsa/campaign/scenario.hpp"
#include "swegsa/csv.hpp"
#include "swegsa/gsa/design.hpp"
#include "swegsa/gsa/diagnostics.hpp"
#include "swegsa/gsa/estimators.hpp"
#include "swegsa/gsa/sobol_map.hpp"
#include "swegsa/swe/solver.hpp"

namespace fs = std::filesystem;
using namespace swegsa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIncomplete = 4;

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const campaign::StudyConfig cfg = campaign::load_study_config(config_path);
    campaign::DemRegistry dems = campaign::load_dem_registry(
        cfg, [](const std::string& p) { return read_ascii_grid(p); });

    campaign::Scenario scenario;
    scenario.run_id = "simulate";
    scenario.structure_level = dems.count("S1") ? "S1" : dems.begin()->first;
    scenario.dem = dems.at(scenario.structure_level);
    scenario.resolution = scenario.dem.grid.cellsize;

    const swe::Topography topo(scenario.dem);
    const swe::FlowState state = campaign::initial_state(cfg, scenario.dem);
    const swe::FrictionModel friction = campaign::friction_model(cfg, scenario);

    const swe::SimulationOutput sim =
        swe::run_simulation(topo, state, friction, cfg.scenario.solver, cfg.scenario.t_end,
                            cfg.scenario.inflow ? &*cfg.scenario.inflow : nullptr);

    fs::create_directories(out_dir);
    Raster hmax(sim.grid, 0.0);
    hmax.values = sim.hmax;
    write_ascii_grid(hmax, out_dir + "/hmax.asc");

    Raster wse(sim.grid, 0.0);
    for (std::size_t c = 0; c < sim.hmax.size(); ++c)
        wse.values[c] = sim.hmax[c] > cfg.scenario.solver.h_dry ? sim.wse_max[c] : wse.nodata;
    write_ascii_grid(wse, out_dir + "/wse_max.asc");

    CsvTable mass;
    mass.header = {"t", "volume"};
    for (const auto& s : sim.mass_series)
        mass.rows.push_back({csv_double(s.t), csv_double(s.volume)});
    write_csv(mass, out_dir + "/mass_series.csv");

    std::cout << "simulate: " << sim.dt_count << " steps, outputs in " << out_dir << "\n";
    return kExitOk;
}

int cmd_sample(const std::string& config_path, const std::string& out_dir) {
    const campaign::StudyConfig cfg = campaign::load_study_config(config_path);
    if (cfg.parameters.empty())
        throw campaign::ConfigError("section [parameters] is empty; nothing to sample");
    if (cfg.n < 2) throw campaign::ConfigError("key 'n': base sample size must be >= 2");
    const gsa::SampleDesign design = gsa::sample(cfg.parameters, cfg.n, cfg.seed);
    gsa::save_design(design, out_dir);
    std::cout << "sample: n=" << design.n << " p=" << design.p() << " ("
              << design.total_runs() << " model runs) written to " << out_dir << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& design_dir,
            const std::string& out_dir, int workers, bool resume) {
    const campaign::StudyConfig cfg = campaign::load_study_config(config_path);
    const gsa::SampleDesign design = gsa::load_design(design_dir);
    campaign::CampaignOptions opts;
    opts.workers = workers;
    opts.resume = resume;
    const campaign::CampaignResult result = campaign::run_campaign(cfg, design, out_dir, opts);
    std::cout << "run: " << result.done << " done, " << result.failed << " failed, "
              << result.skipped << " skipped (max concurrent " << result.high_water << ")\n";
    if (!result.complete) {
        std::cerr << "error: campaign incomplete, see " << out_dir << "/runs.jsonl\n";
        return kExitIncomplete;
    }
    std::cout << "result table: " << out_dir << "/results.csv\n";
    return kExitOk;
}

int cmd_analyze(const std::string& results_path, const std::string& design_dir,
                const std::string& out_dir) {
    const gsa::SampleDesign design = gsa::load_design(design_dir);
    const CsvTable table = read_csv(results_path);
    fs::create_directories(out_dir);

    // scalar probes = value columns that are not params or bookkeeping
    std::vector<std::string> probes;
    for (const auto& col : table.header) {
        if (col == "run_id" || col == "matrix" || col == "row") continue;
        bool is_param = false;
        for (const auto& prm : design.params) is_param |= (prm.name == col);
        if (is_param) continue;
        const int c = csv_column(table, col);
        bool numeric = !table.rows.empty();
        for (const auto& row : table.rows) {
            const std::string& cell = row[c];
            if (cell.empty()) continue;
            char* end = nullptr;
            std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size()) {
                numeric = false;
                break;
            }
        }
        if (numeric) probes.push_back(col);
    }
    if (probes.empty()) throw IoError("results table has no scalar probe columns to analyze");

    for (const auto& probe : probes) {
        const gsa::PickFreezeOutputs outputs = campaign::gather_outputs(table, design, probe);
        gsa::BootstrapOptions bopt;
        bopt.seed = design.seed ^ 0x9e3779b97f4a7c15ull;
        const gsa::SobolResult res = gsa::estimate_sobol(outputs, bopt);
        write_csv(campaign::sobol_result_table(res, design.params),
                  out_dir + "/sobol_" + probe + ".csv");
        if (res.degenerate)
            std::cout << "analyze: probe '" << probe << "' has degenerate variance (flagged)\n";

        const auto series =
            gsa::convergence_series(outputs, campaign::default_checkpoints(design.n));
        write_csv(campaign::convergence_table(series, design.params),
                  out_dir + "/convergence_" + probe + ".csv");

        const auto hist = gsa::histogram(outputs.ya, std::max(5, design.n / 8));
        write_csv(campaign::histogram_table(hist), out_dir + "/histogram_" + probe + ".csv");

        for (const auto& prm : design.params) {
            const auto pts =
                gsa::scatter(campaign::gather_param_column(table, design, prm.name), outputs.ya);
            write_csv(campaign::scatter_table(pts, prm.name, probe),
                      out_dir + "/scatter_" + probe + "_" + prm.name + ".csv");
        }
    }
    std::cout << "analyze: " << probes.size() << " probe(s) written to " << out_dir << "\n";
    return kExitOk;
}

int cmd_map(const std::string& results_path, const std::string& design_dir,
            const std::string& param, const std::string& order, const std::string& out_dir) {
    const gsa::SampleDesign design = gsa::load_design(design_dir);
    int param_idx = -1;
    for (int i = 0; i < design.p(); ++i)
        if (design.params[i].name == param) param_idx = i;
    if (param_idx < 0) {
        std::string known;
        for (const auto& prm : design.params) known += (known.empty() ? "" : ", ") + prm.name;
        throw campaign::ConfigError("unknown --param '" + param + "' (known: " + known + ")");
    }
    if (order != "first" && order != "total")
        throw campaign::ConfigError("--order must be 'first' or 'total'");

    const CsvTable table = read_csv(results_path);
    std::string map_probe;
    for (const auto& col : table.header) {
        if (col == "run_id" || col == "matrix" || col == "row") continue;
        const int c = csv_column(table, col);
        if (!table.rows.empty() && table.rows.front()[c].rfind("maps/", 0) == 0) {
            map_probe = col;
            break;
        }
    }
    if (map_probe.empty())
        throw IoError("results table has no full-map probe column (run with a full_map probe)");

    const std::string base_dir = fs::path(results_path).parent_path().string();
    const gsa::RasterStacks stacks =
        campaign::load_map_stacks(table, design, map_probe, base_dir);
    const gsa::SobolMap map = gsa::sobol_map(stacks);

    fs::create_directories(out_dir);
    const Raster& raster = order == "first" ? map.s1[param_idx] : map.st[param_idx];
    const std::string path =
        out_dir + "/" + (order == "first" ? "s1_" : "st_") + param + ".asc";
    write_ascii_grid(raster, path);
    std::cout << "map: wrote " << path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D shallow-water flood campaigns with Sobol sensitivity analysis"};
    app.require_subcommand(1);

    std::string config_path, out_dir, design_dir, results_path, param, order = "first";
    int workers = 0;
    bool resume = false;

    auto* sim = app.add_subcommand("simulate", "run one simulation and write max-field rasters");
    sim->add_option("--config", config_path, "study configuration file")->required();
    sim->add_option("--out", out_dir, "output directory")->required();

    auto* smp = app.add_subcommand("sample", "generate the pick-freeze sample design");
    smp->add_option("--config", config_path, "study configuration file")->required();
    smp->add_option("--out", out_dir, "design output directory")->required();

    auto* run = app.add_subcommand("run", "execute the simulation campaign");
    run->add_option("--config", config_path, "study configuration file")->required();
    run->add_option("--design", design_dir, "design directory from `sample`")->required();
    run->add_option("--out", out_dir, "campaign output directory")->required();
    run->add_option("--workers", workers, "max concurrent simulations (default from config)");
    run->add_flag("--resume", resume, "skip runs already recorded as done");

    auto* ana = app.add_subcommand("analyze", "estimate Sobol indices and diagnostics");
    ana->add_option("--results", results_path, "results.csv from `run`")->required();
    ana->add_option("--design", design_dir, "design directory")->required();
    ana->add_option("--out", out_dir, "analysis output directory")->required();

    auto* map = app.add_subcommand("map", "emit a per-cell Sobol index raster");
    map->add_option("--results", results_path, "results.csv from `run`")->required();
    map->add_option("--design", design_dir, "design directory")->required();
    map->add_option("--param", param, "parameter name")->required();
    map->add_option("--order", order, "first or total")->required();
    map->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (smp->parsed()) return cmd_sample(config_path, out_dir);
        if (run->parsed()) {
            if (workers <= 0) {
                if (const char* env = std::getenv("SWEGSA_WORKERS")) workers = std::atoi(env);
            }
            return cmd_run(config_path, design_dir, out_dir, workers, resume);
        }
        if (ana->parsed()) return cmd_analyze(results_path, design_dir, out_dir);
        if (map->parsed()) return cmd_map(results_path, design_dir, param, order, out_dir);
    } catch (const swe::NonFiniteError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const swe::TimeoutError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
