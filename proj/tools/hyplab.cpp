// hyplab command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyplab/census.hpp"
#include "hyplab/dynamics.hpp"
#include "hyplab/error.hpp"
#include "hyplab/experiment.hpp"
#include "hyplab/gridlab.hpp"
#include "hyplab/hyperbolicity.hpp"
#include "hyplab/lagrange.hpp"
#include "hyplab/perturbation.hpp"

using namespace hyplab;
using nlohmann::json;

namespace {

struct MapArgs {
    std::string file;
    std::vector<double> coeffs;
    double radius = 1.0;

    void add_to(CLI::App* app) {
        app->add_option("--map", file, "map definition (JSON)");
        app->add_option("--coeffs", coeffs, "1-D coefficients c0 c1 ... (lowest degree first)")->delimiter(',');
        app->add_option("--radius", radius, "domain radius for --coeffs");
    }

    PerturbedMap load() const {
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw ConfigError("cannot open map file '" + file + "'");
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw ConfigError("map file '" + file + "': " + e.what());
            }
            return PerturbedMap(map_from_json(j.contains("map") ? j.at("map") : j));
        }
        if (coeffs.empty()) throw ConfigError("give --map or --coeffs");
        return PerturbedMap(PolynomialMap::univariate(coeffs, radius));
    }
};

Matrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream all(text);
    for (std::string row; std::getline(all, row, ';');) {
        std::vector<double> r;
        std::stringstream rs(row);
        for (std::string cell; std::getline(rs, cell, ',');) {
            try {
                r.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidInput("bad matrix entry '" + cell + "'");
            }
        }
        rows.push_back(std::move(r));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw InvalidInput("empty matrix");
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) throw InvalidInput("matrix must be square");
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

json orbit_json(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(json_number(x));
    return a;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolicity and periodic-point experiments for polynomial maps"};
    app.require_subcommand(1);

    // gamma
    auto* gamma_cmd = app.add_subcommand("gamma", "hyperbolicity of one matrix");
    std::string matrix_text;
    GammaOptions gopts;
    gamma_cmd->add_option("matrix", matrix_text, "rows separated by ';', entries by ','")->required();
    gamma_cmd->add_option("--grid", gopts.phase_grid, "phase grid size");
    gamma_cmd->add_option("--refine-tol", gopts.refine_tol, "refinement tolerance");

    // census
    auto* census_cmd = app.add_subcommand("census", "periodic points of one map");
    MapArgs census_map;
    census_map.add_to(census_cmd);
    int census_n = 1;
    CensusOptions copts;
    census_cmd->add_option("-n,--period", census_n, "period n")->required();
    census_cmd->add_option("--tol", copts.tol, "enclosure width");
    census_cmd->add_option("--min-width", copts.min_width, "smallest cell width");
    census_cmd->add_option("--max-cells", copts.max_cells, "subdivision budget");

    // perturb close|hyp
    auto* perturb_cmd = app.add_subcommand("perturb", "local perturbations along one orbit");
    perturb_cmd->require_subcommand(1);
    auto* close_cmd = perturb_cmd->add_subcommand("close", "close an orbit into a period-n point");
    auto* hyp_cmd = perturb_cmd->add_subcommand("hyp", "make a periodic orbit gamma-hyperbolic");
    MapArgs perturb_map;
    double x0 = 0.0;
    int orbit_n = 1;
    double hyp_gamma = 0.0, hyp_margin = 0.1;
    for (auto* c : {close_cmd, hyp_cmd}) {
        perturb_map.add_to(c);
        c->add_option("--x0", x0, "initial point")->required();
        c->add_option("-n,--period", orbit_n, "period n")->required();
    }
    hyp_cmd->add_option("--gamma", hyp_gamma, "target hyperbolicity")->required();
    hyp_cmd->add_option("--margin", hyp_margin, "relative margin over gamma");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw one brick perturbation");
    std::string family = "factorial";
    double tau = 0.1, ratio = 0.5;
    int k_max = 8, dim = 1;
    std::uint64_t seed = 1, trial = 0;
    sample_cmd->add_option("--family", family, "factorial | geometric")->check(CLI::IsMember({"factorial", "geometric"}));
    sample_cmd->add_option("--tau", tau, "brick scale");
    sample_cmd->add_option("--q", ratio, "geometric ratio");
    sample_cmd->add_option("--k-max", k_max, "largest degree");
    sample_cmd->add_option("--dim", dim, "dimension N");
    sample_cmd->add_option("--seed", seed, "master seed");
    sample_cmd->add_option("--trial", trial, "trial index");

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "stage tolerances and pseudotrajectory counts");
    GrowthParams gp;
    double grid_m = 2.0;
    int grid_dim = 1, grid_nmax = 5;
    MapArgs grid_map;
    std::optional<double> start;
    int enum_len = 3;
    double enum_spacing = 0.0, enum_slack = 0.0;
    std::size_t enum_budget = 10'000'000;
    grid_cmd->add_option("--C", gp.C, "growth constant C");
    grid_cmd->add_option("--delta", gp.delta, "growth exponent delta");
    grid_cmd->add_option("--rho", gp.rho, "Hoelder exponent rho");
    grid_cmd->add_option("--M", grid_m, "C^{1+rho} bound M");
    grid_cmd->add_option("--dim", grid_dim, "dimension N");
    grid_cmd->add_option("--n-max", grid_nmax, "last stage");
    grid_map.add_to(grid_cmd);
    grid_cmd->add_option("--start", start, "enumerate pseudotrajectories from this point (needs a map)");
    grid_cmd->add_option("--length", enum_len, "pseudotrajectory length");
    grid_cmd->add_option("--spacing", enum_spacing, "grid spacing for enumeration");
    grid_cmd->add_option("--slack", enum_slack, "per-step slack for enumeration");
    grid_cmd->add_option("--budget", enum_budget, "node expansion budget");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "seeded Monte-Carlo run");
    std::string config_path;
    std::optional<int> ov_samples, ov_nmax, ov_threads;
    std::optional<std::uint64_t> ov_seed;
    std::optional<std::string> ov_out;
    exp_cmd->add_option("config", config_path, "config file (JSON)")->required()->check(CLI::ExistingFile);
    exp_cmd->add_option("--samples", ov_samples, "override sample count");
    exp_cmd->add_option("--n-max", ov_nmax, "override n_max");
    exp_cmd->add_option("--seed", ov_seed, "override master seed");
    exp_cmd->add_option("--out", ov_out, "override output directory");
    exp_cmd->add_option("--threads", ov_threads, "worker threads (0: HYPLAB_THREADS or all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gamma_cmd) {
            const auto g = gamma_linear(parse_matrix(matrix_text), gopts);
            json j{{"gamma", g.gamma}, {"argmin_phase", g.argmin_phase}, {"certified_tolerance", g.certified_tolerance},
                   {"lower_bound", g.lower_bound()}};
            std::cout << j.dump() << "\n";
        } else if (*census_cmd) {
            std::cout << format_census(find_periodic(census_map.load(), census_n, copts));
        } else if (*close_cmd) {
            const auto f = perturb_map.load();
            const auto seg = orbit(f, x0, static_cast<std::size_t>(orbit_n) + 1);
            const auto r = closing_perturbation(f, seg);
            double y = x0;
            for (int j = 0; j < orbit_n; ++j) y = r.map.value_1d(y);
            std::cout << json{{"u", r.u}, {"log_product", json_number(r.log_product)}, {"orbit", orbit_json(seg.points_1d())},
                              {"residual", std::abs(y - x0)}}
                             .dump()
                      << "\n";
        } else if (*hyp_cmd) {
            const auto f = perturb_map.load();
            const auto seg = orbit(f, x0, static_cast<std::size_t>(orbit_n));
            const auto r = hyperbolicity_perturbation(f, seg, hyp_gamma, hyp_margin);
            std::cout << json{{"v", r.v}, {"derivative", r.derivative}, {"hyperbolicity", std::abs(std::abs(r.derivative) - 1.0)},
                              {"orbit", orbit_json(seg.points_1d())}}
                             .dump()
                      << "\n";
        } else if (*sample_cmd) {
            const BrickSpec brick = family == "factorial" ? BrickSpec::factorial(tau, k_max) : BrickSpec::geometric(tau, ratio, k_max);
            std::cout << to_json(sample(brick, dim, seed, trial)).dump() << "\n";
        } else if (*grid_cmd) {
            std::cout << "n,gamma_n,grid_spacing,pseudo_slack,saturated\n";
            for (int n = 1; n <= grid_nmax; ++n) {
                const auto s = stage_tolerances(gp, grid_m, grid_dim, n);
                std::cout << n << "," << format_double(s.gamma_n) << "," << format_double(s.grid_spacing) << ","
                          << format_double(s.pseudo_slack) << "," << (s.saturated ? "true" : "false") << "\n";
            }
            if (start) {
                const auto f = grid_map.load();
                if (!(enum_spacing > 0)) throw InvalidInput("--spacing must be positive for enumeration");
                EnumerationOptions eo;
                eo.budget = enum_budget;
                const auto r = enumerate_pseudotrajectories(f, enum_spacing, enum_slack, Vector::Constant(f.dim(), *start),
                                                            enum_len, eo);
                json samples = json::array();
                for (const auto& path : r.samples) {
                    json p = json::array();
                    for (const auto& x : path) p.push_back(std::vector<double>(x.data(), x.data() + x.size()));
                    samples.push_back(p);
                }
                std::cout << json{{"count", r.count}, {"exact", r.exact}, {"expansions", r.expansions}, {"samples", samples}}.dump()
                          << "\n";
            }
        } else if (*exp_cmd) {
            ExperimentConfig cfg = load_config(config_path);
            if (ov_samples) cfg.sample_count = *ov_samples;
            if (ov_nmax) cfg.n_max = *ov_nmax;
            if (ov_seed) cfg.master_seed = *ov_seed;
            if (ov_out) cfg.output.dir = *ov_out;
            if (ov_threads) cfg.threads = *ov_threads;
            const auto res = run_experiment(cfg);
            emit_reports(res, cfg.output);
            std::cout << format_summary(res);
            return res.summary.aborted == 0 ? 0 : 2;
        }
    } catch (const Error& e) {
        std::cerr << "hyplab: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "hyplab: unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
