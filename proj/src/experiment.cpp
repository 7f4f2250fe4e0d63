#include "hyplab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <thread>

#include "hyplab/error.hpp"

namespace hyplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

// ---------------------------------------------------------------- map / config io

PolynomialMap map_from_json(const nlohmann::json& j) {
    try {
        const int dim = get_or(j, "dim", 1);
        const double radius = get_or(j, "domain_radius", 1.0);
        if (j.contains("coefficients")) {
            if (dim != 1) throw ConfigError("map: 'coefficients' is only valid for dim = 1");
            return PolynomialMap::univariate(j.at("coefficients").get<std::vector<double>>(), radius);
        }
        std::vector<std::vector<PolynomialMap::Term>> comps;
        for (const auto& comp : j.at("components")) {
            std::vector<PolynomialMap::Term> terms;
            for (const auto& t : comp) {
                terms.push_back({MultiIndex{t.at("exponents").get<std::vector<int>>()}, t.at("coeff").get<double>()});
            }
            comps.push_back(std::move(terms));
        }
        return PolynomialMap(dim, std::move(comps), radius);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("map: ") + e.what());
    }
}

nlohmann::json to_json(const PolynomialMap& f) {
    nlohmann::json j;
    j["dim"] = f.dim();
    j["domain_radius"] = f.domain_radius();
    if (f.dim() == 1) {
        j["coefficients"] = f.coefficients_1d();
        return j;
    }
    auto comps = nlohmann::json::array();
    for (const auto& comp : f.components()) {
        auto terms = nlohmann::json::array();
        for (const auto& t : comp) terms.push_back({{"exponents", t.alpha.exponents}, {"coeff", t.coeff}});
        comps.push_back(terms);
    }
    j["components"] = comps;
    return j;
}

void ExperimentConfig::validate() const {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (sample_count < 1) throw ConfigError("samples must be >= 1");
    if (!(rho > 0)) throw ConfigError("rho must be positive");
    if (deltas.empty()) throw ConfigError("deltas must not be empty");
    for (double d : deltas) {
        if (!(d > 0)) throw ConfigError("every delta must be positive");
    }
    if (ih_enabled && (!(ih.C > 0) || !(ih.delta > 0))) throw ConfigError("ih.C and ih.delta must be positive");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (!brick.is_empty() && !force_zero_perturbation &&
        check_admissible(brick, dim()).status == Admissibility::NotAdmissible) {
        throw ConfigError("brick is neither admissible nor a finite prefix");
    }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.base_map = map_from_json(j.at("map"));
        if (j.contains("brick")) c.brick = brick_from_json(j.at("brick"));
        c.rho = get_or(j, "rho", c.rho);
        c.deltas = get_or(j, "deltas", c.deltas);
        c.n_max = get_or(j, "n_max", c.n_max);
        c.sample_count = get_or(j, "samples", c.sample_count);
        c.master_seed = get_or(j, "master_seed", c.master_seed);
        c.force_zero_perturbation = get_or(j, "force_zero_perturbation", c.force_zero_perturbation);
        c.threads = get_or(j, "threads", c.threads);
        if (j.contains("ih")) {
            const auto& ih = j.at("ih");
            c.ih_enabled = get_or(ih, "enabled", true);
            c.ih.C = get_or(ih, "C", c.ih.C);
            c.ih.delta = get_or(ih, "delta", c.ih.delta);
        }
        c.ih.rho = c.rho;
        if (j.contains("census")) {
            const auto& cs = j.at("census");
            c.census.tol = get_or(cs, "tol", c.census.tol);
            c.census.min_width = get_or(cs, "min_width", c.census.min_width);
            c.census.max_cells = get_or(cs, "max_cells", c.census.max_cells);
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            c.output.dir = get_or(o, "dir", c.output.dir);
            c.output.records = get_or(o, "records", c.output.records);
            c.output.table = get_or(o, "table", c.output.table);
            c.output.summary = get_or(o, "summary", c.output.summary);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------- fitting

double fit_C(std::span<const double> gammas, double delta) {
    if (!(delta > 0)) throw InvalidInput("fit_C: delta must be positive");
    double c = 0.0;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        const double g = gammas[i];
        if (std::isnan(g) || g <= 0.0) return kInf;
        if (std::isinf(g)) continue;
        const double p = std::pow(static_cast<double>(i + 1), 1.0 + delta);
        c = std::max(c, -std::log(g) / p);
    }
    // nudge upward until the bound holds for every observed value in floating point
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (std::isinf(gammas[i])) continue;
        const double p = std::pow(static_cast<double>(i + 1), 1.0 + delta);
        while (std::exp(-c * p) > gammas[i]) c = std::nextafter(c, kInf);
    }
    return c;
}

// ---------------------------------------------------------------- samples

bool SampleReport::certified() const {
    if (aborted || !condition_b || stages.empty()) return false;
    return std::all_of(stages.begin(), stages.end(), [](const StageRecord& s) { return s.certified; });
}

SampleReport run_sample(const ExperimentConfig& config, std::size_t index) {
    SampleReport r;
    r.index = index;
    r.seed = substream_seed(config.master_seed, index);
    try {
        const int dim = config.dim();
        const bool zero = config.force_zero_perturbation || config.brick.is_empty();
        PerturbationVector eps = zero ? PerturbationVector::zero(config.brick, dim)
                                      : sample(config.brick, dim, config.master_seed, index);
        const PerturbedMap f(config.base_map, std::move(eps));

        const auto into = check_into_interior(f);
        r.condition_b = into.holds;
        r.into_margin = into.margin;

        std::vector<double> gammas;
        for (int n = 1; n <= config.n_max; ++n) {
            const auto census = find_periodic(f, n, config.census);
            r.stages.push_back({n, census.count, census.gamma_n, census.certified});
            gammas.push_back(census.gamma_n);
        }
        for (double d : config.deltas) r.fitted.push_back({d, fit_C(gammas, d)});

        if (!config.ih_enabled) {
            r.ih_status = "skipped";
        } else if (dim != 1) {
            r.ih_status = "unsupported";
        } else {
            GrowthParams p = config.ih;
            p.rho = config.rho;
            const auto ih = ih_check(f, config.n_max, p, config.census);
            r.ih_pass = ih.passed_order;
            r.ih_status = to_string(ih.status);
        }
    } catch (const std::exception& e) {
        r.aborted = true;
        r.error = e.what();
        r.fitted.clear();
        for (double d : config.deltas) r.fitted.push_back({d, kInf});
    }
    return r;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HYPLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<SampleReport>& samples) {
    ExperimentSummary s;
    s.samples = samples.size();
    for (const auto& r : samples) {
        if (r.aborted) {
            ++s.aborted;
            continue;
        }
        if (!r.certified()) ++s.uncertified;
        if (r.ih_status == "fail") ++s.ih_failing;
    }
    for (std::size_t i = 0; i < config.deltas.size(); ++i) {
        std::vector<double> vals;
        for (const auto& r : samples) {
            if (!r.aborted && i < r.fitted.size() && std::isfinite(r.fitted[i].value)) vals.push_back(r.fitted[i].value);
        }
        std::sort(vals.begin(), vals.end());
        DeltaSummary d;
        d.delta = config.deltas[i];
        d.finite = vals.size();
        if (!vals.empty()) {
            d.max = vals.back();
            const std::size_t m = vals.size() / 2;
            d.median = vals.size() % 2 ? vals[m] : 0.5 * (vals[m - 1] + vals[m]);
        }
        s.fitted.push_back(d);
    }
    return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto count = static_cast<std::size_t>(config.sample_count);
    std::vector<SampleReport> reports(count);
    const auto workers = static_cast<std::size_t>(std::min<long long>(resolve_threads(config.threads), config.sample_count));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) reports[i] = run_sample(config, i);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    ExperimentResult res;
    res.summary = summarize(config, reports);
    res.samples = std::move(reports);
    return res;
}

// ---------------------------------------------------------------- reports

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

nlohmann::json to_json(const SampleReport& s) {
    nlohmann::json j;
    j["sample"] = s.index;
    j["seed"] = s.seed;
    j["aborted"] = s.aborted;
    if (s.aborted) j["error"] = s.error;
    j["condition_b"] = s.condition_b;
    j["into_margin"] = json_number(s.into_margin);
    j["certified"] = s.certified();
    auto stages = nlohmann::json::array();
    for (const auto& st : s.stages) {
        stages.push_back({{"n", st.n}, {"P_n", st.count}, {"gamma_n", json_number(st.gamma)}, {"certified", st.certified}});
    }
    j["stages"] = stages;
    auto fitted = nlohmann::json::array();
    for (const auto& f : s.fitted) fitted.push_back({{"delta", f.delta}, {"C", json_number(f.value)}});
    j["fitted_C"] = fitted;
    j["ih_pass"] = s.ih_pass;
    j["ih_status"] = s.ih_status;
    return j;
}

nlohmann::json to_json(const ExperimentSummary& s) {
    nlohmann::json j;
    j["samples"] = s.samples;
    j["aborted"] = s.aborted;
    j["uncertified"] = s.uncertified;
    j["ih_failing"] = s.ih_failing;
    auto fitted = nlohmann::json::array();
    for (const auto& d : s.fitted) {
        fitted.push_back({{"delta", d.delta}, {"finite", d.finite}, {"max", json_number(d.max)}, {"median", json_number(d.median)}});
    }
    j["fitted_C"] = fitted;
    return j;
}

std::string format_records(const ExperimentResult& r) {
    std::string out;
    for (const auto& s : r.samples) out += to_json(s).dump() + "\n";
    return out;
}

std::string format_table(const ExperimentResult& r) {
    std::string out = std::string(kTableHeader) + "\n";
    for (const auto& s : r.samples) {
        for (const auto& st : s.stages) {
            out += std::to_string(s.index) + "," + std::to_string(st.n) + "," + std::to_string(st.count) + "," +
                   format_double(st.gamma) + "," + (st.certified ? "true" : "false") + "\n";
        }
    }
    return out;
}

std::string format_summary(const ExperimentResult& r) { return to_json(r.summary).dump(2) + "\n"; }

void emit_reports(const ExperimentResult& r, const OutputPaths& paths) {
    namespace fs = std::filesystem;
    const fs::path dir(paths.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& text) {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out) throw Error("cannot write '" + p.string() + "'");
    };
    write(paths.records, format_records(r));
    write(paths.table, format_table(r));
    write(paths.summary, format_summary(r));
}

std::vector<TableRow> parse_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTableHeader) throw InvalidInput("parse_table: missing or wrong header");
    std::vector<TableRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 5) throw InvalidInput("parse_table: line " + std::to_string(lineno) + " has the wrong field count");
        TableRow row;
        try {
            row.sample = std::stoull(f[0]);
            row.n = std::stoi(f[1]);
            row.count = std::stoull(f[2]);
            row.gamma = std::strtod(f[3].c_str(), nullptr);
        } catch (const std::exception&) {
            throw InvalidInput("parse_table: bad number on line " + std::to_string(lineno));
        }
        if (f[4] != "true" && f[4] != "false") throw InvalidInput("parse_table: bad flag on line " + std::to_string(lineno));
        row.certified = f[4] == "true";
        rows.push_back(row);
    }
    return rows;
}

std::string format_census(const CensusResult& c) {
    std::string out;
    for (const auto& r : c.records) {
        nlohmann::json j;
        j["period"] = r.period;
        j["point"] = std::vector<double>(r.point.data(), r.point.data() + r.point.size());
        auto box = nlohmann::json::array();
        for (const auto& iv : r.enclosure) box.push_back({iv.lo, iv.hi});
        j["enclosure"] = box;
        j["gamma"] = json_number(r.gamma.gamma);
        j["argmin_phase"] = r.gamma.argmin_phase;
        j["gamma_lower"] = json_number(r.gamma_lower);
        j["is_least_period"] = r.is_least_period;
        out += j.dump() + "\n";
    }
    nlohmann::json tail;
    tail["n"] = c.n;
    tail["count"] = c.count;
    tail["gamma_n"] = json_number(c.gamma_n);
    tail["certified"] = c.certified;
    tail["unresolved"] = c.unresolved.size();
    out += tail.dump() + "\n";
    return out;
}

}  // namespace hyplab
