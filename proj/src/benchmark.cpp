#include "dualcause/benchmark.hpp"

#include "dualcause/confidence.hpp"
#include "dualcause/errors.hpp"
#include "dualcause/io.hpp"
#include "dualcause/log.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace dualcause {

namespace {

constexpr double kCoverageSlack = 1e-9;

std::string kind_name(RegimeTag::Kind k) { return RegimeTag{k, 0, 1}.name(); }

RegimeTag::Kind parse_kind(const std::string& s) { return RegimeTag::parse(s).kind; }

auto row_key(const BenchmarkRow& r) {
    return std::make_tuple(static_cast<int>(r.data_regime), static_cast<int>(r.method), r.n, r.rep);
}

struct JobOutput {
    std::vector<BenchmarkRow> rows;
    // (method, n) failures for this repetition
    std::vector<std::pair<Method, std::size_t>> failures;
};

JobOutput run_job(const BenchmarkConfig& cfg, RegimeTag::Kind kind, std::size_t rep) {
    JobOutput out;
    const RegimeTag regime = data_regime(kind, cfg.i, cfg.j);
    const std::uint64_t mseed = model_seed(cfg.seed, regime_index(kind), rep);
    const LinearScm scm = generate_benchmark_scm(cfg.d, regime, cfg.truth, cfg.i, cfg.j, mseed, cfg.weights);
    const double truth = true_effect(scm, cfg.i, cfg.j);

    for (std::size_t m = 0; m < cfg.n_values.size(); ++m) {
        const std::size_t n = cfg.n_values[m];
        std::optional<PDMatrix> precision;
        try {
            SampleMatrix data = sample(scm, n, sample_seed(mseed, m));
            if (cfg.center) {
                data = data.centered();
            }
            precision = invert_pd(empirical_covariance(data));
        } catch (const Error& e) {
            log::warn("rep " + std::to_string(rep) + " (" + kind_name(kind) + ", n=" + std::to_string(n) +
                      ") failed: " + e.what());
            for (const auto method : cfg.methods) {
                out.failures.emplace_back(method, n);
            }
            continue;
        }
        for (const auto method : cfg.methods) {
            const auto start = std::chrono::steady_clock::now();
            try {
                ConfidenceRegion region;
                switch (method) {
                    case Method::GeneralConf:
                        region = conf_general(*precision, n, cfg.i, cfg.j, cfg.alpha);
                        break;
                    case Method::PartialEvConf:
                        region = conf_pev(*precision, n, cfg.i, cfg.j, cfg.alpha);
                        break;
                    case Method::EvConf:
                        region = conf_ev(*precision, n, cfg.i, cfg.j, cfg.alpha);
                        break;
                }
                const auto stop = std::chrono::steady_clock::now();
                BenchmarkRow row;
                row.rep = rep;
                row.n = n;
                row.data_regime = kind;
                row.method = method;
                row.true_effect = truth;
                row.covered = cfg.truth == EffectTruth::Zero ? region.includes_zero()
                                                             : region.contains(truth, kCoverageSlack);
                row.width = region.width();
                row.contains_zero = region.includes_zero();
                row.runtime_ms =
                    cfg.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
                out.rows.push_back(row);
            } catch (const Error& e) {
                log::warn("rep " + std::to_string(rep) + " (" + kind_name(kind) + ", " + method_name(method) +
                          ", n=" + std::to_string(n) + ") failed: " + e.what());
                out.failures.emplace_back(method, n);
            }
        }
    }
    return out;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::GeneralConf:
            return "general_conf";
        case Method::PartialEvConf:
            return "partial_ev_conf";
        case Method::EvConf:
            return "ev_conf";
    }
    return "general_conf";
}

Method parse_method(const std::string& name) {
    if (name == "general_conf") return Method::GeneralConf;
    if (name == "partial_ev_conf") return Method::PartialEvConf;
    if (name == "ev_conf") return Method::EvConf;
    throw InvalidArgument("unknown method '" + name + "' (expected general_conf, partial_ev_conf or ev_conf)");
}

std::string truth_name(EffectTruth t) { return t == EffectTruth::NonZero ? "nonzero" : "zero"; }

EffectTruth parse_truth(const std::string& name) {
    if (name == "nonzero") return EffectTruth::NonZero;
    if (name == "zero") return EffectTruth::Zero;
    throw InvalidArgument("unknown truth '" + name + "' (expected nonzero or zero)");
}

RegimeTag data_regime(RegimeTag::Kind k, std::size_t i, std::size_t j) {
    switch (k) {
        case RegimeTag::Kind::General:
            return RegimeTag::general();
        case RegimeTag::Kind::PartialEV:
            return RegimeTag::partial_ev(i, j);
        case RegimeTag::Kind::FullEV:
            return RegimeTag::full_ev();
    }
    return RegimeTag::general();
}

std::size_t regime_index(RegimeTag::Kind k) { return static_cast<std::size_t>(k); }

std::uint64_t model_seed(std::uint64_t seed, std::size_t regime_idx, std::size_t rep) {
    return seed + 1'000'000'000ULL * (regime_idx + 1) + 16ULL * rep;
}

std::uint64_t sample_seed(std::uint64_t mseed, std::size_t n_index) { return mseed + 1 + n_index; }

void BenchmarkConfig::validate() const {
    if (d < 3) throw InvalidArgument("benchmark needs d >= 3");
    if (reps < 1) throw InvalidArgument("benchmark needs reps >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (i >= d || j >= d || i == j) throw InvalidArgument("query nodes must be distinct and in range");
    if (n_values.empty() || n_values.size() > 15) throw InvalidArgument("need between 1 and 15 sample sizes");
    if (data_regimes.empty()) throw InvalidArgument("need at least one data regime");
    if (methods.empty()) throw InvalidArgument("need at least one method");
    for (auto n : n_values) {
        if (n < d) throw InvalidArgument("every sample size must be at least d");
    }
}

const BenchmarkCell& BenchmarkResult::cell(RegimeTag::Kind regime, Method method, std::size_t n) const {
    for (const auto& c : cells) {
        if (c.data_regime == regime && c.method == method && c.n == n) {
            return c;
        }
    }
    throw InvalidArgument("no benchmark cell for " + kind_name(regime) + "/" + method_name(method));
}

std::vector<BenchmarkCell> summarize(const std::vector<BenchmarkRow>& rows) {
    std::vector<BenchmarkCell> cells;
    std::map<std::tuple<int, int, std::size_t>, std::size_t> index;
    for (const auto& r : rows) {
        const auto key = std::make_tuple(static_cast<int>(r.data_regime), static_cast<int>(r.method), r.n);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, cells.size()).first;
            BenchmarkCell c;
            c.data_regime = r.data_regime;
            c.method = r.method;
            c.n = r.n;
            cells.push_back(c);
        }
        auto& c = cells[it->second];
        ++c.completed;
        c.mean_coverage += r.covered ? 1.0 : 0.0;
        c.mean_width += r.width;
        c.zero_proportion += r.contains_zero ? 1.0 : 0.0;
    }
    for (auto& c : cells) {
        if (c.completed > 0) {
            const auto k = static_cast<double>(c.completed);
            c.mean_coverage /= k;
            c.mean_width /= k;
            c.zero_proportion /= k;
        }
    }
    return cells;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
    config.validate();
    std::vector<std::pair<RegimeTag::Kind, std::size_t>> jobs;
    for (const auto kind : config.data_regimes) {
        for (std::size_t rep = 0; rep < config.reps; ++rep) {
            jobs.emplace_back(kind, rep);
        }
    }
    std::vector<JobOutput> outputs(jobs.size());
    std::atomic<std::size_t> next{0};
    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());
    std::vector<std::string> fatal(workers);
    auto work = [&](std::size_t w) {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                outputs[k] = run_job(config, jobs[k].first, jobs[k].second);
            } catch (const std::exception& e) {
                fatal[w] = e.what();
                next = jobs.size();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(work, w);
    }
    work(0);
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& f : fatal) {
        if (!f.empty()) {
            throw GenerationExhausted(f);
        }
    }

    BenchmarkResult result;
    std::map<std::tuple<int, int, std::size_t>, std::size_t> failures;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        result.rows.insert(result.rows.end(), outputs[k].rows.begin(), outputs[k].rows.end());
        for (const auto& [method, n] : outputs[k].failures) {
            ++failures[{static_cast<int>(jobs[k].first), static_cast<int>(method), n}];
        }
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const BenchmarkRow& a, const BenchmarkRow& b) { return row_key(a) < row_key(b); });

    const auto aggregated = summarize(result.rows);
    std::vector<RegimeTag::Kind> kinds = config.data_regimes;
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
    std::vector<Method> methods = config.methods;
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    std::vector<std::size_t> ns = config.n_values;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (const auto kind : kinds) {
        for (const auto method : methods) {
            for (const auto n : ns) {
                BenchmarkCell c;
                c.data_regime = kind;
                c.method = method;
                c.n = n;
                for (const auto& a : aggregated) {
                    if (a.data_regime == kind && a.method == method && a.n == n) {
                        c = a;
                    }
                }
                const auto it = failures.find({static_cast<int>(kind), static_cast<int>(method), n});
                c.failed = it == failures.end() ? 0 : it->second;
                result.cells.push_back(c);
            }
        }
    }
    return result;
}

void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result) {
    out << kBenchmarkHeader << '\n';
    for (const auto& r : result.rows) {
        out << r.rep << ',' << r.n << ',' << kind_name(r.data_regime) << ',' << method_name(r.method) << ','
            << format_double(r.true_effect) << ',' << (r.covered ? 1 : 0) << ',' << format_double(r.width) << ','
            << (r.contains_zero ? 1 : 0) << ',' << format_double(r.runtime_ms) << '\n';
    }
}

std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in) {
    std::vector<BenchmarkRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line != kBenchmarkHeader) {
                throw ParseError("unexpected benchmark header", line_no);
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            f.push_back(field);
        }
        if (f.size() != 9) {
            throw ParseError("expected 9 benchmark columns", line_no);
        }
        try {
            BenchmarkRow r;
            r.rep = std::stoull(f[0]);
            r.n = std::stoull(f[1]);
            r.data_regime = parse_kind(f[2]);
            r.method = parse_method(f[3]);
            r.true_effect = std::stod(f[4]);
            r.covered = f[5] == "1";
            r.width = std::stod(f[6]);
            r.contains_zero = f[7] == "1";
            r.runtime_ms = std::stod(f[8]);
            rows.push_back(r);
        } catch (const std::exception& e) {
            throw ParseError(std::string("bad benchmark row: ") + e.what(), line_no);
        }
    }
    return rows;
}

nlohmann::json config_json(const BenchmarkConfig& c) {
    std::vector<std::string> regimes;
    for (auto k : c.data_regimes) regimes.push_back(kind_name(k));
    std::vector<std::string> methods;
    for (auto m : c.methods) methods.push_back(method_name(m));
    return {{"d", c.d},
            {"n", c.n_values},
            {"reps", c.reps},
            {"alpha", c.alpha},
            {"data_regimes", regimes},
            {"methods", methods},
            {"truth", truth_name(c.truth)},
            {"i", c.i},
            {"j", c.j},
            {"seed", c.seed},
            {"edge_probability", c.weights.edge_probability},
            {"weight_mean", c.weights.mean},
            {"weight_spread", c.weights.spread},
            {"weight_spread_is_variance", c.weights.spread_is_variance},
            {"center", c.center}};
}

nlohmann::json summary_json(const BenchmarkConfig& config, const BenchmarkResult& result) {
    nlohmann::json cells = nlohmann::json::array();
    std::size_t failed = 0;
    for (const auto& c : result.cells) {
        failed += c.failed;
        cells.push_back({{"data_regime", kind_name(c.data_regime)},
                         {"method", method_name(c.method)},
                         {"n", c.n},
                         {"completed", c.completed},
                         {"failed", c.failed},
                         {"mean_coverage", c.mean_coverage},
                         {"mean_width", c.mean_width},
                         {"zero_proportion", c.zero_proportion}});
    }
    return {{"config", config_json(config)}, {"failed", failed}, {"cells", cells}};
}

std::vector<std::filesystem::path> simulate(const SimulateConfig& config) {
    if (config.reps < 1) {
        throw InvalidArgument("simulate needs reps >= 1");
    }
    std::filesystem::create_directories(config.out);
    std::vector<std::filesystem::path> written;
    nlohmann::json datasets = nlohmann::json::array();
    const RegimeTag regime = data_regime(config.regime, config.i, config.j);
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
        const auto mseed = model_seed(config.seed, regime_index(config.regime), rep);
        const LinearScm scm =
            generate_benchmark_scm(config.d, regime, config.truth, config.i, config.j, mseed, config.weights);
        const SampleMatrix data = sample(scm, config.n, sample_seed(mseed, 0));

        char stem[32];
        std::snprintf(stem, sizeof(stem), "rep_%04zu", rep);
        const auto csv_path = config.out / (std::string(stem) + ".csv");
        const auto scm_path = config.out / (std::string(stem) + ".scm.json");
        {
            std::ofstream out(csv_path, std::ios::binary);
            write_csv(out, data);
            if (!out) throw ParseError("cannot write " + csv_path.string(), 0);
        }
        {
            std::ofstream out(scm_path, std::ios::binary);
            out << to_json(scm).dump(2) << '\n';
            if (!out) throw ParseError("cannot write " + scm_path.string(), 0);
        }
        written.push_back(csv_path);
        written.push_back(scm_path);
        datasets.push_back({{"rep", rep},
                            {"data", csv_path.filename().string()},
                            {"scm", scm_path.filename().string()},
                            {"true_effect", true_effect(scm, config.i, config.j)}});
    }
    const nlohmann::json manifest{{"d", config.d},
                                  {"n", config.n},
                                  {"reps", config.reps},
                                  {"regime", to_json(regime)},
                                  {"truth", truth_name(config.truth)},
                                  {"i", config.i},
                                  {"j", config.j},
                                  {"seed", config.seed},
                                  {"datasets", datasets}};
    const auto manifest_path = config.out / "manifest.json";
    std::ofstream out(manifest_path, std::ios::binary);
    out << manifest.dump(2) << '\n';
    written.push_back(manifest_path);
    return written;
}

}  // namespace dualcause
