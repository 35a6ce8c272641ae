#pragma once

// Monte-Carlo coverage study and synthetic data export.
//
// Seeds: the model for (data regime r, repetition k) is drawn from
// mt19937_64 seeded with seed + 1e9 * (r + 1) + 16 * k, and the sample of the
// m-th sample size from that model uses the model seed + 1 + m. Regimes are
// indexed general = 0, partial_ev = 1, ev = 2.

#include "dualcause/scm.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace dualcause {

enum class Method { GeneralConf, PartialEvConf, EvConf };

std::string method_name(Method m);
Method parse_method(const std::string& name);

std::string truth_name(EffectTruth t);
EffectTruth parse_truth(const std::string& name);

// Regime of data generation for kind k with query pair (i, j).
RegimeTag data_regime(RegimeTag::Kind k, std::size_t i, std::size_t j);

struct BenchmarkConfig {
    std::size_t d = 10;
    std::vector<std::size_t> n_values{100, 1000, 10000};
    std::size_t reps = 1000;
    double alpha = 0.05;
    std::vector<RegimeTag::Kind> data_regimes{RegimeTag::Kind::General, RegimeTag::Kind::PartialEV,
                                              RegimeTag::Kind::FullEV};
    std::vector<Method> methods{Method::GeneralConf, Method::PartialEvConf, Method::EvConf};
    EffectTruth truth = EffectTruth::NonZero;
    std::size_t i = 0;
    std::size_t j = 1;
    std::uint64_t seed = 0;
    WeightLaw weights;
    bool center = false;
    // Fill runtime_ms with wall-clock times; off keeps the CSV byte-stable.
    bool timing = false;
    // 0 picks the hardware concurrency.
    std::size_t threads = 0;

    void validate() const;
};

std::uint64_t model_seed(std::uint64_t seed, std::size_t regime_index, std::size_t rep);
std::uint64_t sample_seed(std::uint64_t model_seed, std::size_t n_index);
std::size_t regime_index(RegimeTag::Kind k);

struct BenchmarkRow {
    std::size_t rep = 0;
    std::size_t n = 0;
    RegimeTag::Kind data_regime = RegimeTag::Kind::General;
    Method method = Method::GeneralConf;
    double true_effect = 0.0;
    bool covered = false;
    double width = 0.0;
    bool contains_zero = false;
    double runtime_ms = 0.0;
};

struct BenchmarkCell {
    RegimeTag::Kind data_regime = RegimeTag::Kind::General;
    Method method = Method::GeneralConf;
    std::size_t n = 0;
    std::size_t completed = 0;
    std::size_t failed = 0;
    double mean_coverage = 0.0;
    double mean_width = 0.0;
    double zero_proportion = 0.0;
};

struct BenchmarkResult {
    // Sorted by (data regime, method, n, rep).
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkCell> cells;

    const BenchmarkCell& cell(RegimeTag::Kind regime, Method method, std::size_t n) const;
};

BenchmarkResult run_benchmark(const BenchmarkConfig& config);

// Aggregates rows in order; `failed` counts come from the caller.
std::vector<BenchmarkCell> summarize(const std::vector<BenchmarkRow>& rows);

inline constexpr const char* kBenchmarkHeader =
    "rep,n,data_regime,method,true_effect,covered,width,contains_zero,runtime_ms";

void write_benchmark_csv(std::ostream& out, const BenchmarkResult& result);
std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in);
nlohmann::json summary_json(const BenchmarkConfig& config, const BenchmarkResult& result);
nlohmann::json config_json(const BenchmarkConfig& config);

struct SimulateConfig {
    std::size_t d = 10;
    std::size_t n = 1000;
    std::size_t reps = 1;
    RegimeTag::Kind regime = RegimeTag::Kind::General;
    EffectTruth truth = EffectTruth::NonZero;
    std::size_t i = 0;
    std::size_t j = 1;
    std::uint64_t seed = 0;
    WeightLaw weights;
    std::filesystem::path out = "simulated";
};

// Writes rep_XXXX.csv and rep_XXXX.scm.json per repetition plus
// manifest.json into config.out. Returns the written paths.
std::vector<std::filesystem::path> simulate(const SimulateConfig& config);

}  // namespace dualcause
