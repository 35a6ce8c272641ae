// Command-line front end: simulate, estimate, confint, benchmark.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical degeneracy.

#include "dualcause/benchmark.hpp"
#include "dualcause/confidence.hpp"
#include "dualcause/dualml.hpp"
#include "dualcause/errors.hpp"
#include "dualcause/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace dc = dualcause;

namespace {

constexpr int kUsageError = 2;
constexpr int kDataError = 3;
constexpr int kNumericalError = 4;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

dc::PDMatrix load_precision(const std::string& path, bool center, std::size_t& n) {
    dc::SampleMatrix data = dc::read_csv_file(path);
    if (center) {
        data = data.centered();
    }
    n = data.n();
    return dc::invert_pd(dc::empirical_covariance(data));
}

std::filesystem::path summary_path(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".summary.json");
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Total causal effects and confidence regions in linear Gaussian SCMs"};
    app.require_subcommand(1);

    std::size_t d = 10;
    std::string n_list = "100,1000,10000";
    std::size_t reps = 1000;
    std::size_t sim_n = 1000;
    std::size_t sim_reps = 1;
    std::string bench_regimes = "general,partial_ev,ev";
    double alpha = 0.05;
    std::string regime = "general";
    std::string methods = "general_conf,partial_ev_conf,ev_conf";
    std::string truth = "nonzero";
    std::size_t qi = 0;
    std::size_t qj = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string data_path;
    bool center = false;
    bool timing = false;
    bool spread_is_variance = false;
    std::size_t threads = 0;

    auto* sim = app.add_subcommand("simulate", "Generate benchmark models and samples");
    sim->add_option("--d", d, "Number of variables")->check(CLI::Range(3, 30));
    sim->add_option("--n", sim_n, "Sample size");
    sim->add_option("--reps", sim_reps, "Number of datasets");
    sim->add_option("--regime", regime, "Error-variance regime: general, partial_ev, ev");
    sim->add_option("--truth", truth, "Effect of i on j: nonzero or zero");
    sim->add_option("--i", qi, "Cause node (0-based)");
    sim->add_option("--j", qj, "Effect node (0-based)");
    sim->add_option("--seed", seed, "Base seed");
    sim->add_option("--out", out, "Output directory")->required();
    sim->add_flag("--weight-spread-is-variance", spread_is_variance, "Read the 0.1 weight spread as a variance");

    auto* est = app.add_subcommand("estimate", "Set-valued total-effect estimate from a data CSV");
    est->add_option("data", data_path, "CSV file, one observation per row")->required();
    est->add_option("--regime", regime, "general, partial_ev or ev");
    est->add_option("--i", qi, "Cause node (0-based)");
    est->add_option("--j", qj, "Effect node (0-based)");
    est->add_flag("--center", center, "Subtract column means before forming the covariance");

    auto* ci = app.add_subcommand("confint", "Confidence region for the total effect from a data CSV");
    ci->add_option("data", data_path, "CSV file, one observation per row")->required();
    ci->add_option("--regime", regime, "general, partial_ev or ev");
    ci->add_option("--i", qi, "Cause node (0-based)");
    ci->add_option("--j", qj, "Effect node (0-based)");
    ci->add_option("--alpha", alpha, "Significance level");
    ci->add_flag("--center", center, "Subtract column means before forming the covariance");

    auto* bench = app.add_subcommand("benchmark", "Monte-Carlo coverage, width and zero-proportion study");
    bench->add_option("--d", d, "Number of variables")->check(CLI::Range(3, 16));
    bench->add_option("--n", n_list, "Comma-separated sample sizes");
    bench->add_option("--reps", reps, "Repetitions per data regime");
    bench->add_option("--alpha", alpha, "Significance level");
    bench->add_option("--regime", bench_regimes, "Comma-separated data regimes");
    bench->add_option("--methods", methods, "Comma-separated methods");
    bench->add_option("--truth", truth, "nonzero or zero");
    bench->add_option("--i", qi, "Cause node (0-based)");
    bench->add_option("--j", qj, "Effect node (0-based)");
    bench->add_option("--seed", seed, "Base seed");
    bench->add_option("--out", out, "Output CSV; the summary goes next to it as .summary.json")->required();
    bench->add_option("--threads", threads, "Worker threads (0 = all cores)");
    bench->add_flag("--timing", timing, "Record wall-clock runtime_ms (makes output nondeterministic)");
    bench->add_flag("--center", center, "Subtract column means before forming the covariance");
    bench->add_flag("--weight-spread-is-variance", spread_is_variance, "Read the 0.1 weight spread as a variance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (sim->parsed()) {
            dc::SimulateConfig cfg;
            cfg.d = d;
            cfg.n = sim_n;
            cfg.reps = sim_reps;
            cfg.regime = dc::RegimeTag::parse(regime, qi, qj).kind;
            cfg.truth = dc::parse_truth(truth);
            cfg.i = qi;
            cfg.j = qj;
            cfg.seed = seed;
            cfg.weights.spread_is_variance = spread_is_variance;
            cfg.out = out;
            dc::simulate(cfg);
        } else if (est->parsed()) {
            std::size_t n = 0;
            const auto precision = load_precision(data_path, center, n);
            const auto estimate = dc::estimate_effects(precision, n, qi, qj, dc::RegimeTag::parse(regime, qi, qj));
            std::cout << dc::to_json(estimate).dump(2) << '\n';
        } else if (ci->parsed()) {
            std::size_t n = 0;
            const auto precision = load_precision(data_path, center, n);
            const auto region =
                dc::confidence_region(precision, n, qi, qj, alpha, dc::RegimeTag::parse(regime, qi, qj));
            std::cout << dc::to_json(region).dump(2) << '\n';
        } else if (bench->parsed()) {
            dc::BenchmarkConfig cfg;
            cfg.d = d;
            cfg.n_values.clear();
            for (const auto& s : split_list(n_list)) cfg.n_values.push_back(std::stoull(s));
            cfg.reps = reps;
            cfg.alpha = alpha;
            cfg.data_regimes.clear();
            for (const auto& s : split_list(bench_regimes)) cfg.data_regimes.push_back(dc::RegimeTag::parse(s, qi, qj).kind);
            cfg.methods.clear();
            for (const auto& s : split_list(methods)) cfg.methods.push_back(dc::parse_method(s));
            cfg.truth = dc::parse_truth(truth);
            cfg.i = qi;
            cfg.j = qj;
            cfg.seed = seed;
            cfg.center = center;
            cfg.timing = timing;
            cfg.threads = threads;
            cfg.weights.spread_is_variance = spread_is_variance;
            const auto result = dc::run_benchmark(cfg);
            const std::filesystem::path csv = out;
            if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
            std::ofstream f(csv, std::ios::binary);
            dc::write_benchmark_csv(f, result);
            if (!f) throw dc::ParseError("cannot write " + csv.string(), 0);
            std::ofstream s(summary_path(csv), std::ios::binary);
            s << dc::summary_json(cfg, result).dump(2) << '\n';
        }
    } catch (const dc::InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const dc::DimensionTooLarge& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: bad number: " << e.what() << '\n';
        return kUsageError;
    } catch (const dc::ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const dc::SingularCovariance& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const dc::InvalidSampleCount& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const dc::GenerationExhausted& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const dc::DegenerateQuadratic& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const dc::SingularBlock& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    }
    return 0;
}
