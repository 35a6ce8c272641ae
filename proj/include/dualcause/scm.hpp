#pragma once

#include "dualcause/matrix.hpp"
#include "dualcause/orderings.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dualcause {

// Error-variance regime: arbitrary, equal for the pair (i, j) only, or all equal.
struct RegimeTag {
    enum class Kind { General, PartialEV, FullEV };

    Kind kind = Kind::General;
    std::size_t i = 0;
    std::size_t j = 1;

    static RegimeTag general() { return {}; }
    static RegimeTag partial_ev(std::size_t i, std::size_t j);
    static RegimeTag full_ev() { return {Kind::FullEV, 0, 1}; }

    std::string name() const;
    static RegimeTag parse(const std::string& name, std::size_t i = 0, std::size_t j = 1);

    friend bool operator==(const RegimeTag& a, const RegimeTag& b) {
        if (a.kind != b.kind) {
            return false;
        }
        return a.kind != Kind::PartialEV || (a.i == b.i && a.j == b.j);
    }
};

// X = B X + eps, eps ~ N(0, diag(variances)). weights(j, i) is the direct
// effect of node i on node j and must vanish unless i precedes j in `order`.
class LinearScm {
public:
    LinearScm(Matrix weights, Vector variances, CompleteOrdering order, RegimeTag regime = RegimeTag::general());

    std::size_t dim() const noexcept { return order_.dim(); }
    const Matrix& weights() const noexcept { return weights_; }
    const Vector& variances() const noexcept { return variances_; }
    const CompleteOrdering& order() const noexcept { return order_; }
    const RegimeTag& regime() const noexcept { return regime_; }

    std::size_t edge_count() const;

private:
    Matrix weights_;
    Vector variances_;
    CompleteOrdering order_;
    RegimeTag regime_;
};

// (I - B)^{-1}, column i holding the total effects of node i.
Matrix total_effects(const LinearScm& scm);

// (I - B)^{-1} Omega (I - B)^{-T}
PDMatrix covariance_of(const LinearScm& scm);

// Total effect of i on j by path sums.
double true_effect(const LinearScm& scm, std::size_t i, std::size_t j);

// Covariance-side adjustment coefficient Sigma_{j,i|p(i)} / Sigma_{i,i|p(i)}
// with p(i) the predecessors of i in g; zero when j precedes i.
double adjustment_effect(const PDMatrix& cov, const CompleteOrdering& g, std::size_t i, std::size_t j);

SampleMatrix sample(const LinearScm& scm, std::size_t n, std::uint64_t seed);

// Edge weights are drawn from N(mean, spread); `spread` is read as a standard
// deviation unless `spread_is_variance` is set.
struct WeightLaw {
    double edge_probability = 0.5;
    double mean = 0.5;
    double spread = 0.1;
    bool spread_is_variance = false;

    double stddev() const;
};

// One unconditioned draw: random permutation, each forward edge kept with
// edge_probability, regime-specific variances.
LinearScm random_scm(std::size_t d, const RegimeTag& regime, std::uint64_t seed, const WeightLaw& law = {});

enum class EffectTruth { NonZero, Zero };

inline constexpr std::size_t kMaxGenerationAttempts = 1'000'000;

// Draws from one seeded stream until the total effect i -> j is non-zero
// (NonZero) or exactly zero because j is not a descendant of i (Zero).
LinearScm generate_benchmark_scm(std::size_t d, const RegimeTag& regime, EffectTruth truth, std::size_t i,
                                 std::size_t j, std::uint64_t seed, const WeightLaw& law = {});

}  // namespace dualcause
