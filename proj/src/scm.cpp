#include "dualcause/scm.hpp"

#include "dualcause/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dualcause {

RegimeTag RegimeTag::partial_ev(std::size_t i, std::size_t j) {
    if (i == j) {
        throw InvalidArgument("partial equal-variance regime needs two distinct nodes");
    }
    return {Kind::PartialEV, i, j};
}

std::string RegimeTag::name() const {
    switch (kind) {
        case Kind::General:
            return "general";
        case Kind::PartialEV:
            return "partial_ev";
        case Kind::FullEV:
            return "ev";
    }
    return "general";
}

RegimeTag RegimeTag::parse(const std::string& name, std::size_t i, std::size_t j) {
    if (name == "general") {
        return general();
    }
    if (name == "partial_ev") {
        return partial_ev(i, j);
    }
    if (name == "ev") {
        return full_ev();
    }
    throw InvalidArgument("unknown regime '" + name + "' (expected general, partial_ev or ev)");
}

LinearScm::LinearScm(Matrix weights, Vector variances, CompleteOrdering order, RegimeTag regime)
    : weights_(std::move(weights)), variances_(std::move(variances)), order_(std::move(order)), regime_(regime) {
    const auto d = static_cast<Eigen::Index>(order_.dim());
    if (weights_.rows() != d || weights_.cols() != d || variances_.size() != d) {
        throw InvalidArgument("SCM dimensions do not match the ordering");
    }
    for (Eigen::Index k = 0; k < d; ++k) {
        if (!(variances_(k) > 0.0) || !std::isfinite(variances_(k))) {
            throw InvalidArgument("error variances must be positive and finite");
        }
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            if (!std::isfinite(weights_(j, i))) {
                throw InvalidArgument("edge weights must be finite");
            }
            const bool allowed = order_.before(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (!allowed && weights_(j, i) != 0.0) {
                throw InvalidArgument("edge weight contradicts the causal order");
            }
        }
    }
    if (regime_.kind == RegimeTag::Kind::PartialEV &&
        (regime_.i >= order_.dim() || regime_.j >= order_.dim())) {
        throw InvalidArgument("regime pair out of range");
    }
}

std::size_t LinearScm::edge_count() const {
    return static_cast<std::size_t>((weights_.array() != 0.0).count());
}

Matrix total_effects(const LinearScm& scm) {
    const auto d = static_cast<Eigen::Index>(scm.dim());
    Matrix a = Matrix::Zero(d, d);
    const auto& b = scm.weights();
    for (const auto node : scm.order().perm()) {
        const auto k = static_cast<Eigen::Index>(node);
        a(k, k) = 1.0;
        for (Eigen::Index p = 0; p < d; ++p) {
            if (b(k, p) != 0.0) {
                a.row(k) += b(k, p) * a.row(p);
            }
        }
    }
    return a;
}

PDMatrix covariance_of(const LinearScm& scm) {
    const Matrix a = total_effects(scm);
    return PDMatrix(a * scm.variances().asDiagonal() * a.transpose());
}

double true_effect(const LinearScm& scm, std::size_t i, std::size_t j) {
    if (i == j || i >= scm.dim() || j >= scm.dim()) {
        throw InvalidArgument("query nodes must be distinct and in range");
    }
    return total_effects(scm)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
}

double adjustment_effect(const PDMatrix& cov, const CompleteOrdering& g, std::size_t i, std::size_t j) {
    if (g.before(j, i)) {
        return 0.0;
    }
    const IndexSet parents = mask_to_indices(g.predecessors(i));
    const Matrix block = conditional_block(cov, IndexSet{std::min(i, j), std::max(i, j)},
                                           IndexSet{std::min(i, j), std::max(i, j)}, parents);
    const Eigen::Index ii = i < j ? 0 : 1;
    const Eigen::Index jj = 1 - ii;
    return block(jj, ii) / block(ii, ii);
}

SampleMatrix sample(const LinearScm& scm, std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw InvalidSampleCount("sample size must be at least 1");
    }
    const auto d = static_cast<Eigen::Index>(scm.dim());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> standard(0.0, 1.0);
    const Vector sd = scm.variances().array().sqrt();
    const auto& b = scm.weights();
    Matrix x(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r) {
        for (const auto node : scm.order().perm()) {
            const auto k = static_cast<Eigen::Index>(node);
            double v = sd(k) * standard(rng);
            for (Eigen::Index p = 0; p < d; ++p) {
                if (b(k, p) != 0.0) {
                    v += b(k, p) * x(r, p);
                }
            }
            x(r, k) = v;
        }
    }
    return SampleMatrix(std::move(x));
}

double WeightLaw::stddev() const { return spread_is_variance ? std::sqrt(spread) : spread; }

namespace {

LinearScm draw_scm(std::size_t d, const RegimeTag& regime, std::mt19937_64& rng, const WeightLaw& law) {
    std::vector<std::size_t> perm(d);
    for (std::size_t k = 0; k < d; ++k) {
        perm[k] = k;
    }
    std::shuffle(perm.begin(), perm.end(), rng);

    std::bernoulli_distribution edge(law.edge_probability);
    std::normal_distribution<double> weight(law.mean, law.stddev());
    std::uniform_real_distribution<double> variance(0.5, 1.5);

    const auto dd = static_cast<Eigen::Index>(d);
    Matrix b = Matrix::Zero(dd, dd);
    for (std::size_t t = 0; t < d; ++t) {
        for (std::size_t u = t + 1; u < d; ++u) {
            if (edge(rng)) {
                b(static_cast<Eigen::Index>(perm[u]), static_cast<Eigen::Index>(perm[t])) = weight(rng);
            }
        }
    }
    Vector omega(dd);
    for (Eigen::Index k = 0; k < dd; ++k) {
        omega(k) = regime.kind == RegimeTag::Kind::FullEV ? 1.0 : variance(rng);
    }
    if (regime.kind == RegimeTag::Kind::PartialEV) {
        omega(static_cast<Eigen::Index>(regime.i)) = 1.0;
        omega(static_cast<Eigen::Index>(regime.j)) = 1.0;
    }
    return LinearScm(std::move(b), std::move(omega), CompleteOrdering(std::move(perm)), regime);
}

}  // namespace

LinearScm random_scm(std::size_t d, const RegimeTag& regime, std::uint64_t seed, const WeightLaw& law) {
    if (d < 2) {
        throw InvalidArgument("need at least two nodes");
    }
    std::mt19937_64 rng(seed);
    return draw_scm(d, regime, rng, law);
}

LinearScm generate_benchmark_scm(std::size_t d, const RegimeTag& regime, EffectTruth truth, std::size_t i,
                                 std::size_t j, std::uint64_t seed, const WeightLaw& law) {
    if (d < 3) {
        throw InvalidArgument("benchmark models need at least three nodes");
    }
    if (i >= d || j >= d || i == j) {
        throw InvalidArgument("query nodes must be distinct and in range");
    }
    if (regime.kind == RegimeTag::Kind::PartialEV && (regime.i >= d || regime.j >= d)) {
        throw InvalidArgument("regime pair out of range");
    }
    std::mt19937_64 rng(seed);
    for (std::size_t attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        LinearScm scm = draw_scm(d, regime, rng, law);
        const double effect = true_effect(scm, i, j);
        if ((truth == EffectTruth::NonZero) == (effect != 0.0)) {
            return scm;
        }
    }
    throw GenerationExhausted("no model with the requested effect after 1e6 draws");
}

}  // namespace dualcause
