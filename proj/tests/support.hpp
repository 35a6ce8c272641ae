#pragma once

// Test-only fixtures and independent oracles. Nothing here calls the
// library's conditional-block or subset-search code paths; the direct fits
// rebuild covariance matrices from plain Eigen regressions and score them with
// a hand-written dual log-likelihood.

#include "dualcause/matrix.hpp"
#include "dualcause/orderings.hpp"
#include "dualcause/scm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace dualcause::testing {

inline Matrix identifiable_sigma() {
    Matrix s(3, 3);
    s << 1, 1, 2, 1, 2, 3, 2, 3, 5.5;
    return s;
}

inline Matrix intersection_sigma() {
    Matrix s(3, 3);
    s << 1.00000000000000, 0.294584930358565, -0.176750958215139,  //
        0.294584930358565, 1.08678028119436, 0.648086846788844,    //
        -0.176750958215139, 0.648086846788844, 1.52145794696742;
    return s;
}

inline constexpr double kIntersectionEffect = 0.294584930358565;

inline LinearScm intersection_model1() {
    Matrix b = Matrix::Zero(3, 3);
    b(1, 0) = 0.294584930358565;
    b(2, 0) = -0.383006074698015;
    b(2, 1) = 0.700155015505460;
    Vector omega = Vector::Ones(3);
    return LinearScm(b, omega, CompleteOrdering({0, 1, 2}));
}

inline LinearScm intersection_model2() {
    Matrix b = Matrix::Zero(3, 3);
    b(0, 1) = 0.456230601077430;
    b(0, 2) = -0.310510067542541;
    b(1, 2) = 0.425964350891600;
    Vector omega(3);
    omega << 0.810718388180567, 0.810718388180567, 1.52145794696742;
    return LinearScm(b, omega, CompleteOrdering({2, 1, 0}));
}

// Well-conditioned random SPD matrix: A A^T / d + 0.3 I.
inline Matrix random_spd(std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const auto dd = static_cast<Eigen::Index>(d);
    Matrix a(dd, dd);
    for (Eigen::Index r = 0; r < dd; ++r) {
        for (Eigen::Index c = 0; c < dd; ++c) {
            a(r, c) = z(rng);
        }
    }
    Matrix m = a * a.transpose() / static_cast<double>(d) + 0.3 * Matrix::Identity(dd, dd);
    return 0.5 * (m + m.transpose());
}

inline CompleteOrdering random_ordering(std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = k;
    std::shuffle(p.begin(), p.end(), rng);
    return CompleteOrdering(p);
}

inline std::vector<std::size_t> successors_of(const CompleteOrdering& g, std::size_t k) {
    std::vector<std::size_t> out;
    for (std::size_t t = g.position(k) + 1; t < g.dim(); ++t) out.push_back(g.perm()[t]);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::size_t> predecessors_of(const CompleteOrdering& g, std::size_t k) {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < g.position(k); ++t) out.push_back(g.perm()[t]);
    std::sort(out.begin(), out.end());
    return out;
}

inline Matrix sub(const Matrix& m, const std::vector<std::size_t>& r, const std::vector<std::size_t>& c) {
    Matrix out(r.size(), c.size());
    for (std::size_t a = 0; a < r.size(); ++a)
        for (std::size_t b = 0; b < c.size(); ++b) out(a, b) = m(r[a], c[b]);
    return out;
}

// Conditional variance by explicit inverse, deliberately unlike the library.
inline double naive_cond_var(const Matrix& m, std::size_t k, const std::vector<std::size_t>& s) {
    if (s.empty()) return m(k, k);
    const Matrix ss = sub(m, s, s);
    const Matrix sk = sub(m, s, {k});
    return m(k, k) - (sk.transpose() * ss.inverse() * sk)(0, 0);
}

inline double naive_dual_loglik(const Matrix& sigma, const Matrix& precision) {
    return std::log(sigma.determinant()) - (sigma * precision).trace();
}

// Brute-force sum_k P_{k,k|d(k)} for one ordering.
inline double naive_ev_score(const Matrix& p, const CompleteOrdering& g) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.dim(); ++k) s += naive_cond_var(p, k, successors_of(g, k));
    return s;
}

enum class FitRegime { General, PartialEV, FullEV };

// Constrained dual-likelihood fit for ordering g: column k of V is the
// regression of node k on its descendants in the precision metric, with the
// coefficient of j in the column of i pinned to psi when `pinned` is set;
// the regime fixes the variances D. Returns Sigma = V D V^T.
inline Matrix direct_fit(const Matrix& p, const CompleteOrdering& g, std::size_t i, std::size_t j,
                         FitRegime regime, bool pinned = false, double psi = 0.0) {
    const auto d = static_cast<Eigen::Index>(g.dim());
    Matrix v = Matrix::Zero(d, d);
    Vector r(d);
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        Vector col = Vector::Zero(d);
        col(kk) = 1.0;
        auto desc = successors_of(g, k);
        Vector target = p.col(kk);
        if (pinned && k == i) {
            col(static_cast<Eigen::Index>(j)) = psi;
            target += psi * p.col(static_cast<Eigen::Index>(j));
            desc.erase(std::remove(desc.begin(), desc.end(), j), desc.end());
        }
        if (!desc.empty()) {
            const Matrix pdd = sub(p, desc, desc);
            Vector rhs(desc.size());
            for (std::size_t a = 0; a < desc.size(); ++a) rhs(static_cast<Eigen::Index>(a)) = target(desc[a]);
            const Vector w = -pdd.inverse() * rhs;
            for (std::size_t a = 0; a < desc.size(); ++a) col(desc[a]) = w(static_cast<Eigen::Index>(a));
        }
        v.col(kk) = col;
        r(kk) = col.dot(p * col);
    }
    Vector dvec(d);
    switch (regime) {
        case FitRegime::General:
            dvec = r.cwiseInverse();
            break;
        case FitRegime::PartialEV:
            dvec = r.cwiseInverse();
            dvec(static_cast<Eigen::Index>(i)) = dvec(static_cast<Eigen::Index>(j)) =
                2.0 / (r(static_cast<Eigen::Index>(i)) + r(static_cast<Eigen::Index>(j)));
            break;
        case FitRegime::FullEV:
            dvec = Vector::Constant(d, static_cast<double>(d) / r.sum());
            break;
    }
    return v * dvec.asDiagonal() * v.transpose();
}

inline double direct_sup(const Matrix& p, const CompleteOrdering& g, std::size_t i, std::size_t j, FitRegime regime,
                         bool pinned = false, double psi = 0.0) {
    return naive_dual_loglik(direct_fit(p, g, i, j, regime, pinned, psi), p);
}

// Covariance-side adjustment coefficient with an explicit inverse.
inline double naive_effect(const Matrix& sigma, const CompleteOrdering& g, std::size_t i, std::size_t j) {
    if (g.before(j, i)) return 0.0;
    const auto pa = predecessors_of(g, i);
    if (pa.empty()) return sigma(j, i) / sigma(i, i);
    const Matrix inv = sub(sigma, pa, pa).inverse();
    const double num = sigma(j, i) - (sub(sigma, {j}, pa) * inv * sub(sigma, pa, {i}))(0, 0);
    const double den = sigma(i, i) - (sub(sigma, {i}, pa) * inv * sub(sigma, pa, {i}))(0, 0);
    return num / den;
}

struct BruteEstimate {
    double optimum = -std::numeric_limits<double>::infinity();
    std::vector<CompleteOrdering> argmax;
    std::vector<double> values;
};

inline void push_unique(std::vector<double>& values, double v) {
    for (double u : values)
        if (std::abs(u - v) <= 1e-9 * std::max({1.0, std::abs(u), std::abs(v)})) return;
    values.push_back(v);
}

// Exhaustive d! sweep: direct fits per ordering, argmax at the tie tolerance,
// effects of every maximizer (every ordering, plus zero, in the general case).
inline BruteEstimate brute_estimate(const Matrix& p, std::size_t i, std::size_t j, FitRegime regime) {
    BruteEstimate out;
    const auto all = enumerate_all_orderings(static_cast<std::size_t>(p.rows()));
    std::vector<double> sups;
    for (const auto& g : all) {
        sups.push_back(direct_sup(p, g, i, j, regime));
        out.optimum = std::max(out.optimum, sups.back());
    }
    const Matrix sigma = p.inverse();
    for (std::size_t k = 0; k < all.size(); ++k) {
        const double a = sups[k], b = out.optimum;
        const bool tie = std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
        if (regime == FitRegime::General || tie) {
            if (tie) out.argmax.push_back(all[k]);
            push_unique(out.values, naive_effect(sigma, all[k], i, j));
        }
    }
    if (regime == FitRegime::General) push_unique(out.values, 0.0);
    std::sort(out.values.begin(), out.values.end());
    return out;
}

// Direct test inversion over all orderings: psi is kept when some i-before-j
// ordering passes at chi2_crit_effect, or psi == 0 passes the zero rule.
struct DirectInversion {
    Matrix precision;
    std::size_t n;
    std::size_t i;
    std::size_t j;
    FitRegime regime;
    double crit_effect;
    double crit_zero;
    std::vector<CompleteOrdering> orderings;
    double global_sup = -std::numeric_limits<double>::infinity();
    double zero_sup = -std::numeric_limits<double>::infinity();

    DirectInversion(Matrix p, std::size_t n_, std::size_t i_, std::size_t j_, FitRegime regime_, double ce,
                    double cz)
        : precision(std::move(p)), n(n_), i(i_), j(j_), regime(regime_), crit_effect(ce), crit_zero(cz),
          orderings(enumerate_all_orderings(static_cast<std::size_t>(precision.rows()))) {
        for (const auto& g : orderings) {
            const double s = direct_sup(precision, g, i, j, regime);
            global_sup = std::max(global_sup, s);
            if (g.before(j, i)) zero_sup = std::max(zero_sup, s);
        }
    }

    // Smallest statistic over i-before-j orderings at psi.
    double min_statistic(double psi) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : orderings) {
            if (!g.before(i, j)) continue;
            const double s = direct_sup(precision, g, i, j, regime, true, psi);
            best = std::min(best, static_cast<double>(n) * (global_sup - s));
        }
        return best;
    }

    double zero_statistic() const { return static_cast<double>(n) * (global_sup - zero_sup); }

    // General regime: zero always in. Other regimes: zero rule.
    bool zero_member() const { return regime == FitRegime::General || zero_statistic() <= crit_zero; }
};

// Any ordering realizing the class: p(i), i, the nodes between, j, the rest.
inline CompleteOrdering representative(const HypothesisClass& c, std::size_t d) {
    std::vector<std::size_t> perm;
    const NodeMask pi = *c.parents_i;
    const NodeMask pj = c.parents_j.value_or(pi | bit(c.i));
    for (auto k : mask_to_indices(pi)) perm.push_back(k);
    perm.push_back(c.i);
    for (auto k : mask_to_indices(pj & ~pi & ~bit(c.i))) perm.push_back(k);
    perm.push_back(c.j);
    for (std::size_t k = 0; k < d; ++k)
        if (std::find(perm.begin(), perm.end(), k) == perm.end()) perm.push_back(k);
    return CompleteOrdering(perm);
}

struct GridReport {
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    std::size_t members = 0;
};

// Membership on psi = -3, -2.99, ..., 3 against direct inversion. Points whose
// statistic sits within 1e-8 of the critical value are skipped.
template <class Region>
GridReport grid_check(const Region& region, const DirectInversion& direct) {
    GridReport r;
    for (int k = -300; k <= 300; ++k) {
        const double psi = k / 100.0;
        const double stat = direct.min_statistic(psi);
        if (std::abs(stat - direct.crit_effect) <= 1e-8 * std::max(1.0, direct.crit_effect)) continue;
        const bool want = stat <= direct.crit_effect || (k == 0 && direct.zero_member());
        ++r.checked;
        if (region.contains(psi) != want) ++r.mismatches;
        if (want && k != 0) ++r.members;
    }
    return r;
}

}  // namespace dualcause::testing
