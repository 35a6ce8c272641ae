#include "dualcause/confidence.hpp"

#include "dualcause/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dualcause {

double chi2_quantile(int df, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("chi-square quantile needs 0 < p < 1");
    }
    if (df == 2) {
        return -2.0 * std::log1p(-p);
    }
    if (df != 1) {
        throw InvalidArgument("chi-square quantile supports 1 or 2 degrees of freedom");
    }
    // Upper tail Q(1/2, x/2) = erfc(sqrt(x/2)) is decreasing in x; bisect on
    // a bracket grown until it straddles the target.
    const double target = 1.0 - p;
    const auto upper_tail = [](double x) { return std::erfc(std::sqrt(0.5 * x)); };
    double lo = 0.0;
    double hi = 1.0;
    while (upper_tail(hi) > target) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (upper_tail(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ConfidenceRegion::ConfidenceRegion(std::vector<Interval> raw, bool zero_included, double alpha, std::size_t n,
                                   RegimeTag regime)
    : alpha_(alpha), n_(n), regime_(regime) {
    for (const auto& iv : raw) {
        if (!(iv.lower <= iv.upper) || !std::isfinite(iv.lower) || !std::isfinite(iv.upper)) {
            throw InvalidArgument("interval bounds must be finite with lower <= upper");
        }
    }
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
        return a.lower < b.lower || (a.lower == b.lower && a.upper < b.upper);
    });
    for (const auto& iv : raw) {
        if (!intervals_.empty() && iv.lower <= intervals_.back().upper) {
            intervals_.back().upper = std::max(intervals_.back().upper, iv.upper);
        } else {
            intervals_.push_back(iv);
        }
    }
    zero_atom_ = zero_included && !contains(0.0);
}

bool ConfidenceRegion::contains(double psi, double tol) const {
    if (zero_atom_ && std::abs(psi) <= tol) {
        return true;
    }
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [&](const Interval& iv) { return iv.lower - tol <= psi && psi <= iv.upper + tol; });
}

double ConfidenceRegion::width() const {
    double w = 0.0;
    for (const auto& iv : intervals_) {
        w += iv.width();
    }
    return w;
}

bool ConfidenceRegion::includes_zero() const { return contains(0.0); }

bool ConfidenceRegion::subset_of(const ConfidenceRegion& other) const {
    if (zero_atom_ && !other.includes_zero()) {
        return false;
    }
    return std::all_of(intervals_.begin(), intervals_.end(), [&](const Interval& iv) {
        return std::any_of(other.intervals_.begin(), other.intervals_.end(),
                           [&](const Interval& o) { return o.lower <= iv.lower && iv.upper <= o.upper; });
    });
}

namespace {

void check_inputs(const PDMatrix& p, std::size_t n, std::size_t i, std::size_t j, double alpha) {
    const std::size_t d = p.dim();
    if (i >= d || j >= d || i == j) {
        throw InvalidArgument("query nodes must be distinct and in range");
    }
    if (n < d) {
        throw InvalidArgument("sample size must be at least the dimension");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
}

std::string describe(const HypothesisClass& c) {
    std::string s = "class(p(i)={";
    bool first = true;
    for (auto k : mask_to_indices(c.parents_i.value_or(0))) {
        s += (first ? "" : ",") + std::to_string(k);
        first = false;
    }
    s += "})";
    return s;
}

// Coefficients of the quadratic q(psi) = c0 + 2 b psi + a psi^2, the residual
// of i regressed on d(i) with the coefficient on j pinned to -psi.
struct PinnedRegression {
    double a;
    double b;
    double c0;
};

PinnedRegression pinned_regression(PrecisionModel& model, std::size_t i, std::size_t j, NodeMask parents_i,
                                   const HypothesisClass& cls) {
    const NodeMask rest = full_mask(model.dim()) & ~parents_i & ~bit(i) & ~bit(j);
    const auto q = conditional_pair(model.matrix(), std::min(i, j), std::max(i, j), rest);
    const Eigen::Index si = i < j ? 0 : 1;
    const Eigen::Index sj = 1 - si;
    const double a = q(sj, sj);
    if (!(a > kDegeneracyTolerance * model.matrix()(j, j))) {
        throw DegenerateQuadratic("non-positive leading coefficient for " + describe(cls));
    }
    return {a, q(0, 1), q(si, si)};
}

// Bounds of a psi^2 + 2 b psi + c <= 0.
IntervalComputation solve_quadratic(HypothesisClass cls, double a, double b, double c) {
    IntervalComputation out;
    out.cls = std::move(cls);
    out.a = a;
    out.b = b;
    out.c = c;
    double disc = b * b - a * c;
    const double scale = std::max(b * b, std::abs(a * c));
    if (std::abs(disc) <= 1e-12 * scale) {
        disc = 0.0;
    }
    out.discriminant = disc;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        out.lower = (-b - root) / a;
        out.upper = (-b + root) / a;
    }
    return out;
}

ConfidenceRegion assemble(const std::vector<IntervalComputation>& classes, bool zero, double alpha,
                          std::size_t n, RegimeTag regime) {
    std::vector<Interval> raw;
    for (const auto& c : classes) {
        if (c.lower && c.upper) {
            raw.push_back({*c.lower, *c.upper});
        }
    }
    return ConfidenceRegion(std::move(raw), zero, alpha, n, regime);
}

}  // namespace

RegionDetail conf_general_detail(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                                 double alpha) {
    check_inputs(precision_hat, n, i, j, alpha);
    const std::size_t d = precision_hat.dim();
    PrecisionModel model(precision_hat);
    const double inflate = std::exp(chi2_quantile(1, 1.0 - alpha) / static_cast<double>(n));
    RegionDetail out;
    for (const NodeMask p : enumerate_parent_sets(d, i, j)) {
        HypothesisClass cls{i, j, Direction::IBeforeJ, p, {}};
        const auto reg = pinned_regression(model, i, j, p, cls);
        const double c = reg.c0 - model.residual(i, p) * inflate;
        out.classes.push_back(solve_quadratic(std::move(cls), reg.a, reg.b, c));
    }
    out.region = assemble(out.classes, true, alpha, n, RegimeTag::general());
    return out;
}

RegionDetail conf_pev_detail(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                             double alpha) {
    check_inputs(precision_hat, n, i, j, alpha);
    const std::size_t d = precision_hat.dim();
    PrecisionModel model(precision_hat);
    const auto classes = enumerate_pev_classes(d, i, j);

    // log K(G) = log prod_{k != i,j} sqrt(P_{k,k|d(k)}) + log(A + B), with the
    // product recovered from det P = prod_k P_{k,k|d(k)}.
    struct Scored {
        double log_others;
        double log_k;
        double resid_j;
    };
    std::vector<Scored> scored;
    scored.reserve(classes.size());
    double log_k_min = std::numeric_limits<double>::infinity();
    double log_z_min = std::numeric_limits<double>::infinity();
    for (const auto& c : classes) {
        const double a = model.residual(i, *c.parents_i);
        const double b = model.residual(j, *c.parents_j);
        const double log_others = 0.5 * (model.log_det() - std::log(a) - std::log(b));
        const double log_k = log_others + std::log(a + b);
        scored.push_back({log_others, log_k, b});
        log_k_min = std::min(log_k_min, log_k);
        if (c.direction == Direction::JBeforeI) {
            log_z_min = std::min(log_z_min, log_k);
        }
    }

    const auto nn = static_cast<double>(n);
    const double crit2 = chi2_quantile(2, 1.0 - alpha);
    const double crit1 = chi2_quantile(1, 1.0 - alpha);
    RegionDetail out;
    out.best_score = log_k_min;
    out.zero_score = log_z_min;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const auto& cls = classes[k];
        if (cls.direction != Direction::IBeforeJ) {
            continue;
        }
        const auto reg = pinned_regression(model, i, j, *cls.parents_i, cls);
        const double budget = std::exp(log_k_min + crit2 / (2.0 * nn) - scored[k].log_others);
        const double c = scored[k].resid_j + reg.c0 - budget;
        out.classes.push_back(solve_quadratic(cls, reg.a, reg.b, c));
    }
    const bool zero = log_z_min <= log_k_min + crit1 / (2.0 * nn);
    out.region = assemble(out.classes, zero, alpha, n, RegimeTag::partial_ev(i, j));
    return out;
}

RegionDetail conf_ev_detail(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                            double alpha) {
    check_inputs(precision_hat, n, i, j, alpha);
    const std::size_t d = precision_hat.dim();
    PrecisionModel model(precision_hat);
    EvOrderSearch search(precision_hat);
    const double best = search.min_score();
    const double dn = static_cast<double>(d) * static_cast<double>(n);
    const double crit2 = chi2_quantile(2, 1.0 - alpha);
    const double crit1 = chi2_quantile(1, 1.0 - alpha);

    RegionDetail out;
    out.best_score = best;
    out.zero_score = std::numeric_limits<double>::infinity();
    const NodeMask all = full_mask(d);
    for (const NodeMask p : enumerate_parent_sets(d, i, j)) {
        HypothesisClass cls{i, j, Direction::IBeforeJ, p, {}};
        const auto reg = pinned_regression(model, i, j, p, cls);
        // cheapest residual sum of every node but i among orderings with p(i) = p
        const NodeMask desc = all & ~p & ~bit(i);
        const double others = search.forward(p) + search.backward(desc);
        const double c = reg.c0 - (best * std::exp(crit2 / dn) - others);
        out.classes.push_back(solve_quadratic(std::move(cls), reg.a, reg.b, c));
    }
    const NodeMask candidates = all & ~bit(i);
    for (NodeMask p = 0;; p = (p - candidates) & candidates) {
        if (has_node(p, j)) {
            out.zero_score = std::min(out.zero_score, search.best_with_parents(i, p));
        }
        if (p == candidates) {
            break;
        }
    }
    const bool zero = out.zero_score <= best * std::exp(crit1 / dn);
    out.region = assemble(out.classes, zero, alpha, n, RegimeTag::full_ev());
    return out;
}

ConfidenceRegion conf_general(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                              double alpha) {
    return conf_general_detail(precision_hat, n, i, j, alpha).region;
}

ConfidenceRegion conf_pev(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                          double alpha) {
    return conf_pev_detail(precision_hat, n, i, j, alpha).region;
}

ConfidenceRegion conf_ev(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                         double alpha) {
    return conf_ev_detail(precision_hat, n, i, j, alpha).region;
}

ConfidenceRegion confidence_region(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                                   double alpha, const RegimeTag& regime) {
    switch (regime.kind) {
        case RegimeTag::Kind::General:
            return conf_general(precision_hat, n, i, j, alpha);
        case RegimeTag::Kind::PartialEV:
            return conf_pev(precision_hat, n, i, j, alpha);
        case RegimeTag::Kind::FullEV:
            return conf_ev(precision_hat, n, i, j, alpha);
    }
    throw InvalidArgument("unknown regime");
}

}  // namespace dualcause
