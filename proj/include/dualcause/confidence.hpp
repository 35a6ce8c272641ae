#pragma once

// Confidence regions for a total effect obtained by inverting dual likelihood
// ratio tests jointly over causal structure and effect size. Each region is a
// union of closed intervals, one per plausible i-before-j hypothesis class,
// plus possibly the isolated point zero.

#include "dualcause/dualml.hpp"
#include "dualcause/orderings.hpp"
#include "dualcause/scm.hpp"

#include <optional>
#include <vector>

namespace dualcause {

// Inverse CDF of the chi-square distribution with 1 or 2 degrees of freedom.
double chi2_quantile(int df, double p);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

class ConfidenceRegion {
public:
    ConfidenceRegion() = default;

    // Merges `raw` into sorted disjoint form. The zero atom is kept only when
    // zero is requested and no interval covers it.
    ConfidenceRegion(std::vector<Interval> raw, bool zero_included, double alpha, std::size_t n,
                     RegimeTag regime);

    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    bool zero_atom() const noexcept { return zero_atom_; }
    double alpha() const noexcept { return alpha_; }
    std::size_t n() const noexcept { return n_; }
    const RegimeTag& regime() const noexcept { return regime_; }

    // Membership with optional slack: true when some member lies within tol.
    bool contains(double psi, double tol = 0.0) const;
    // Total length of the intervals; the isolated zero adds nothing.
    double width() const;
    bool includes_zero() const;
    // Every point of this region lies in `other`.
    bool subset_of(const ConfidenceRegion& other) const;

private:
    std::vector<Interval> intervals_;
    bool zero_atom_ = false;
    double alpha_ = 0.05;
    std::size_t n_ = 0;
    RegimeTag regime_;
};

// Closed-form interval for one i-before-j hypothesis class.
struct IntervalComputation {
    HypothesisClass cls;
    double discriminant = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    // Quadratic a psi^2 + 2 b psi + c <= 0 whose roots are the bounds.
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct RegionDetail {
    ConfidenceRegion region;
    std::vector<IntervalComputation> classes;
    // Partial-EV: log K and log Z. Full-EV: minimal residual sums over all
    // orderings and over orderings with j before i.
    double best_score = 0.0;
    double zero_score = 0.0;
};

RegionDetail conf_general_detail(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                                 double alpha);
RegionDetail conf_pev_detail(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                             double alpha);
RegionDetail conf_ev_detail(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                            double alpha);

ConfidenceRegion conf_general(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                              double alpha);
ConfidenceRegion conf_pev(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                          double alpha);
ConfidenceRegion conf_ev(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                         double alpha);

// Dispatch on the regime kind.
ConfidenceRegion confidence_region(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                                   double alpha, const RegimeTag& regime);

}  // namespace dualcause
