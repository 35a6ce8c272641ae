#pragma once

// Dual likelihood -log det(Sigma^{-1}) - tr(Sigma * Sigma_hat^{-1}) and its
// constrained suprema per complete ordering. Every supremum reduces to
// regressions of a node on its descendants in the precision matrix, so all
// routines take the precision Sigma_hat^{-1} and never invert per class.

#include "dualcause/matrix.hpp"
#include "dualcause/orderings.hpp"
#include "dualcause/scm.hpp"

#include <vector>

namespace dualcause {

double dual_loglik(const PDMatrix& sigma, const PDMatrix& precision_hat);

// -sum_k log P_{k,k|d(k)} - d; the same for every ordering.
double sup_general(const PDMatrix& precision_hat, const CompleteOrdering& g);

// Supremum with the pair (i, j) sharing one error variance.
double sup_pev(const PDMatrix& precision_hat, const CompleteOrdering& g, std::size_t i, std::size_t j);

// Supremum with all error variances equal.
double sup_ev(const PDMatrix& precision_hat, const CompleteOrdering& g);

// Adjustment coefficient of i on j implied by g, computed from the
// regression of i on its descendants in the precision matrix:
// minus the coefficient of j, or zero when j precedes i.
double effect_from_ordering(const PDMatrix& precision_hat, const CompleteOrdering& g, std::size_t i,
                            std::size_t j);

struct EffectEstimate {
    RegimeTag regime;
    std::size_t i = 0;
    std::size_t j = 1;
    std::size_t n = 0;
    // Ascending, deduplicated at the tie tolerance.
    std::vector<double> values;
    // provenance[k] lists the classes attaining values[k].
    std::vector<std::vector<HypothesisClass>> provenance;
    // Supremum of the dual log-likelihood over the regime's model.
    double optimum = 0.0;

    bool contains(double value) const;
};

EffectEstimate estimate_effects(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                                const RegimeTag& regime);

// Shared precision-side quantities for one (precision, i, j) query.
class PrecisionModel {
public:
    explicit PrecisionModel(const PDMatrix& precision);

    std::size_t dim() const noexcept { return d_; }
    double log_det() const noexcept { return log_det_; }
    const Matrix& matrix() const noexcept { return table_.matrix(); }

    // P_{k,k|C}
    double cond_var(std::size_t k, NodeMask c) { return table_(k, c); }
    // P_{k,k|d(k)} where d(k) is everything outside parents and k.
    double residual(std::size_t k, NodeMask parents);

    // Effect of i on j when p(i) = parents_i and j is not among them.
    double effect_given_parents(std::size_t i, std::size_t j, NodeMask parents_i);

    ConditionalVarianceTable& table() noexcept { return table_; }

private:
    std::size_t d_;
    ConditionalVarianceTable table_;
    double log_det_;
};

}  // namespace dualcause
