#include "dualcause/dualml.hpp"

#include "dualcause/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dualcause {

namespace {

void check_query(std::size_t d, std::size_t i, std::size_t j) {
    if (i >= d || j >= d || i == j) {
        throw InvalidArgument("query nodes must be distinct and in range");
    }
}

void check_ordering(const PDMatrix& p, const CompleteOrdering& g) {
    if (g.dim() != p.dim()) {
        throw InvalidArgument("ordering dimension does not match the matrix");
    }
}

double residual_on_successors(const PDMatrix& p, const CompleteOrdering& g, std::size_t k) {
    return conditional_variance(p.matrix(), k, g.successors(k));
}

// Collects (value, class) pairs, merging values that tie.
class EffectCollector {
public:
    void add(double value, HypothesisClass cls) {
        for (auto& e : entries_) {
            if (scores_tie(e.value, value)) {
                e.classes.push_back(std::move(cls));
                return;
            }
        }
        entries_.push_back({value, {std::move(cls)}});
    }

    void finish(EffectEstimate& out) {
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const Entry& a, const Entry& b) { return a.value < b.value; });
        for (auto& e : entries_) {
            out.values.push_back(e.value);
            out.provenance.push_back(std::move(e.classes));
        }
    }

private:
    struct Entry {
        double value;
        std::vector<HypothesisClass> classes;
    };
    std::vector<Entry> entries_;
};

}  // namespace

PrecisionModel::PrecisionModel(const PDMatrix& precision)
    : d_(precision.dim()), table_(precision), log_det_(dualcause::log_det(precision)) {}

double PrecisionModel::residual(std::size_t k, NodeMask parents) {
    return table_(k, full_mask(d_) & ~parents & ~bit(k));
}

double PrecisionModel::effect_given_parents(std::size_t i, std::size_t j, NodeMask parents_i) {
    if (has_node(parents_i, j)) {
        return 0.0;
    }
    const NodeMask rest = full_mask(d_) & ~parents_i & ~bit(i) & ~bit(j);
    const auto q = conditional_pair(matrix(), std::min(i, j), std::max(i, j), rest);
    return -q(0, 1) / q(i < j ? 1 : 0, i < j ? 1 : 0);
}

double dual_loglik(const PDMatrix& sigma, const PDMatrix& precision_hat) {
    if (sigma.dim() != precision_hat.dim()) {
        throw InvalidArgument("dimension mismatch");
    }
    const double trace = (sigma.matrix().cwiseProduct(precision_hat.matrix())).sum();
    return log_det(sigma) - trace;
}

double sup_general(const PDMatrix& precision_hat, const CompleteOrdering& g) {
    check_ordering(precision_hat, g);
    double total = 0.0;
    for (std::size_t k = 0; k < g.dim(); ++k) {
        total += std::log(residual_on_successors(precision_hat, g, k));
    }
    return -total - static_cast<double>(g.dim());
}

double sup_pev(const PDMatrix& precision_hat, const CompleteOrdering& g, std::size_t i, std::size_t j) {
    check_ordering(precision_hat, g);
    check_query(g.dim(), i, j);
    double total = 0.0;
    for (std::size_t k = 0; k < g.dim(); ++k) {
        if (k != i && k != j) {
            total += std::log(residual_on_successors(precision_hat, g, k));
        }
    }
    const double pooled = 0.5 * (residual_on_successors(precision_hat, g, i) +
                                 residual_on_successors(precision_hat, g, j));
    return -total - 2.0 * std::log(pooled) - static_cast<double>(g.dim());
}

double sup_ev(const PDMatrix& precision_hat, const CompleteOrdering& g) {
    check_ordering(precision_hat, g);
    const auto d = static_cast<double>(g.dim());
    double total = 0.0;
    for (std::size_t k = 0; k < g.dim(); ++k) {
        total += residual_on_successors(precision_hat, g, k);
    }
    return -d * std::log(total / d) - d;
}

double effect_from_ordering(const PDMatrix& precision_hat, const CompleteOrdering& g, std::size_t i,
                            std::size_t j) {
    check_ordering(precision_hat, g);
    check_query(g.dim(), i, j);
    if (!g.before(i, j)) {
        return 0.0;
    }
    const IndexSet desc = mask_to_indices(g.successors(i));
    const Matrix& p = precision_hat.matrix();
    Matrix block(desc.size(), desc.size());
    Vector rhs(static_cast<Eigen::Index>(desc.size()));
    Eigen::Index pos_j = 0;
    for (std::size_t r = 0; r < desc.size(); ++r) {
        const auto ri = static_cast<Eigen::Index>(r);
        rhs(ri) = p(desc[r], i);
        if (desc[r] == j) {
            pos_j = ri;
        }
        for (std::size_t c = 0; c < desc.size(); ++c) {
            block(ri, static_cast<Eigen::Index>(c)) = p(desc[r], desc[c]);
        }
    }
    Eigen::LLT<Matrix> llt(block);
    if (llt.info() != Eigen::Success) {
        throw SingularBlock("effect_from_ordering: descendant block is singular");
    }
    const Vector coef = llt.solve(rhs);
    return -coef(pos_j);
}

bool EffectEstimate::contains(double value) const {
    return std::any_of(values.begin(), values.end(), [&](double v) { return scores_tie(v, value); });
}

EffectEstimate estimate_effects(const PDMatrix& precision_hat, std::size_t n, std::size_t i, std::size_t j,
                                const RegimeTag& regime) {
    const std::size_t d = precision_hat.dim();
    check_query(d, i, j);
    const auto dd = static_cast<double>(d);
    PrecisionModel model(precision_hat);
    EffectEstimate out;
    out.regime = regime;
    out.i = i;
    out.j = j;
    out.n = n;
    EffectCollector collector;

    switch (regime.kind) {
        case RegimeTag::Kind::General: {
            out.optimum = -model.log_det() - dd;
            for (const NodeMask p : enumerate_parent_sets(d, i, j)) {
                collector.add(model.effect_given_parents(i, j, p), HypothesisClass{i, j, Direction::IBeforeJ, p, {}});
            }
            collector.add(0.0, HypothesisClass{i, j, Direction::JBeforeI, {}, {}});
            break;
        }
        case RegimeTag::Kind::PartialEV: {
            if (!((regime.i == i && regime.j == j) || (regime.i == j && regime.j == i))) {
                throw InvalidArgument("partial equal-variance pair must match the query pair");
            }
            const auto classes = enumerate_pev_classes(d, i, j);
            std::vector<double> sups;
            sups.reserve(classes.size());
            for (const auto& c : classes) {
                const double a = model.residual(i, *c.parents_i);
                const double b = model.residual(j, *c.parents_j);
                const double others = model.log_det() - std::log(a) - std::log(b);
                sups.push_back(-others - 2.0 * std::log(0.5 * (a + b)) - dd);
            }
            out.optimum = *std::max_element(sups.begin(), sups.end());
            for (std::size_t c = 0; c < classes.size(); ++c) {
                if (!scores_tie(sups[c], out.optimum)) {
                    continue;
                }
                const auto& cls = classes[c];
                const double value =
                    cls.direction == Direction::IBeforeJ ? model.effect_given_parents(i, j, *cls.parents_i) : 0.0;
                collector.add(value, cls);
            }
            break;
        }
        case RegimeTag::Kind::FullEV: {
            EvOrderSearch search(precision_hat);
            const double best = search.min_score();
            out.optimum = -dd * std::log(best / dd) - dd;
            const NodeMask others = full_mask(d) & ~bit(i);
            // every subset of V \ {i} as p(i)
            for (NodeMask p = 0;; p = (p - others) & others) {
                if (scores_tie(search.best_with_parents(i, p), best)) {
                    if (has_node(p, j)) {
                        collector.add(0.0, HypothesisClass{i, j, Direction::JBeforeI, p, {}});
                    } else {
                        collector.add(model.effect_given_parents(i, j, p),
                                      HypothesisClass{i, j, Direction::IBeforeJ, p, {}});
                    }
                }
                if (p == others) {
                    break;
                }
            }
            break;
        }
    }
    collector.finish(out);
    return out;
}

}  // namespace dualcause
