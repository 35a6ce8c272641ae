#include "dualcause/orderings.hpp"

#include "dualcause/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace dualcause {

namespace {

constexpr std::size_t kMaxParentSetNodes = 24;
constexpr std::size_t kMaxPevClassNodes = 16;
constexpr std::size_t kMaxBruteForceNodes = 8;

void check_pair(std::size_t d, std::size_t i, std::size_t j) {
    if (d < 2) {
        throw InvalidArgument("need at least two nodes");
    }
    if (i >= d || j >= d || i == j) {
        throw InvalidArgument("query nodes must be distinct and in range");
    }
}

}  // namespace

bool scores_tie(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= kTieTolerance * scale;
}

CompleteOrdering::CompleteOrdering(std::vector<std::size_t> perm) : perm_(std::move(perm)), pos_(perm_.size()) {
    if (perm_.empty()) {
        throw InvalidArgument("ordering must contain at least one node");
    }
    std::vector<bool> seen(perm_.size(), false);
    for (std::size_t t = 0; t < perm_.size(); ++t) {
        const auto node = perm_[t];
        if (node >= perm_.size() || seen[node]) {
            throw InvalidArgument("ordering is not a permutation");
        }
        seen[node] = true;
        pos_[node] = t;
    }
}

CompleteOrdering CompleteOrdering::identity(std::size_t d) {
    std::vector<std::size_t> p(d);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return CompleteOrdering(std::move(p));
}

NodeMask CompleteOrdering::predecessors(std::size_t node) const {
    NodeMask m = 0;
    for (std::size_t t = 0; t < pos_.at(node); ++t) {
        m |= bit(perm_[t]);
    }
    return m;
}

NodeMask CompleteOrdering::successors(std::size_t node) const {
    NodeMask m = 0;
    for (std::size_t t = pos_.at(node) + 1; t < perm_.size(); ++t) {
        m |= bit(perm_[t]);
    }
    return m;
}

bool HypothesisClass::consistent() const {
    if (i == j) {
        return false;
    }
    const NodeMask ij = bit(i) | bit(j);
    if (direction == Direction::IBeforeJ) {
        if (parents_i && (*parents_i & ij) != 0) {
            return false;
        }
        if (parents_j) {
            if (!has_node(*parents_j, i) || has_node(*parents_j, j)) {
                return false;
            }
            if (parents_i && (*parents_i & ~*parents_j) != 0) {
                return false;
            }
        }
        return true;
    }
    if (parents_j && (*parents_j & ij) != 0) {
        return false;
    }
    if (parents_i) {
        if (!has_node(*parents_i, j) || has_node(*parents_i, i)) {
            return false;
        }
        if (parents_j && (*parents_j & ~*parents_i) != 0) {
            return false;
        }
    }
    return true;
}

bool HypothesisClass::contains(const CompleteOrdering& g) const {
    const bool i_first = g.before(i, j);
    if (i_first != (direction == Direction::IBeforeJ)) {
        return false;
    }
    if (parents_i && g.predecessors(i) != *parents_i) {
        return false;
    }
    if (parents_j && g.predecessors(j) != *parents_j) {
        return false;
    }
    return true;
}

HypothesisClass class_of(const CompleteOrdering& g, std::size_t i, std::size_t j) {
    HypothesisClass c;
    c.i = i;
    c.j = j;
    c.direction = g.before(i, j) ? Direction::IBeforeJ : Direction::JBeforeI;
    c.parents_i = g.predecessors(i);
    c.parents_j = g.predecessors(j);
    return c;
}

std::vector<NodeMask> enumerate_parent_sets(std::size_t d, std::size_t i, std::size_t j) {
    check_pair(d, i, j);
    if (d > kMaxParentSetNodes) {
        throw DimensionTooLarge("parent-set enumeration supports at most 24 nodes");
    }
    const IndexSet others = mask_to_indices(full_mask(d) & ~(bit(i) | bit(j)));
    const std::size_t count = std::size_t{1} << others.size();
    std::vector<NodeMask> out;
    out.reserve(count);
    for (std::size_t code = 0; code < count; ++code) {
        NodeMask m = 0;
        for (std::size_t t = 0; t < others.size(); ++t) {
            if ((code >> t) & 1u) {
                m |= bit(others[t]);
            }
        }
        out.push_back(m);
    }
    return out;
}

std::vector<HypothesisClass> enumerate_pev_classes(std::size_t d, std::size_t i, std::size_t j) {
    check_pair(d, i, j);
    if (d > kMaxPevClassNodes) {
        throw DimensionTooLarge("partial-EV class enumeration supports at most 16 nodes");
    }
    const IndexSet others = mask_to_indices(full_mask(d) & ~(bit(i) | bit(j)));
    std::size_t per_direction = 1;
    for (std::size_t t = 0; t < others.size(); ++t) {
        per_direction *= 3;
    }
    std::vector<HypothesisClass> out;
    out.reserve(2 * per_direction);
    for (const auto dir : {Direction::IBeforeJ, Direction::JBeforeI}) {
        const std::size_t first = dir == Direction::IBeforeJ ? i : j;
        for (std::size_t code = 0; code < per_direction; ++code) {
            NodeMask before = 0;
            NodeMask between = 0;
            std::size_t rest = code;
            for (const auto node : others) {
                const auto digit = rest % 3;
                rest /= 3;
                if (digit == 0) {
                    before |= bit(node);
                } else if (digit == 1) {
                    between |= bit(node);
                }
            }
            HypothesisClass c;
            c.i = i;
            c.j = j;
            c.direction = dir;
            const NodeMask p_first = before;
            const NodeMask p_second = before | bit(first) | between;
            c.parents_i = dir == Direction::IBeforeJ ? p_first : p_second;
            c.parents_j = dir == Direction::IBeforeJ ? p_second : p_first;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<CompleteOrdering> enumerate_all_orderings(std::size_t d) {
    if (d < 1) {
        throw InvalidArgument("need at least one node");
    }
    if (d > kMaxBruteForceNodes) {
        throw DimensionTooLarge("brute-force ordering enumeration supports at most 8 nodes");
    }
    std::vector<std::size_t> p(d);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::vector<CompleteOrdering> out;
    do {
        out.emplace_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

EvOrderSearch::EvOrderSearch(const PDMatrix& precision) : d_(precision.dim()), table_(precision) {
    if (d_ > kMaxEvSearchNodes) {
        throw DimensionTooLarge("subset search supports at most 20 nodes");
    }
    const NodeMask all = full_mask(d_);
    const std::size_t states = std::size_t{1} << d_;
    constexpr double inf = std::numeric_limits<double>::infinity();
    forward_.assign(states, inf);
    backward_.assign(states, inf);
    last_nodes_.assign(states, 0);
    forward_[0] = 0.0;
    backward_[0] = 0.0;

    for (std::size_t s = 1; s < states; ++s) {
        const auto set = static_cast<NodeMask>(s);
        // forward: k is last within the prefix, its successors are V \ S.
        double best = inf;
        for (NodeMask rest = set; rest != 0; rest &= rest - 1) {
            const auto k = static_cast<std::size_t>(std::countr_zero(rest));
            const double v = forward_[set & ~bit(k)] + table_(k, all & ~set);
            best = std::min(best, v);
        }
        forward_[s] = best;
        NodeMask argmin = 0;
        for (NodeMask rest = set; rest != 0; rest &= rest - 1) {
            const auto k = static_cast<std::size_t>(std::countr_zero(rest));
            if (scores_tie(forward_[set & ~bit(k)] + table_(k, all & ~set), best)) {
                argmin |= bit(k);
            }
        }
        last_nodes_[s] = argmin;

        // backward: k is first within the suffix, its successors are S \ {k}.
        double best_b = inf;
        for (NodeMask rest = set; rest != 0; rest &= rest - 1) {
            const auto k = static_cast<std::size_t>(std::countr_zero(rest));
            best_b = std::min(best_b, table_(k, set & ~bit(k)) + backward_[set & ~bit(k)]);
        }
        backward_[s] = best_b;
    }
}

double EvOrderSearch::score(const CompleteOrdering& g) {
    if (g.dim() != d_) {
        throw InvalidArgument("ordering dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
        total += table_(k, g.successors(k));
    }
    return total;
}

bool EvOrderSearch::is_optimal(const CompleteOrdering& g) { return scores_tie(score(g), min_score()); }

double EvOrderSearch::best_with_parents(std::size_t node, NodeMask parents) {
    const NodeMask rest = full_mask(d_) & ~parents & ~bit(node);
    return forward_.at(parents) + table_(node, rest) + backward_.at(rest);
}

CompleteOrdering EvOrderSearch::witness() const {
    std::vector<std::size_t> perm(d_);
    NodeMask s = full_mask(d_);
    for (std::size_t t = d_; t-- > 0;) {
        const auto k = static_cast<std::size_t>(std::countr_zero(last_nodes_[s]));
        perm[t] = k;
        s &= ~bit(k);
    }
    return CompleteOrdering(std::move(perm));
}

void EvOrderSearch::collect(NodeMask s, std::vector<std::size_t>& tail, std::vector<CompleteOrdering>& out,
                            std::size_t limit) const {
    if (out.size() >= limit) {
        return;
    }
    if (s == 0) {
        out.emplace_back(std::vector<std::size_t>(tail.rbegin(), tail.rend()));
        return;
    }
    for (NodeMask rest = last_nodes_[s]; rest != 0; rest &= rest - 1) {
        const auto k = static_cast<std::size_t>(std::countr_zero(rest));
        tail.push_back(k);
        collect(s & ~bit(k), tail, out, limit);
        tail.pop_back();
    }
}

std::vector<CompleteOrdering> EvOrderSearch::optimal_orderings(std::size_t limit) const {
    std::vector<CompleteOrdering> out;
    std::vector<std::size_t> tail;
    collect(full_mask(d_), tail, out, limit);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.perm() < b.perm(); });
    return out;
}

EvOrderSearch ev_optimal_orderings(const PDMatrix& precision) { return EvOrderSearch(precision); }

}  // namespace dualcause
