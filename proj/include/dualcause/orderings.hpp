#pragma once

// Complete-DAG causal orderings and the equivalence classes that let the
// estimators avoid sweeping all d! permutations.

#include "dualcause/matrix.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dualcause {

// Two scores tie when |a-b| <= 1e-9 * max(1, |a|, |b|).
inline constexpr double kTieTolerance = 1e-9;
bool scores_tie(double a, double b);

// perm[t] is the node at position t. Every earlier node is a parent of every
// later node.
class CompleteOrdering {
public:
    explicit CompleteOrdering(std::vector<std::size_t> perm);

    static CompleteOrdering identity(std::size_t d);

    std::size_t dim() const noexcept { return perm_.size(); }
    const std::vector<std::size_t>& perm() const noexcept { return perm_; }
    std::size_t position(std::size_t node) const { return pos_.at(node); }
    bool before(std::size_t a, std::size_t b) const { return pos_.at(a) < pos_.at(b); }

    NodeMask predecessors(std::size_t node) const;
    NodeMask successors(std::size_t node) const;

    friend bool operator==(const CompleteOrdering&, const CompleteOrdering&) = default;

private:
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> pos_;
};

enum class Direction { IBeforeJ, JBeforeI };

// Orderings grouped by the parent sets of the query pair (i, j). An unset
// parent set means the class ranges over every choice of it.
struct HypothesisClass {
    std::size_t i = 0;
    std::size_t j = 1;
    Direction direction = Direction::IBeforeJ;
    std::optional<NodeMask> parents_i;
    std::optional<NodeMask> parents_j;

    // Realizable by at least one complete ordering.
    bool consistent() const;
    bool contains(const CompleteOrdering& g) const;

    friend bool operator==(const HypothesisClass&, const HypothesisClass&) = default;
};

// The class of g with respect to (i, j) keeping both parent sets.
HypothesisClass class_of(const CompleteOrdering& g, std::size_t i, std::size_t j);

// All 2^(d-2) subsets of V\{i,j}, ascending by bitmask.
std::vector<NodeMask> enumerate_parent_sets(std::size_t d, std::size_t i, std::size_t j);

// All 2*3^(d-2) classes (direction, p(i), p(j)). The i-before-j block comes
// first; within a block every other node is assigned to before-both,
// between, or after-both, lowest node index as the fastest digit.
std::vector<HypothesisClass> enumerate_pev_classes(std::size_t d, std::size_t i, std::size_t j);

// All d! orderings in lexicographic order, d <= 8.
std::vector<CompleteOrdering> enumerate_all_orderings(std::size_t d);

// Subset dynamic program for min over orderings of sum_k P_{k,k|d(k)}, with
// P a precision matrix. forward(S) is the cheapest arrangement of S as the
// first |S| positions and backward(S) the cheapest arrangement of S as the
// last |S| positions, so any ordering with p(i) = S costs at least
// forward(S) + P_{i,i|rest} + backward(rest).
class EvOrderSearch {
public:
    explicit EvOrderSearch(const PDMatrix& precision);

    std::size_t dim() const noexcept { return d_; }
    double min_score() const noexcept { return forward_.back(); }
    double forward(NodeMask s) const { return forward_.at(s); }
    double backward(NodeMask s) const { return backward_.at(s); }

    // sum_k P_{k,k|d(k)} for one ordering.
    double score(const CompleteOrdering& g);
    bool is_optimal(const CompleteOrdering& g);

    // Cheapest ordering with p(node) = parents.
    double best_with_parents(std::size_t node, NodeMask parents);

    // One optimal ordering, filled from the back with the smallest tied node.
    CompleteOrdering witness() const;

    // Every tied optimal ordering, up to `limit` of them.
    std::vector<CompleteOrdering> optimal_orderings(std::size_t limit = 10000) const;

    ConditionalVarianceTable& table() noexcept { return table_; }

private:
    void collect(NodeMask s, std::vector<std::size_t>& tail, std::vector<CompleteOrdering>& out,
                 std::size_t limit) const;

    std::size_t d_;
    ConditionalVarianceTable table_;
    std::vector<double> forward_;
    std::vector<double> backward_;
    // Nodes that can be placed last within prefix S at the optimal cost.
    std::vector<NodeMask> last_nodes_;
};

inline constexpr std::size_t kMaxEvSearchNodes = 20;

EvOrderSearch ev_optimal_orderings(const PDMatrix& precision);

}  // namespace dualcause
