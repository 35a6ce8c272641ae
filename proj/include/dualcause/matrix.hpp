#pragma once

// Dense symmetric positive-definite algebra used throughout the estimators:
// conditional (Schur complement) blocks, Cholesky-based inversion and
// log-determinants, and the uncentered empirical covariance.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dualcause {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sorted 0-based node indices.
using IndexSet = std::vector<std::size_t>;

// Bitmask over node indices; bit k set means node k is in the set.
using NodeMask = std::uint32_t;

inline constexpr std::size_t kMaxMaskNodes = 32;

// A Cholesky pivot below this multiple of the largest diagonal entry counts
// as singular.
inline constexpr double kDegeneracyTolerance = 1e-12;

inline constexpr NodeMask bit(std::size_t k) { return NodeMask{1} << k; }

inline constexpr bool has_node(NodeMask m, std::size_t k) { return (m >> k) & 1u; }

inline constexpr NodeMask full_mask(std::size_t d) {
    return d >= kMaxMaskNodes ? ~NodeMask{0} : (NodeMask{1} << d) - 1;
}

IndexSet mask_to_indices(NodeMask m);
NodeMask indices_to_mask(std::span<const std::size_t> idx);

// Symmetric positive-definite matrix, dim >= 2. Construction validates
// symmetry (relative 1e-12) and positive definiteness, then stores the exactly
// symmetrized matrix.
class PDMatrix {
public:
    explicit PDMatrix(Matrix m);

    static PDMatrix identity(std::size_t d);
    static PDMatrix diagonal(std::span<const double> diag);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

private:
    struct Trusted {};
    PDMatrix(Matrix m, Trusted) : m_(std::move(m)) {}

    Matrix m_;

    friend PDMatrix invert_pd(const PDMatrix&);
};

// n observations of d variables, one row per observation.
class SampleMatrix {
public:
    explicit SampleMatrix(Matrix rows);

    std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
    const Matrix& rows() const noexcept { return rows_; }

    // Column means subtracted; off by default in the estimators.
    SampleMatrix centered() const;

private:
    Matrix rows_;
};

// (1/n) sum_l x_l x_l^T. Throws SingularCovariance when the result is not
// positive definite.
PDMatrix empirical_covariance(const SampleMatrix& data);

// M_{A,B} - M_{A,S} (M_{S,S})^{-1} M_{S,B}, solved through a Cholesky factor of
// M_{S,S}. Throws SingularBlock if M_{S,S} is numerically singular.
Matrix conditional_block(const Matrix& m, const IndexSet& a, const IndexSet& b, const IndexSet& s);
Matrix conditional_block(const PDMatrix& m, const IndexSet& a, const IndexSet& b, const IndexSet& s);

// Scalar M_{k,k|S} for a mask S not containing k.
double conditional_variance(const Matrix& m, std::size_t k, NodeMask s);

// 2x2 block M_{{a,b},{a,b}|S} for a < b, both outside S.
Eigen::Matrix2d conditional_pair(const Matrix& m, std::size_t a, std::size_t b, NodeMask s);

PDMatrix invert_pd(const PDMatrix& m);

double log_det(const PDMatrix& m);
double log_det(const Matrix& m);

}  // namespace dualcause

namespace dualcause {

// Memo of the scalar conditional variances M_{k,k|C} keyed by (k, C), C a
// mask not containing k. Dense storage up to 16 nodes; larger dimensions
// recompute on every query. Not thread-safe: use one table per call.
class ConditionalVarianceTable {
public:
    explicit ConditionalVarianceTable(const PDMatrix& m);

    std::size_t dim() const noexcept { return d_; }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(std::size_t k, NodeMask c);

private:
    static constexpr std::size_t kDenseLimit = 16;

    Matrix m_;
    std::size_t d_;
    std::vector<double> cache_;
};

}  // namespace dualcause
