#include "dualcause/matrix.hpp"

#include "dualcause/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace dualcause {

namespace {

Eigen::LLT<Matrix> checked_llt(const Matrix& a, const char* what) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw SingularBlock(std::string(what) + ": Cholesky factorization failed");
    }
    const double max_diag = a.diagonal().maxCoeff();
    const Vector pivots = Matrix(llt.matrixL()).diagonal().array().square();
    if (!(max_diag > 0.0) || pivots.minCoeff() <= kDegeneracyTolerance * max_diag) {
        throw SingularBlock(std::string(what) + ": Cholesky pivot below degeneracy tolerance");
    }
    return llt;
}

Matrix gather(const Matrix& m, const IndexSet& rows, const IndexSet& cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out(r, c) = m(rows[r], cols[c]);
        }
    }
    return out;
}

void check_indices(const IndexSet& idx, std::size_t d) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= d) {
            throw InvalidArgument("index " + std::to_string(idx[k]) + " out of range");
        }
        if (k > 0 && idx[k] <= idx[k - 1]) {
            throw InvalidArgument("index sets must be sorted and duplicate-free");
        }
    }
}

}  // namespace

IndexSet mask_to_indices(NodeMask m) {
    IndexSet out;
    out.reserve(static_cast<std::size_t>(std::popcount(m)));
    while (m != 0) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
        m &= m - 1;
    }
    return out;
}

NodeMask indices_to_mask(std::span<const std::size_t> idx) {
    NodeMask m = 0;
    for (auto k : idx) {
        if (k >= kMaxMaskNodes) {
            throw DimensionTooLarge("node index exceeds mask width");
        }
        m |= bit(k);
    }
    return m;
}

PDMatrix::PDMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw InvalidArgument("PDMatrix must be square");
    }
    if (m_.rows() < 2) {
        throw InvalidArgument("PDMatrix requires dim >= 2");
    }
    if (!m_.allFinite()) {
        throw InvalidArgument("PDMatrix entries must be finite");
    }
    const double scale = m_.cwiseAbs().maxCoeff();
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidArgument("PDMatrix must be symmetric");
    }
    m_ = 0.5 * (m_ + m_.transpose());
    checked_llt(m_, "PDMatrix");
}

PDMatrix PDMatrix::identity(std::size_t d) {
    return PDMatrix(Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
}

PDMatrix PDMatrix::diagonal(std::span<const double> diag) {
    Vector v(static_cast<Eigen::Index>(diag.size()));
    for (std::size_t k = 0; k < diag.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) = diag[k];
    }
    return PDMatrix(Matrix(v.asDiagonal()));
}

SampleMatrix::SampleMatrix(Matrix rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 1) {
        throw InvalidSampleCount("sample matrix needs at least one row");
    }
    if (rows_.cols() < 1) {
        throw InvalidArgument("sample matrix needs at least one column");
    }
    if (!rows_.allFinite()) {
        throw InvalidArgument("sample matrix entries must be finite");
    }
}

SampleMatrix SampleMatrix::centered() const {
    Matrix c = rows_.rowwise() - rows_.colwise().mean();
    return SampleMatrix(std::move(c));
}

PDMatrix empirical_covariance(const SampleMatrix& data) {
    const Matrix& x = data.rows();
    Matrix s = (x.transpose() * x) / static_cast<double>(data.n());
    s = 0.5 * (s + s.transpose());
    try {
        return PDMatrix(std::move(s));
    } catch (const SingularBlock&) {
        throw SingularCovariance("empirical covariance is singular (n=" + std::to_string(data.n()) +
                                 ", d=" + std::to_string(data.d()) + ")");
    } catch (const InvalidArgument& e) {
        throw SingularCovariance(std::string("empirical covariance invalid: ") + e.what());
    }
}

Matrix conditional_block(const Matrix& m, const IndexSet& a, const IndexSet& b, const IndexSet& s) {
    const auto d = static_cast<std::size_t>(m.rows());
    check_indices(a, d);
    check_indices(b, d);
    check_indices(s, d);
    for (auto k : s) {
        if (std::binary_search(a.begin(), a.end(), k) || std::binary_search(b.begin(), b.end(), k)) {
            throw InvalidArgument("conditioning set must be disjoint from A and B");
        }
    }
    Matrix ab = gather(m, a, b);
    if (s.empty()) {
        return ab;
    }
    const auto llt = checked_llt(gather(m, s, s), "conditional_block");
    const Matrix sb = gather(m, s, b);
    const Matrix as = gather(m, a, s);
    return ab - as * llt.solve(sb);
}

Matrix conditional_block(const PDMatrix& m, const IndexSet& a, const IndexSet& b, const IndexSet& s) {
    return conditional_block(m.matrix(), a, b, s);
}

double conditional_variance(const Matrix& m, std::size_t k, NodeMask s) {
    if (s == 0) {
        return m(k, k);
    }
    const IndexSet idx = mask_to_indices(s);
    const auto llt = checked_llt(gather(m, idx, idx), "conditional_variance");
    Vector v(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        v(static_cast<Eigen::Index>(r)) = m(idx[r], k);
    }
    return m(k, k) - v.dot(llt.solve(v));
}

Eigen::Matrix2d conditional_pair(const Matrix& m, std::size_t a, std::size_t b, NodeMask s) {
    Eigen::Matrix2d out;
    out << m(a, a), m(a, b), m(b, a), m(b, b);
    if (s == 0) {
        return out;
    }
    const IndexSet idx = mask_to_indices(s);
    const auto llt = checked_llt(gather(m, idx, idx), "conditional_pair");
    Matrix v(static_cast<Eigen::Index>(idx.size()), 2);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        v(static_cast<Eigen::Index>(r), 0) = m(idx[r], a);
        v(static_cast<Eigen::Index>(r), 1) = m(idx[r], b);
    }
    out -= v.transpose() * llt.solve(v);
    out(0, 1) = out(1, 0) = 0.5 * (out(0, 1) + out(1, 0));
    return out;
}

PDMatrix invert_pd(const PDMatrix& m) {
    const auto llt = checked_llt(m.matrix(), "invert_pd");
    const auto d = m.matrix().rows();
    Matrix inv = llt.solve(Matrix::Identity(d, d));
    inv = 0.5 * (inv + inv.transpose());
    return PDMatrix(std::move(inv), PDMatrix::Trusted{});
}

double log_det(const Matrix& m) {
    const auto llt = checked_llt(m, "log_det");
    return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
}

double log_det(const PDMatrix& m) { return log_det(m.matrix()); }

}  // namespace dualcause

namespace dualcause {

ConditionalVarianceTable::ConditionalVarianceTable(const PDMatrix& m) : m_(m.matrix()), d_(m.dim()) {
    if (d_ > kMaxMaskNodes - 1) {
        throw DimensionTooLarge("conditional variance table supports at most 31 nodes");
    }
    if (d_ <= kDenseLimit) {
        cache_.assign(d_ << (d_ - 1), std::numeric_limits<double>::quiet_NaN());
    }
}

double ConditionalVarianceTable::operator()(std::size_t k, NodeMask c) {
    if (cache_.empty()) {
        return conditional_variance(m_, k, c);
    }
    const NodeMask low = c & (bit(k) - 1);
    const NodeMask high = c >> (k + 1);
    const std::size_t slot = (k << (d_ - 1)) | static_cast<std::size_t>(low | (high << k));
    double& v = cache_[slot];
    if (std::isnan(v)) {
        v = conditional_variance(m_, k, c);
    }
    return v;
}

}  // namespace dualcause
