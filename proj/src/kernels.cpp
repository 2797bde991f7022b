// SPDX-License-Identifier: Apache-2.0
#include "remskit/kernels.hpp"

#include "remskit/errors.hpp"

namespace remskit::kernels {

namespace {

Complex row_dot(const CMatrixRM& k, Eigen::Index r, const Eigen::VectorXd& w, const CVector& x)
{
    const Complex* row = k.data() + r * k.cols();
    Complex s = 0.0;
    for (Eigen::Index c = 0; c < k.cols(); ++c)
        s += row[c] * (w[c] * x[c]);
    return s;
}

Complex low_rank_entry(const CMatrix& lc, const CMatrix& right, Eigen::Index r, Eigen::Index c)
{
    Complex s = 0.0;
    for (Eigen::Index m = 0; m < lc.cols(); ++m)
        s += lc(r, m) * right(c, m);
    return s;
}

}  // namespace

CVector weighted_matvec(const CMatrixRM& k, const Eigen::VectorXd& w, const CVector& x, Backend backend)
{
    if (k.cols() != x.size() || w.size() != x.size())
        throw InputError("weighted_matvec: dimension mismatch");
    const Eigen::Index n = k.rows();
    CVector y(n);
    if (backend == Backend::openmp) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index r = 0; r < n; ++r)
            y[r] = row_dot(k, r, w, x);
    } else {
        for (Eigen::Index r = 0; r < n; ++r)
            y[r] = row_dot(k, r, w, x);
    }
    return y;
}

CMatrixRM low_rank_product(const CMatrix& left, const CMatrix& core, const CMatrix& right, Backend backend)
{
    if (left.cols() != core.rows() || core.cols() != right.cols())
        throw InputError("low_rank_product: dimension mismatch");
    const CMatrix lc = left * core;
    const Eigen::Index rows = left.rows(), cols = right.rows();
    CMatrixRM out(rows, cols);
    if (backend == Backend::openmp) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                out(r, c) = low_rank_entry(lc, right, r, c);
    } else {
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                out(r, c) = low_rank_entry(lc, right, r, c);
    }
    return out;
}

std::vector<double> block_intensities(const CMatrix& rows, const CVector& x, Backend backend)
{
    if (rows.cols() != x.size() || rows.rows() % 2 != 0)
        throw InputError("block_intensities: dimension mismatch");
    const Eigen::Index n = rows.rows() / 2;
    std::vector<double> out(n);
    auto one = [&](Eigen::Index d) {
        Complex a = 0.0, b = 0.0;
        for (Eigen::Index c = 0; c < x.size(); ++c) {
            a += rows(2 * d, c) * x[c];
            b += rows(2 * d + 1, c) * x[c];
        }
        return std::norm(a) + std::norm(b);
    };
    if (backend == Backend::openmp) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index d = 0; d < n; ++d)
            out[d] = one(d);
    } else {
        for (Eigen::Index d = 0; d < n; ++d)
            out[d] = one(d);
    }
    return out;
}

}  // namespace remskit::kernels
