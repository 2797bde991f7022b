// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hot loops, each with a serial reference and an OpenMP variant.
// Both variants accumulate every output element in the same order, so they agree bit for bit.

#include <vector>

#include "remskit/types.hpp"

namespace remskit {

enum class Backend { serial, openmp };

namespace kernels {

// y_r = sum_c K(r, c) w_c x_c
CVector weighted_matvec(const CMatrixRM& k, const Eigen::VectorXd& w, const CVector& x,
                        Backend backend = Backend::openmp);

// L * C * R^T as a dense row-major matrix (rank-M kernel assembly).
CMatrixRM low_rank_product(const CMatrix& left, const CMatrix& core, const CMatrix& right,
                           Backend backend = Backend::openmp);

// Squared norms of consecutive 2-row blocks of (rows * x): rows is (2D x N).
std::vector<double> block_intensities(const CMatrix& rows, const CVector& x, Backend backend = Backend::openmp);

}  // namespace kernels
}  // namespace remskit
