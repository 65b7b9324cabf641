#pragma once

#include <vector>

#include "ftc/interval.hpp"

namespace ftc {

using QVec = std::vector<Q>;
using QMat = std::vector<QVec>;  // row-major, rows x cols

// Exact solve of a square system; throws std::domain_error when singular.
QVec solve_rational(QMat a, QVec b);

QMat mat_mul(const QMat& a, const QMat& b);
QVec vec_mat(const QVec& v, const QMat& m);  // row vector times matrix
QVec mat_vec(const QMat& m, const QVec& v);
Q dot(const QVec& a, const QVec& b);

}  // namespace ftc
