#pragma once

#include <array>

#include "physimetrics/types.hpp"

namespace physimetrics {

/// Continuous 6D rotation parameterization: the first two columns of a
/// rotation matrix before orthonormalization.
struct Rotation6D {
  Vec3 a{1.0, 0.0, 0.0};
  Vec3 b{0.0, 1.0, 0.0};

  static Rotation6D identity() { return {}; }
};

/// Decodes a 6D rotation into a proper rotation matrix by Gram-Schmidt:
/// c1 = normalize(a), c2 = normalize(b - (b.c1) c1), c3 = c1 x c2.
/// Throws DegenerateRotation if |a| < 1e-8 or the projected b is below 1e-8.
Mat3 rot6d_to_matrix(const Rotation6D& r);

/// Extracts the first two columns of a rotation matrix.  Throws NotARotation
/// if m is not orthonormal within 1e-4 with determinant +1.
Rotation6D matrix_to_rot6d(const Mat3& m);

/// Partial derivatives of the decoded rotation w.r.t. the six parameters.
/// dcol[k] is 3x6: column j is d(rotation column k)/d(param j), params
/// ordered [ax ay az bx by bz].
struct Rot6dJacobian {
  std::array<Eigen::Matrix<double, 3, 6>, 3> dcol;
};

Rot6dJacobian rot6d_to_matrix_jacobian(const Rotation6D& r);

inline Rotation6D rot6d_from_row(const Eigen::Ref<const Eigen::Matrix<double, 1, 6>>& row) {
  return {Vec3(row[0], row[1], row[2]), Vec3(row[3], row[4], row[5])};
}

inline Eigen::Matrix<double, 1, 6> rot6d_to_row(const Rotation6D& r) {
  Eigen::Matrix<double, 1, 6> row;
  row << r.a[0], r.a[1], r.a[2], r.b[0], r.b[1], r.b[2];
  return row;
}

}  // namespace physimetrics
