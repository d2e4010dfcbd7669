#include "physimetrics/rotation.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "physimetrics/errors.hpp"

namespace physimetrics {

namespace {
constexpr double kDegenerateEps = 1e-8;
constexpr double kOrthoTol = 1e-4;
}  // namespace

Mat3 rot6d_to_matrix(const Rotation6D& r) {
  if (!r.a.allFinite() || !r.b.allFinite()) {
    throw DegenerateRotation("rot6d: non-finite components");
  }
  const double na = r.a.norm();
  if (na < kDegenerateEps) {
    throw DegenerateRotation("rot6d: first axis norm below 1e-8");
  }
  const Vec3 c1 = r.a / na;
  const Vec3 u = r.b - r.b.dot(c1) * c1;
  const double nu = u.norm();
  if (nu < kDegenerateEps) {
    throw DegenerateRotation("rot6d: second axis (near-)parallel to first");
  }
  const Vec3 c2 = u / nu;
  const Vec3 c3 = c1.cross(c2);
  Mat3 m;
  m.col(0) = c1;
  m.col(1) = c2;
  m.col(2) = c3;
  return m;
}

Rotation6D matrix_to_rot6d(const Mat3& m) {
  if (!m.allFinite()) {
    throw NotARotation("matrix_to_rot6d: non-finite entries");
  }
  const Mat3 gram = m.transpose() * m;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > kOrthoTol) {
    throw NotARotation("matrix_to_rot6d: not orthonormal within 1e-4");
  }
  if (std::abs(m.determinant() - 1.0) > kOrthoTol) {
    throw NotARotation("matrix_to_rot6d: determinant is not +1");
  }
  return {m.col(0), m.col(1)};
}

Rot6dJacobian rot6d_to_matrix_jacobian(const Rotation6D& r) {
  const double na = r.a.norm();
  if (na < kDegenerateEps) {
    throw DegenerateRotation("rot6d jacobian: first axis norm below 1e-8");
  }
  const Vec3 c1 = r.a / na;
  const Vec3 u = r.b - r.b.dot(c1) * c1;
  const double nu = u.norm();
  if (nu < kDegenerateEps) {
    throw DegenerateRotation("rot6d jacobian: second axis (near-)parallel to first");
  }
  const Vec3 c2 = u / nu;

  // Normalization derivative: d(normalize(x))/dx = (I - n n^T) / |x|.
  const Mat3 dc1_da = (Mat3::Identity() - c1 * c1.transpose()) / na;
  const Mat3 du_dc1 = -(c1 * r.b.transpose() + r.b.dot(c1) * Mat3::Identity());
  const Mat3 du_da = du_dc1 * dc1_da;
  const Mat3 du_db = Mat3::Identity() - c1 * c1.transpose();
  const Mat3 dc2_du = (Mat3::Identity() - c2 * c2.transpose()) / nu;
  const Mat3 dc2_da = dc2_du * du_da;
  const Mat3 dc2_db = dc2_du * du_db;

  Mat3 c1x, c2x;
  c1x << 0, -c1.z(), c1.y(), c1.z(), 0, -c1.x(), -c1.y(), c1.x(), 0;
  c2x << 0, -c2.z(), c2.y(), c2.z(), 0, -c2.x(), -c2.y(), c2.x(), 0;
  // c3 = c1 x c2  =>  dc3 = dc1 x c2 + c1 x dc2 = -[c2]x dc1 + [c1]x dc2.
  const Mat3 dc3_da = -c2x * dc1_da + c1x * dc2_da;
  const Mat3 dc3_db = c1x * dc2_db;

  Rot6dJacobian out;
  out.dcol[0].leftCols<3>() = dc1_da;
  out.dcol[0].rightCols<3>().setZero();
  out.dcol[1].leftCols<3>() = dc2_da;
  out.dcol[1].rightCols<3>() = dc2_db;
  out.dcol[2].leftCols<3>() = dc3_da;
  out.dcol[2].rightCols<3>() = dc3_db;
  return out;
}

}  // namespace physimetrics
