#include "physimetrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "physimetrics/errors.hpp"

namespace physimetrics {

namespace {

/// Lowest sphere surface height relative to the ground for one frame.
double lowest_surface(const std::vector<SphereState>& spheres, double ground_height) {
  double z_min = std::numeric_limits<double>::infinity();
  for (const auto& sp : spheres) {
    z_min = std::min(z_min, sp.center.z() - sp.radius - ground_height);
  }
  return z_min;
}

}  // namespace

GroundContact ground_contact_metrics(const PointMatrix& positions, int frames,
                                     const SphereBody& sb, const GroundPlane& g) {
  const auto centers = sphere_centers(positions, frames, sb);
  double penetration = 0.0;
  double floating = 0.0;
  for (int t = 0; t < frames; ++t) {
    const double z_min = lowest_surface(centers[t], g.height);
    penetration += std::max(0.0, -z_min);
    floating += std::max(0.0, z_min);
  }
  GroundContact out;
  out.penetration_mm = 1000.0 * penetration / frames;
  out.float_mm = 1000.0 * floating / frames;
  out.foot_contact_mm = out.penetration_mm + out.float_mm;
  return out;
}

double skate(const PointMatrix& positions, int frames, const SphereBody& sb,
             const GroundPlane& g, double fps, double contact_eps) {
  if (frames < 2) {
    throw TooShort("skate: need at least two frames");
  }
  const auto centers = sphere_centers(positions, frames, sb);
  double sum_speed = 0.0;
  long contacts = 0;
  for (int t = 0; t < frames; ++t) {
    // Per-frame displacement, final frame padded like the velocity rule.
    const int t0 = (t + 1 < frames) ? t : t - 1;
    for (std::size_t k = 0; k < centers[t].size(); ++k) {
      const auto& sp = centers[t][k];
      if (sp.center.z() - sp.radius <= g.height + contact_eps) {
        const Eigen::Vector2d dxy = centers[t0 + 1][k].center.head<2>() -
                                    centers[t0][k].center.head<2>();
        sum_speed += dxy.norm() * fps;
        ++contacts;
      }
    }
  }
  return contacts == 0 ? 0.0 : 100.0 * sum_speed / static_cast<double>(contacts);
}

double pfc(const PointMatrix& positions, int frames, const Skeleton& s, double fps) {
  if (frames < 3) {
    throw TooShort("pfc: need at least three frames for accelerations");
  }
  const int J = s.joint_count();
  if (positions.rows() != static_cast<Eigen::Index>(frames) * J) {
    throw ShapeMismatch("pfc: positions rows disagree with frames * joints");
  }
  const int lf = s.left_foot_index();
  const int rf = s.right_foot_index();
  const int root = s.root_index();
  double sum = 0.0;
  for (int t = 1; t + 1 < frames; ++t) {
    auto at = [&](int joint, int frame) -> Vec3 {
      return positions.row(flat_index(frame, joint, J)).transpose();
    };
    const Vec3 v_left = (at(lf, t + 1) - at(lf, t - 1)) * (0.5 * fps);
    const Vec3 v_right = (at(rf, t + 1) - at(rf, t - 1)) * (0.5 * fps);
    const Vec3 a_root = (at(root, t + 1) - 2.0 * at(root, t) + at(root, t - 1)) * (fps * fps);
    sum += v_left.head<2>().norm() * v_right.head<2>().norm() * a_root.norm();
  }
  return 100.0 * sum / static_cast<double>(frames - 2);
}

double sphere_overlap_volume(const Vec3& c1, double r1, const Vec3& c2, double r2) {
  const double d = (c1 - c2).norm();
  if (d >= r1 + r2) {
    return 0.0;
  }
  if (d <= std::abs(r1 - r2)) {
    const double r = std::min(r1, r2);
    return 4.0 / 3.0 * M_PI * r * r * r;
  }
  const double rsum = r1 + r2;
  const double rdiff = r1 - r2;
  return M_PI * (rsum - d) * (rsum - d) *
         (d * d + 2.0 * d * rsum - 3.0 * rdiff * rdiff) / (12.0 * d);
}

double interpenetration(const InteractionClip& clip, const SphereBody& sb) {
  clip.validate();
  const int N = static_cast<int>(clip.persons.size());
  if (N < 2) {
    throw SinglePerson("interpenetration: needs at least two persons");
  }
  const int T = clip.frames();
  std::vector<std::vector<std::vector<SphereState>>> centers;
  centers.reserve(N);
  for (const auto& person : clip.persons) {
    centers.push_back(sphere_centers(person.p, T, sb));
  }
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < N; ++a) {
      for (int b = a + 1; b < N; ++b) {
        for (const auto& sa : centers[a][t]) {
          for (const auto& sb2 : centers[b][t]) {
            total += sphere_overlap_volume(sa.center, sa.radius, sb2.center, sb2.radius);
          }
        }
      }
    }
  }
  return 1e6 * total / static_cast<double>(T);  // m^3 -> cm^3, mean over frames
}

namespace {

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

Gaussian fit_gaussian(const Eigen::MatrixXd& samples, double regularization) {
  const Eigen::Index n = samples.rows();
  Gaussian g;
  g.mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - g.mean.transpose();
  const double denom = (n > 1) ? static_cast<double>(n - 1) : 1.0;
  g.cov = centered.transpose() * centered / denom;
  if (regularization > 0.0) {
    g.cov.diagonal().array() += regularization;
  }
  return g;
}

/// sqrt of a symmetric PSD matrix via eigendecomposition; eigenvalues in
/// [-tol, 0) clamp to zero, anything below -tol reports failure.
bool psd_sqrt(const Eigen::MatrixXd& m, double tol, Eigen::MatrixXd* out) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) return false;
  Eigen::VectorXd evals = es.eigenvalues();
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] < -tol) return false;
    evals[i] = std::sqrt(std::max(0.0, evals[i]));
  }
  *out = es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
  return true;
}

bool frechet_attempt(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                     double regularization, double* result) {
  constexpr double kEigTol = 1e-8;
  const Gaussian ga = fit_gaussian(a, regularization);
  const Gaussian gb = fit_gaussian(b, regularization);
  Eigen::MatrixXd sqrt_a;
  if (!psd_sqrt(ga.cov, kEigTol, &sqrt_a)) return false;
  const Eigen::MatrixXd inner = sqrt_a * gb.cov * sqrt_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner);
  if (es.info() != Eigen::Success) return false;
  double trace_sqrt = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev < -kEigTol) return false;
    trace_sqrt += std::sqrt(std::max(0.0, ev));
  }
  const double mean_term = (ga.mean - gb.mean).squaredNorm();
  *result = mean_term + ga.cov.trace() + gb.cov.trace() - 2.0 * trace_sqrt;
  return std::isfinite(*result);
}

}  // namespace

double frechet_gaussian_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) {
    throw ShapeMismatch("frechet distance: feature dimensions disagree");
  }
  if (a.rows() < 2 || b.rows() < 2) {
    throw RankDeficient("frechet distance: need at least two samples per set");
  }
  constexpr double kRegularization = 1e-10;
  // Thin sets cannot have full-rank covariance; regularize up front.
  const bool thin = a.rows() <= a.cols() || b.rows() <= b.cols();
  double result = 0.0;
  if (!thin && frechet_attempt(a, b, 0.0, &result)) {
    return result;
  }
  if (frechet_attempt(a, b, kRegularization, &result)) {
    return result;
  }
  throw RankDeficient("frechet distance: covariance degenerate even after regularization");
}

Eigen::MatrixXd position_features(const PointMatrix& positions, int frames,
                                  bool root_centered, int root_index) {
  if (frames < 1 || positions.rows() % frames != 0) {
    throw ShapeMismatch("position_features: rows not divisible by frames");
  }
  const Eigen::Index J = positions.rows() / frames;
  Eigen::MatrixXd features(frames, 3 * J);
  for (int t = 0; t < frames; ++t) {
    const Vec3 origin = root_centered
                            ? Vec3(positions.row(static_cast<Eigen::Index>(t) * J + root_index))
                            : Vec3::Zero();
    for (Eigen::Index j = 0; j < J; ++j) {
      const Vec3 p = positions.row(static_cast<Eigen::Index>(t) * J + j);
      features.block<1, 3>(t, 3 * j) = (p - origin).transpose();
    }
  }
  return features;
}

double fid_star(const Eigen::MatrixXd& features_a, const Eigen::MatrixXd& features_b) {
  return frechet_gaussian_distance(features_a, features_b);
}

MetricsReport evaluate_clip(const InteractionClip& clip, const Skeleton& s,
                            const BodyModel& body, const GroundPlane& g, double fps,
                            bool with_mpjpe, double contact_eps) {
  clip.validate();
  const int N = static_cast<int>(clip.persons.size());
  const int T = clip.frames();
  const double rate = fps > 0.0 ? fps : clip.fps();

  MetricsReport report;
  report.frames = T;
  report.persons = N;
  report.clips = 1;

  double mpjpe_sum = 0.0;
  for (const auto& person : clip.persons) {
    const GroundContact gc = ground_contact_metrics(person.p, T, body.spheres, g);
    report.penetration_mm += gc.penetration_mm;
    report.float_mm += gc.float_mm;
    report.skate_cm_s += skate(person.p, T, body.spheres, g, rate, contact_eps);
    report.pfc += pfc(person.p, T, s, rate);
    if (with_mpjpe) {
      mpjpe_sum += pos_rot_mpjpe(person, s);
    }
  }
  report.penetration_mm /= N;
  report.float_mm /= N;
  report.foot_contact_mm = report.penetration_mm + report.float_mm;
  report.skate_cm_s /= N;
  report.pfc /= N;
  if (with_mpjpe) {
    report.mpjpe_mm = mpjpe_sum / N;
  }
  if (N >= 2) {
    report.interpenetration_cm3 = interpenetration(clip, body.spheres);
  }
  return report;
}

}  // namespace physimetrics
