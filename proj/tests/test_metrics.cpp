#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "physimetrics/errors.hpp"
#include "physimetrics/metrics.hpp"
#include "physimetrics/synth.hpp"
#include "test_helpers.hpp"

using namespace physimetrics;

namespace {

/// One-sphere "body" on a two-joint stick, for hand-countable setups.
SphereBody unit_sphere_body(double radius) {
  SphereBody sb;
  sb.spheres = {{0, 0, 0.0, radius}};
  return sb;
}

/// Positions for a single joint over T frames.
PointMatrix single_track(const std::vector<Vec3>& points) {
  PointMatrix p(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t t = 0; t < points.size(); ++t) {
    p.row(static_cast<Eigen::Index>(t)) = points[t].transpose();
  }
  return p;
}

/// Monte Carlo overlap oracle: sample inside the smaller sphere's bounding
/// box, accept points inside both spheres.
double mc_overlap(const Vec3& c1, double r1, const Vec3& c2, double r2, int samples,
                  std::mt19937& rng) {
  const bool first_smaller = r1 <= r2;
  const Vec3 cs = first_smaller ? c1 : c2;
  const double rs = first_smaller ? r1 : r2;
  const Vec3 co = first_smaller ? c2 : c1;
  const double ro = first_smaller ? r2 : r1;
  std::uniform_real_distribution<double> u(-rs, rs);
  long hits = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec3 q = cs + Vec3(u(rng), u(rng), u(rng));
    if ((q - cs).squaredNorm() <= rs * rs && (q - co).squaredNorm() <= ro * ro) {
      ++hits;
    }
  }
  const double box = 8.0 * rs * rs * rs;
  return box * static_cast<double>(hits) / samples;
}

}  // namespace

TEST_CASE("ground contact on a body resting exactly on the plane") {
  // Sphere of radius 0.3 with its center at z = 0.3: surface touches z = 0.
  const SphereBody sb = unit_sphere_body(0.3);
  const PointMatrix p = single_track({Vec3(0, 0, 0.3), Vec3(1, 2, 0.3), Vec3(-1, 0, 0.3)});
  const GroundContact gc = ground_contact_metrics(p, 3, sb, {});
  CHECK(gc.penetration_mm == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gc.float_mm == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gc.foot_contact_mm == 0.0);
}

TEST_CASE("ground contact under rigid vertical offsets") {
  const SphereBody sb = unit_sphere_body(0.3);
  auto track_at = [&](double z) {
    return single_track({Vec3(0, 0, z), Vec3(0, 0, z), Vec3(0, 0, z), Vec3(0, 0, z)});
  };
  const GroundContact lowered = ground_contact_metrics(track_at(0.3 - 0.010), 4, sb, {});
  CHECK(lowered.penetration_mm == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(lowered.float_mm == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(lowered.foot_contact_mm == doctest::Approx(10.0).epsilon(1e-9));

  const GroundContact raised = ground_contact_metrics(track_at(0.3 + 0.0087), 4, sb, {});
  CHECK(raised.penetration_mm == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(raised.float_mm == doctest::Approx(8.7).epsilon(1e-9));
  CHECK(raised.foot_contact_mm == doctest::Approx(8.7).epsilon(1e-9));
}

TEST_CASE("ground contact mixes per-frame max(0, .) before averaging") {
  // Two frames: z_min = -10 mm then +5 mm -> penetration 5, float 2.5.
  const SphereBody sb = unit_sphere_body(0.3);
  const PointMatrix p = single_track({Vec3(0, 0, 0.29), Vec3(0, 0, 0.305)});
  const GroundContact gc = ground_contact_metrics(p, 2, sb, {});
  CHECK(gc.penetration_mm == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(gc.float_mm == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(gc.foot_contact_mm == doctest::Approx(7.5).epsilon(1e-9));
  CHECK(gc.foot_contact_mm == gc.penetration_mm + gc.float_mm);  // exact identity
}

TEST_CASE("foot contact identity holds on random motions") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();
  std::mt19937 rng(163);
  const PoseSequence pose = pmtest::random_pose(s, 8, 0.8, rng);
  const PointMatrix p = forward_kinematics(s, pose);
  const GroundContact gc = ground_contact_metrics(p, 8, body.spheres, {});
  CHECK(std::abs(gc.foot_contact_mm - (gc.penetration_mm + gc.float_mm)) < 1e-9);
}

TEST_CASE("skate on a stationary contact is zero") {
  const SphereBody sb = unit_sphere_body(0.3);
  const PointMatrix p = single_track({Vec3(0, 0, 0.3), Vec3(0, 0, 0.3), Vec3(0, 0, 0.3)});
  CHECK(skate(p, 3, sb, {}, 20.0) == 0.0);
}

TEST_CASE("skate of a contacting sphere sliding at 0.012 m/frame at 20 fps") {
  const SphereBody sb = unit_sphere_body(0.3);
  std::vector<Vec3> pts;
  for (int t = 0; t < 6; ++t) pts.emplace_back(0.012 * t, 0, 0.3);
  const PointMatrix p = single_track(pts);
  CHECK(skate(p, 6, sb, {}, 20.0) == doctest::Approx(24.0).epsilon(1e-9));
}

TEST_CASE("skate of an airborne motion is zero") {
  const SphereBody sb = unit_sphere_body(0.3);
  std::vector<Vec3> pts;
  for (int t = 0; t < 5; ++t) pts.emplace_back(0.05 * t, 0, 2.0);
  CHECK(skate(single_track(pts), 5, sb, {}, 20.0) == 0.0);
}

namespace {

/// Three-joint track (root + both feet) for PFC setups; other joints unused.
PointMatrix pfc_track(const Skeleton& s, int frames,
                      const std::function<Vec3(int)>& root,
                      const std::function<Vec3(int)>& left,
                      const std::function<Vec3(int)>& right) {
  const int J = s.joint_count();
  PointMatrix p = PointMatrix::Zero(static_cast<Eigen::Index>(frames) * J, 3);
  for (int t = 0; t < frames; ++t) {
    p.row(flat_index(t, s.root_index(), J)) = root(t).transpose();
    p.row(flat_index(t, s.left_foot_index(), J)) = left(t).transpose();
    p.row(flat_index(t, s.right_foot_index(), J)) = right(t).transpose();
  }
  return p;
}

}  // namespace

TEST_CASE("pfc vanishes with stationary feet or uniform root motion") {
  const Skeleton& s = Skeleton::default22();
  const double fps = 20.0;
  // Stationary feet, accelerating root.
  const PointMatrix a = pfc_track(
      s, 6, [&](int t) { return Vec3(0.5 * t * t / (fps * fps), 0, 1); },
      [](int) { return Vec3(0.1, 0.1, 0); }, [](int) { return Vec3(-0.1, 0.1, 0); });
  CHECK(pfc(a, 6, s, fps) == 0.0);

  // Moving feet, uniformly moving root (zero acceleration).
  const PointMatrix b = pfc_track(
      s, 6, [&](int t) { return Vec3(0.3 * t / fps, 0, 1); },
      [&](int t) { return Vec3(0.1 * t / fps, 0, 0); },
      [&](int t) { return Vec3(0, 0.2 * t / fps, 0); });
  CHECK(pfc(b, 6, s, fps) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pfc constant-speed constant-acceleration value") {
  // |v_l| = 0.1 m/s, |v_r| = 0.2 m/s, |a_root| = 1 m/s^2 -> 0.02 * 100 = 2.
  const Skeleton& s = Skeleton::default22();
  const double fps = 20.0;
  const PointMatrix p = pfc_track(
      s, 8, [&](int t) { return Vec3(0, 0, 0.5 * 1.0 * t * t / (fps * fps)); },
      [&](int t) { return Vec3(0.1 * t / fps, 0, 0); },
      [&](int t) { return Vec3(0, 0.2 * t / fps, 0); });
  CHECK(pfc(p, 8, s, fps) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sphere overlap closed-form cases") {
  CHECK(sphere_overlap_volume(Vec3(0, 0, 0), 1.0, Vec3(3, 0, 0), 1.0) == 0.0);
  CHECK(sphere_overlap_volume(Vec3(0, 0, 0), 1.0, Vec3(2, 0, 0), 1.0) == 0.0);
  CHECK(sphere_overlap_volume(Vec3(0, 0, 0), 1.0, Vec3(0, 0, 0), 1.0) ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
  // Containment with distinct radii: volume of the smaller sphere.
  CHECK(sphere_overlap_volume(Vec3(0, 0, 0), 2.0, Vec3(0.5, 0, 0), 0.5) ==
        doctest::Approx(4.0 * M_PI / 3.0 * 0.125).epsilon(1e-12));
  // Unit spheres one radius apart: the 5*pi/12 lens.
  CHECK(sphere_overlap_volume(Vec3(0, 0, 0), 1.0, Vec3(1, 0, 0), 1.0) ==
        doctest::Approx(5.0 * M_PI / 12.0).epsilon(1e-12));
}

TEST_CASE("sphere overlap is symmetric and continuous at the boundaries") {
  std::mt19937 rng(167);
  std::uniform_real_distribution<double> ur(0.3, 1.5);
  for (int i = 0; i < 50; ++i) {
    const double r1 = ur(rng), r2 = ur(rng);
    const Vec3 c1(ur(rng), ur(rng), ur(rng));
    const Vec3 c2(ur(rng), ur(rng), ur(rng));
    CHECK(sphere_overlap_volume(c1, r1, c2, r2) ==
          doctest::Approx(sphere_overlap_volume(c2, r2, c1, r1)).epsilon(1e-12));

    // Continuity at d = r1 + r2 and d = |r1 - r2|.
    for (double d0 : {r1 + r2, std::abs(r1 - r2)}) {
      const double lo = sphere_overlap_volume(Vec3::Zero(), r1, Vec3(d0 - 1e-10, 0, 0), r2);
      const double hi = sphere_overlap_volume(Vec3::Zero(), r1, Vec3(d0 + 1e-10, 0, 0), r2);
      CHECK(std::abs(hi - lo) < 1e-9);
    }
  }
}

TEST_CASE("sphere overlap matches the Monte Carlo oracle within 1%") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> ur(0.3, 1.2);
  // Keep the overlap fraction of the smaller sphere above ~10% so the MC
  // standard error stays well under the 1% assertion.
  std::uniform_real_distribution<double> ut(0.15, 0.65);
  const int samples = 1000000;
  for (int i = 0; i < 100; ++i) {
    const double r1 = ur(rng), r2 = ur(rng);
    const double d = ut(rng) * (r1 + r2);
    const Vec3 c1(0.2, -0.1, 0.4);
    const Vec3 c2 = c1 + d * Vec3(1, 2, 2).normalized();
    const double exact = sphere_overlap_volume(c1, r1, c2, r2);
    const double approx = mc_overlap(c1, r1, c2, r2, samples, rng);
    CHECK(std::abs(approx - exact) / exact < 0.01);
  }
}

TEST_CASE("interpenetration of two one-sphere bodies reduces to the lens volume") {
  // Unit spheres 1 m apart: 5*pi/12 m^3 = 1,308,996.94 cm^3.
  SphereBody sb;
  sb.spheres = {{0, 0, 0.0, 1.0}};
  InteractionClip clip;
  for (double x : {0.0, 1.0}) {
    MotionRep rep;
    rep.joints = 1;
    rep.fps = 20.0;
    rep.p = single_track({Vec3(x, 0, 0), Vec3(x, 0, 0)});
    rep.v = PointMatrix::Zero(2, 3);
    rep.r = Rot6Matrix::Zero(2, 6);
    clip.persons.push_back(rep);
  }
  CHECK(interpenetration(clip, sb) ==
        doctest::Approx(1e6 * 5.0 * M_PI / 12.0).epsilon(1e-12));
}

TEST_CASE("interpenetration enumerates all cross pairs") {
  // Two identical superposed bodies of 2 disjoint unit spheres: the 4 cross
  // pairs contribute 2 coincident overlaps (4pi/3 each) + 2 distant zeros.
  SphereBody sb;
  sb.spheres = {{0, 0, 0.0, 1.0}, {1, 1, 0.0, 1.0}};
  InteractionClip clip;
  for (int person = 0; person < 2; ++person) {
    MotionRep rep;
    rep.joints = 2;
    rep.fps = 20.0;
    rep.p.resize(2 * 2, 3);
    for (int t = 0; t < 2; ++t) {
      rep.p.row(flat_index(t, 0, 2)) = Eigen::RowVector3d(0, 0, 0);
      rep.p.row(flat_index(t, 1, 2)) = Eigen::RowVector3d(10, 0, 0);
    }
    rep.v = PointMatrix::Zero(4, 3);
    rep.r = Rot6Matrix::Zero(4, 6);
    clip.persons.push_back(rep);
  }
  CHECK(interpenetration(clip, sb) ==
        doctest::Approx(1e6 * 2.0 * 4.0 * M_PI / 3.0).epsilon(1e-12));
}

TEST_CASE("interpenetration of well-separated persons is zero and needs N >= 2") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();
  const PoseSequence pose = PoseSequence::rest(s, 2, 20.0, Vec3(0, 0, 1));
  InteractionClip clip;
  clip.persons.push_back(rep_from_motion(s, pose));
  CHECK_THROWS_AS(interpenetration(clip, body.spheres), SinglePerson);

  PoseSequence far = PoseSequence::rest(s, 2, 20.0, Vec3(10, 0, 1));
  clip.persons.push_back(rep_from_motion(s, far));
  CHECK(interpenetration(clip, body.spheres) == 0.0);
}

TEST_CASE("interpenetration is invariant to a shared rigid motion") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();
  std::mt19937 rng(173);
  InteractionClip clip;
  clip.persons.push_back(
      rep_from_motion(s, pmtest::random_pose(s, 3, 0.5, rng)));
  PoseSequence other = pmtest::random_pose(s, 3, 0.5, rng);
  other.root_translation.col(0).array() += 0.15;  // partial overlap
  clip.persons.push_back(rep_from_motion(s, other));
  const double base = interpenetration(clip, body.spheres);
  CHECK(base > 0.0);

  const Mat3 rot = pmtest::random_rotation(rng);
  const Vec3 trans(1.5, -2.0, 0.7);
  InteractionClip moved = clip;
  for (auto& person : moved.persons) {
    person = pmtest::apply_rigid(person, s, rot, trans);
  }
  CHECK(interpenetration(moved, body.spheres) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("fid_star identity, symmetry, and translation cases") {
  std::mt19937 rng(179);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(200, 66);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);

  CHECK(fid_star(a, a) < 1e-6);

  Eigen::MatrixXd b = a;
  b.array() += 0.1;  // translate every coordinate by +0.1
  const double translated = fid_star(a, b);
  CHECK(translated == doctest::Approx(0.66).epsilon(1e-9));
  CHECK(std::abs(fid_star(a, b) - fid_star(b, a)) < 1e-6);
}

TEST_CASE("fid_star 1-D closed form") {
  // Standardize a sample to exactly (mean 0, sd 1), then shift a copy by 1:
  // the Gaussian Frechet distance is (delta mu)^2 + (sd_a - sd_b)^2 = 1.
  std::mt19937 rng(181);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(500, 1);
  for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, 0) = n(rng);
  const double mean = a.col(0).mean();
  a.col(0).array() -= mean;
  const double sd = std::sqrt(a.col(0).squaredNorm() / (a.rows() - 1));
  a.col(0) /= sd;

  Eigen::MatrixXd b = a;
  b.array() += 1.0;
  CHECK(frechet_gaussian_distance(a, b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fid_star regularizes thin sets instead of failing") {
  // 10 samples of 66-dim features: rank-deficient covariance.
  std::mt19937 rng(191);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(10, 66);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  Eigen::MatrixXd b = a;
  b.array() += 0.1;
  const double v = fid_star(a, b);
  CHECK(std::isfinite(v));
  // Clamped near-zero eigenvalues enter the trace as sqrt of their noise, so
  // rank-deficient sets only reach ~1e-5 of the exact value.
  CHECK(v == doctest::Approx(0.66).epsilon(1e-4));
}

TEST_CASE("evaluate_clip composes the per-metric results") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();

  // Static rest pose resting on the ground.
  const double h = ground_rest_height(s, body.spheres);
  PoseSequence pose = PoseSequence::rest(s, 6, 20.0, Vec3(0, 0, h));
  InteractionClip clip;
  clip.persons.push_back(rep_from_motion(s, pose));
  const MetricsReport r = evaluate_clip(clip, s, body, {}, 0.0);
  CHECK(r.penetration_mm == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.float_mm == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.skate_cm_s == 0.0);
  CHECK(r.pfc == 0.0);
  CHECK(r.mpjpe_mm.has_value());
  CHECK(*r.mpjpe_mm < 1e-7);
  CHECK_FALSE(r.interpenetration_cm3.has_value());
  CHECK(r.frames == 6);
  CHECK(r.persons == 1);

  // Lowered by 10 mm: penetration exactly 10.
  PoseSequence lowered = pose;
  lowered.root_translation.col(2).array() -= 0.010;
  InteractionClip low_clip;
  low_clip.persons.push_back(rep_from_motion(s, lowered));
  const MetricsReport rl = evaluate_clip(low_clip, s, body, {}, 0.0);
  CHECK(rl.penetration_mm == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(rl.float_mm == doctest::Approx(0.0).epsilon(1e-9));

  // Two far-apart static persons: interpenetration present and zero.
  InteractionClip two = clip;
  PoseSequence far = PoseSequence::rest(s, 6, 20.0, Vec3(8, 0, h));
  two.persons.push_back(rep_from_motion(s, far));
  const MetricsReport r2 = evaluate_clip(two, s, body, {}, 0.0);
  REQUIRE(r2.interpenetration_cm3.has_value());
  CHECK(*r2.interpenetration_cm3 == 0.0);
  CHECK(r2.persons == 2);
}

TEST_CASE("ground metrics are invariant to horizontal translation and yaw") {
  const Skeleton& s = Skeleton::default22();
  const BodyModel& body = default_body();
  std::mt19937 rng(193);
  const PoseSequence pose = pmtest::random_pose(s, 5, 0.6, rng);
  const MotionRep rep = rep_from_motion(s, pose);
  const GroundContact base = ground_contact_metrics(rep.p, 5, body.spheres, {});
  const double base_skate = skate(rep.p, 5, body.spheres, {}, 20.0);

  const MotionRep moved =
      pmtest::apply_rigid(rep, s, pmtest::rot_z(0.77), Vec3(2.0, -3.0, 0.0));
  const GroundContact after = ground_contact_metrics(moved.p, 5, body.spheres, {});
  CHECK(after.penetration_mm == doctest::Approx(base.penetration_mm).epsilon(1e-9));
  CHECK(after.float_mm == doctest::Approx(base.float_mm).epsilon(1e-9));
  CHECK(skate(moved.p, 5, body.spheres, {}, 20.0) ==
        doctest::Approx(base_skate).epsilon(1e-9));

  // Vertical shifts move penetration/float predictably.
  MotionRep sunk = rep;
  sunk.p.col(2).array() -= 0.02;
  const GroundContact deeper = ground_contact_metrics(sunk.p, 5, body.spheres, {});
  CHECK(deeper.penetration_mm >= base.penetration_mm);
  CHECK(deeper.float_mm <= base.float_mm);
}
