// Python bindings for the core operations: kinematics, representation,
// body model, losses, metrics, and motion-file IO.
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "physimetrics/bodymodel.hpp"
#include "physimetrics/errors.hpp"
#include "physimetrics/evaluate.hpp"
#include "physimetrics/ik.hpp"
#include "physimetrics/losses.hpp"
#include "physimetrics/metrics.hpp"
#include "physimetrics/motion_file.hpp"
#include "physimetrics/representation.hpp"
#include "physimetrics/synth.hpp"

namespace py = pybind11;
using namespace physimetrics;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointMatrix points_from_array(const DoubleArray& arr, int* frames_out = nullptr) {
  if (arr.ndim() == 3) {
    if (arr.shape(2) != 3) throw ShapeMismatch("expected trailing dimension 3");
    const int T = static_cast<int>(arr.shape(0));
    const int J = static_cast<int>(arr.shape(1));
    PointMatrix p(static_cast<Eigen::Index>(T) * J, 3);
    std::memcpy(p.data(), arr.data(), sizeof(double) * p.size());
    if (frames_out) *frames_out = T;
    return p;
  }
  if (arr.ndim() == 2) {
    if (arr.shape(1) != 3) throw ShapeMismatch("expected trailing dimension 3");
    PointMatrix p(arr.shape(0), 3);
    std::memcpy(p.data(), arr.data(), sizeof(double) * p.size());
    if (frames_out) *frames_out = static_cast<int>(arr.shape(0));
    return p;
  }
  throw ShapeMismatch("expected a (T, J, 3) or (N, 3) array");
}

py::array_t<double> array_from_points(const PointMatrix& p, int frames) {
  const int J = frames > 0 ? static_cast<int>(p.rows()) / frames : 0;
  py::array_t<double> out({frames, J, 3});
  std::memcpy(out.mutable_data(), p.data(), sizeof(double) * p.size());
  return out;
}

Rot6Matrix rot6_from_array(const DoubleArray& arr) {
  if (arr.ndim() != 3 || arr.shape(2) != 6) {
    throw ShapeMismatch("expected a (T, J, 6) array of 6D rotations");
  }
  Rot6Matrix r(static_cast<Eigen::Index>(arr.shape(0)) * arr.shape(1), 6);
  std::memcpy(r.data(), arr.data(), sizeof(double) * r.size());
  return r;
}

py::array_t<double> array_from_rot6(const Rot6Matrix& r, int frames) {
  const int J = frames > 0 ? static_cast<int>(r.rows()) / frames : 0;
  py::array_t<double> out({frames, J, 6});
  std::memcpy(out.mutable_data(), r.data(), sizeof(double) * r.size());
  return out;
}

TranslationMatrix translations_from_array(const DoubleArray& arr) {
  if (arr.ndim() != 2 || arr.shape(1) != 3) {
    throw ShapeMismatch("expected a (T, 3) root translation array");
  }
  TranslationMatrix t(arr.shape(0), 3);
  std::memcpy(t.data(), arr.data(), sizeof(double) * t.size());
  return t;
}

PoseSequence pose_from_arrays(const Skeleton& s, const DoubleArray& root,
                              const DoubleArray& rot6d, double fps) {
  PoseSequence pose;
  pose.root_translation = translations_from_array(root);
  pose.local_rotation = rot6_from_array(rot6d);
  pose.joints = s.joint_count();
  pose.fps = fps;
  if (pose.local_rotation.rows() !=
      static_cast<Eigen::Index>(pose.frames()) * pose.joints) {
    throw ShapeMismatch("rotation array frames/joints disagree with the skeleton");
  }
  return pose;
}

py::dict report_to_dict(const MetricsReport& r) {
  py::dict d;
  d["penetration_mm"] = r.penetration_mm;
  d["float_mm"] = r.float_mm;
  d["foot_contact_mm"] = r.foot_contact_mm;
  d["skate_cm_s"] = r.skate_cm_s;
  d["pfc"] = r.pfc;
  d["interpenetration_cm3"] =
      r.interpenetration_cm3 ? py::cast(*r.interpenetration_cm3) : py::none();
  d["mpjpe_mm"] = r.mpjpe_mm ? py::cast(*r.mpjpe_mm) : py::none();
  d["fid_star"] = r.fid_star ? py::cast(*r.fid_star) : py::none();
  py::dict counts;
  counts["frames"] = r.frames;
  counts["persons"] = r.persons;
  counts["clips"] = r.clips;
  d["counts"] = counts;
  return d;
}

InteractionClip clip_from_reps(const std::vector<MotionRep>& persons) {
  InteractionClip clip;
  clip.persons = persons;
  clip.validate();
  return clip;
}

LossConfig loss_config(const std::string& mc_mode, double contact, double range,
                       double foot_height, bool mi_mask_on_gt) {
  LossConfig cfg;
  cfg.mc_mode = mc_mode == "internal" ? McMode::kInternal : McMode::kGtAnchored;
  cfg.mi_contact_threshold = contact;
  cfg.mi_range_threshold = range;
  cfg.foot_height_threshold = foot_height;
  cfg.mi_mask_on_gt = mi_mask_on_gt;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_physimetrics, m) {
  m.doc() = "Motion representation, kinematics, losses, and physical-plausibility metrics";

  py::register_exception<DegenerateRotation>(m, "DegenerateRotationError", PyExc_ValueError);
  py::register_exception<NotARotation>(m, "NotARotationError", PyExc_ValueError);
  py::register_exception<ShapeMismatch>(m, "ShapeMismatchError", PyExc_ValueError);
  py::register_exception<TooShort>(m, "TooShortError", PyExc_ValueError);
  py::register_exception<NonFinite>(m, "NonFiniteError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "MotionParseError", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolationError", PyExc_ValueError);
  py::register_exception<RankDeficient>(m, "RankDeficientError", PyExc_ValueError);
  py::register_exception<SinglePerson>(m, "SinglePersonError", PyExc_ValueError);

  py::class_<Skeleton>(m, "Skeleton")
      .def_static("default", [] { return Skeleton::default22(); })
      .def_static("load", &Skeleton::load, py::arg("path"))
      .def_property_readonly("joint_count", &Skeleton::joint_count)
      .def_property_readonly("joint_names", &Skeleton::joint_names)
      .def_property_readonly("root_index", &Skeleton::root_index)
      .def_property_readonly("left_foot_index", &Skeleton::left_foot_index)
      .def_property_readonly("right_foot_index", &Skeleton::right_foot_index)
      .def("parent", &Skeleton::parent, py::arg("joint"))
      .def("rest_offset", &Skeleton::rest_offset, py::arg("joint"))
      .def("find_joint", &Skeleton::find_joint, py::arg("name"));

  py::class_<BodyModel>(m, "BodyModel")
      .def_property_readonly("marker_count",
                             [](const BodyModel& b) { return b.markers.marker_count(); })
      .def_property_readonly("sphere_count",
                             [](const BodyModel& b) { return b.spheres.sphere_count(); })
      .def_property_readonly("marker_names",
                             [](const BodyModel& b) { return b.markers.marker_names; })
      .def_property_readonly("marker_weights",
                             [](const BodyModel& b) { return b.markers.weights; });

  m.def("default_body", [] { return default_body(); });
  m.def("load_body_config", &load_body_config, py::arg("path"), py::arg("skeleton"));

  py::class_<MotionRep>(m, "MotionRep")
      .def(py::init([](DoubleArray p, DoubleArray v, DoubleArray r, double fps) {
             int frames = 0;
             MotionRep rep;
             rep.p = points_from_array(p, &frames);
             rep.v = points_from_array(v);
             rep.r = rot6_from_array(r);
             rep.fps = fps;
             rep.joints = frames > 0 ? static_cast<int>(rep.p.rows()) / frames : 0;
             if (rep.v.rows() != rep.p.rows() || rep.r.rows() != rep.p.rows()) {
               throw ShapeMismatch("p, v, r disagree on frames or joints");
             }
             return rep;
           }),
           py::arg("p"), py::arg("v"), py::arg("r"), py::arg("fps") = 20.0)
      .def_property_readonly(
          "p", [](const MotionRep& rep) { return array_from_points(rep.p, rep.frames()); })
      .def_property_readonly(
          "v", [](const MotionRep& rep) { return array_from_points(rep.v, rep.frames()); })
      .def_property_readonly(
          "r", [](const MotionRep& rep) { return array_from_rot6(rep.r, rep.frames()); })
      .def_property_readonly("fps", [](const MotionRep& rep) { return rep.fps; })
      .def_property_readonly("frames", &MotionRep::frames)
      .def_property_readonly("joints", [](const MotionRep& rep) { return rep.joints; })
      .def_property_readonly("frame_width", &MotionRep::frame_width);

  m.def(
      "rot6d_to_matrix",
      [](const Vec3& a, const Vec3& b) { return Mat3(rot6d_to_matrix({a, b})); },
      py::arg("a"), py::arg("b"));
  m.def("matrix_to_rot6d", [](const Mat3& mat) {
    const Rotation6D r = matrix_to_rot6d(mat);
    return py::make_tuple(Vec3(r.a), Vec3(r.b));
  });

  m.def(
      "forward_kinematics",
      [](const Skeleton& s, DoubleArray root, DoubleArray rot6d, double fps) {
        const PoseSequence pose = pose_from_arrays(s, root, rot6d, fps);
        return array_from_points(forward_kinematics(s, pose), pose.frames());
      },
      py::arg("skeleton"), py::arg("root_translation"), py::arg("rot6d"),
      py::arg("fps") = 20.0);

  m.def(
      "bone_lengths",
      [](const Skeleton& s, DoubleArray positions) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        return Eigen::MatrixXd(bone_lengths(s, p, frames));
      },
      py::arg("skeleton"), py::arg("positions"));

  m.def(
      "ik_fit",
      [](const Skeleton& s, DoubleArray targets, double fps, int max_iterations,
         double damping, double tolerance, bool warm_start) {
        int frames = 0;
        const PointMatrix t = points_from_array(targets, &frames);
        IkConfig config;
        config.max_iterations = max_iterations;
        config.damping = damping;
        config.tolerance = tolerance;
        config.warm_start = warm_start;
        const IkResult result = ik_fit(s, t, frames, fps, config);
        py::dict out;
        out["root_translation"] = Eigen::MatrixXd(result.pose.root_translation);
        out["rot6d"] = array_from_rot6(result.pose.local_rotation, frames);
        out["residual_rms"] = Eigen::VectorXd(result.residual_rms);
        return out;
      },
      py::arg("skeleton"), py::arg("targets"), py::arg("fps") = 20.0,
      py::arg("max_iterations") = 200, py::arg("damping") = 1e-4,
      py::arg("tolerance") = 1e-7, py::arg("warm_start") = true);

  m.def(
      "compute_velocity",
      [](DoubleArray positions) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        return array_from_points(compute_velocity(p, frames), frames);
      },
      py::arg("positions"));

  m.def(
      "rep_from_motion",
      [](const Skeleton& s, DoubleArray root, DoubleArray rot6d, double fps) {
        return rep_from_motion(s, pose_from_arrays(s, root, rot6d, fps));
      },
      py::arg("skeleton"), py::arg("root_translation"), py::arg("rot6d"),
      py::arg("fps") = 20.0);

  m.def("pos_rot_mpjpe", &pos_rot_mpjpe, py::arg("rep"), py::arg("skeleton"));

  m.def(
      "validate_rep",
      [](const MotionRep& rep, const Skeleton& s, double velocity_residual, double mpjpe_mm,
         double bone_deviation) {
        ValidateTolerances tol{velocity_residual, mpjpe_mm, bone_deviation};
        py::list out;
        for (const auto& v : validate_rep(rep, s, tol)) {
          py::dict d;
          d["component"] = v.component;
          d["kind"] = v.kind;
          d["message"] = v.message;
          d["value"] = v.value;
          out.append(d);
        }
        return out;
      },
      py::arg("rep"), py::arg("skeleton"), py::arg("velocity_residual") = 1e-8,
      py::arg("mpjpe_mm") = 50.0, py::arg("bone_deviation") = 1e-3);

  // Losses.
  m.def("simple_loss", &simple_loss, py::arg("pred"), py::arg("gt"));
  m.def(
      "mc_loss",
      [](const MotionRep& pred, const MotionRep& gt, const Skeleton& s,
         const std::string& mode) {
        return mc_loss(pred, gt, s, loss_config(mode, 0.1, 1.0, 0.05, false));
      },
      py::arg("pred"), py::arg("gt"), py::arg("skeleton"), py::arg("mode") = "gt_anchored");
  m.def(
      "mi_loss",
      [](DoubleArray pred_a, DoubleArray pred_b, DoubleArray gt_a, DoubleArray gt_b,
         double contact_threshold, double range_threshold, bool mask_on_gt) {
        int frames = 0;
        const PointMatrix pa = points_from_array(pred_a, &frames);
        const PointMatrix pb = points_from_array(pred_b);
        const PointMatrix ga = points_from_array(gt_a);
        const PointMatrix gb = points_from_array(gt_b);
        return mi_loss(pa, pb, ga, gb, frames,
                       loss_config("gt_anchored", contact_threshold, range_threshold, 0.05,
                                   mask_on_gt));
      },
      py::arg("pred_a"), py::arg("pred_b"), py::arg("gt_a"), py::arg("gt_b"),
      py::arg("contact_threshold") = 0.1, py::arg("range_threshold") = 1.0,
      py::arg("mask_on_gt") = false);
  m.def("velocity_loss", &velocity_loss, py::arg("pred"), py::arg("gt"));
  m.def(
      "foot_contact_loss",
      [](const MotionRep& pred, const MotionRep& gt, const Skeleton& s, double threshold) {
        return foot_contact_loss(pred, gt, s,
                                 loss_config("gt_anchored", 0.1, 1.0, threshold, false));
      },
      py::arg("pred"), py::arg("gt"), py::arg("skeleton"),
      py::arg("foot_height_threshold") = 0.05);
  m.def(
      "bone_length_loss",
      [](DoubleArray pred_p, DoubleArray gt_p, const Skeleton& s) {
        int frames = 0;
        const PointMatrix p = points_from_array(pred_p, &frames);
        const PointMatrix g = points_from_array(gt_p);
        return bone_length_loss(p, g, frames, s);
      },
      py::arg("pred_p"), py::arg("gt_p"), py::arg("skeleton"));
  m.def(
      "relative_orientation_loss",
      [](const std::vector<MotionRep>& pred, const std::vector<MotionRep>& gt,
         const Skeleton& s) {
        return relative_orientation_loss(clip_from_reps(pred), clip_from_reps(gt), s);
      },
      py::arg("pred"), py::arg("gt"), py::arg("skeleton"));

  // Body model.
  m.def(
      "regress_markers",
      [](DoubleArray positions, const BodyModel& body) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        return array_from_points(regress_markers(p, frames, body.markers), frames);
      },
      py::arg("positions"), py::arg("body"));
  m.def(
      "sphere_centers",
      [](DoubleArray positions, const BodyModel& body) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        const auto centers = sphere_centers(p, frames, body.spheres);
        const int S = body.spheres.sphere_count();
        py::array_t<double> c({frames, S, 3});
        py::array_t<double> radii(S);
        auto cm = c.mutable_unchecked<3>();
        auto rm = radii.mutable_unchecked<1>();
        for (int t = 0; t < frames; ++t) {
          for (int k = 0; k < S; ++k) {
            for (int d = 0; d < 3; ++d) cm(t, k, d) = centers[t][k].center[d];
            if (t == 0) rm(k) = centers[t][k].radius;
          }
        }
        return py::make_tuple(c, radii);
      },
      py::arg("positions"), py::arg("body"));

  // Metrics.
  m.def(
      "ground_contact_metrics",
      [](DoubleArray positions, const BodyModel& body, double ground_height) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        const GroundContact gc =
            ground_contact_metrics(p, frames, body.spheres, {ground_height});
        py::dict d;
        d["penetration_mm"] = gc.penetration_mm;
        d["float_mm"] = gc.float_mm;
        d["foot_contact_mm"] = gc.foot_contact_mm;
        return d;
      },
      py::arg("positions"), py::arg("body"), py::arg("ground_height") = 0.0);
  m.def(
      "skate",
      [](DoubleArray positions, const BodyModel& body, double fps, double ground_height,
         double contact_eps) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        return skate(p, frames, body.spheres, {ground_height}, fps, contact_eps);
      },
      py::arg("positions"), py::arg("body"), py::arg("fps") = 20.0,
      py::arg("ground_height") = 0.0, py::arg("contact_eps") = 0.005);
  m.def(
      "pfc",
      [](DoubleArray positions, const Skeleton& s, double fps) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        return pfc(p, frames, s, fps);
      },
      py::arg("positions"), py::arg("skeleton"), py::arg("fps") = 20.0);
  m.def("sphere_overlap_volume", &sphere_overlap_volume, py::arg("c1"), py::arg("r1"),
        py::arg("c2"), py::arg("r2"));
  m.def(
      "interpenetration",
      [](const std::vector<MotionRep>& persons, const BodyModel& body) {
        return interpenetration(clip_from_reps(persons), body.spheres);
      },
      py::arg("persons"), py::arg("body"));
  m.def("fid_star", &fid_star, py::arg("features_a"), py::arg("features_b"));
  m.def(
      "position_features",
      [](DoubleArray positions, bool root_centered, int root_index) {
        int frames = 0;
        const PointMatrix p = points_from_array(positions, &frames);
        return Eigen::MatrixXd(position_features(p, frames, root_centered, root_index));
      },
      py::arg("positions"), py::arg("root_centered") = false, py::arg("root_index") = 0);
  m.def(
      "evaluate_clip",
      [](const std::vector<MotionRep>& persons, const Skeleton& s, const BodyModel& body,
         double ground_height, double fps, bool with_mpjpe, double contact_eps) {
        const MetricsReport r = evaluate_clip(clip_from_reps(persons), s, body,
                                              {ground_height}, fps, with_mpjpe, contact_eps);
        return report_to_dict(r);
      },
      py::arg("persons"), py::arg("skeleton"), py::arg("body"),
      py::arg("ground_height") = 0.0, py::arg("fps") = 0.0, py::arg("with_mpjpe") = true,
      py::arg("contact_eps") = 0.005);

  // Motion files and synthetic clips.
  m.def(
      "read_motion_file",
      [](const std::string& path) {
        const MotionFile f = read_motion_file(path);
        py::dict d;
        d["version"] = f.version;
        d["kind"] = f.kind == PayloadKind::kPositions ? "positions"
                    : f.kind == PayloadKind::kRep     ? "rep"
                                                      : "markers";
        d["joints"] = f.joints;
        d["frames"] = f.frames;
        d["persons"] = f.persons;
        d["fps"] = f.fps;
        d["up_axis"] = std::string(1, f.up_axis);
        d["text"] = f.text ? py::cast(*f.text) : py::none();
        if (f.kind == PayloadKind::kRep) {
          const InteractionClip clip = clip_from_motion_file(f);
          py::list reps;
          for (const auto& person : clip.persons) reps.append(person);
          d["persons_rep"] = reps;
        } else {
          const auto persons = positions_from_motion_file(f);
          py::list arr;
          for (const auto& p : persons) arr.append(array_from_points(p, f.frames));
          d["positions"] = arr;
        }
        return d;
      },
      py::arg("path"));
  m.def(
      "write_positions_file",
      [](const std::string& path, const std::vector<DoubleArray>& persons, double fps) {
        std::vector<PointMatrix> people;
        int frames = 0;
        int joints = 0;
        for (const auto& arr : persons) {
          people.push_back(points_from_array(arr, &frames));
          joints = static_cast<int>(people.back().rows()) / frames;
        }
        write_motion_file(path, motion_file_from_positions(people, frames, fps, joints));
      },
      py::arg("path"), py::arg("persons"), py::arg("fps") = 20.0);
  m.def(
      "write_rep_file",
      [](const std::string& path, const std::vector<MotionRep>& persons,
         const std::optional<std::string>& text) {
        InteractionClip clip = clip_from_reps(persons);
        clip.text = text;
        write_motion_file(path, motion_file_from_clip(clip));
      },
      py::arg("path"), py::arg("persons"), py::arg("text") = py::none());
  m.def(
      "synth_clip",
      [](const std::string& kind, int frames, double fps, double speed, double gap,
         double offset_z) {
        SynthParams params{frames, fps, speed, gap, offset_z};
        const MotionFile f =
            synth_clip(kind, params, Skeleton::default22(), default_body().spheres);
        const auto persons = positions_from_motion_file(f);
        py::list out;
        for (const auto& p : persons) out.append(array_from_points(p, f.frames));
        return out;
      },
      py::arg("kind"), py::arg("frames") = 10, py::arg("fps") = 20.0,
      py::arg("speed") = 0.012, py::arg("gap") = 0.5, py::arg("offset_z") = 0.0);
  m.def(
      "ground_rest_height",
      [](const Skeleton& s, const BodyModel& body) {
        return ground_rest_height(s, body.spheres);
      },
      py::arg("skeleton"), py::arg("body"));
}
