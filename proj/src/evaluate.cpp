#include "physimetrics/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "physimetrics/errors.hpp"
#include "physimetrics/motion_file.hpp"

namespace physimetrics {

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.skeleton_path = j.value("skeleton", "");
  cfg.body_path = j.value("body", "");
  cfg.ground_height = j.value("ground_height", 0.0);
  cfg.contact_eps = j.value("contact_eps", 0.005);
  if (j.contains("fps_override") && !j["fps_override"].is_null()) {
    cfg.fps_override = j["fps_override"].get<double>();
  }
  cfg.format = j.value("format", "json");
  cfg.y_up_inputs = j.value("y_up_inputs", false);
  if (j.contains("loss")) {
    const auto& l = j["loss"];
    const std::string mode = l.value("mc_mode", "gt_anchored");
    cfg.loss.mc_mode = mode == "internal" ? McMode::kInternal : McMode::kGtAnchored;
    cfg.loss.mi_contact_threshold = l.value("mi_contact_threshold", 0.1);
    cfg.loss.mi_range_threshold = l.value("mi_range_threshold", 1.0);
    cfg.loss.foot_height_threshold = l.value("foot_height_threshold", 0.05);
    cfg.loss.mi_mask_on_gt = l.value("mi_mask_on_gt", false);
  }
  cfg.loss.validate();
  if (!(cfg.contact_eps > 0.0)) {
    throw InvariantViolation("run config: contact_eps must be positive");
  }
  if (cfg.format != "json" && cfg.format != "csv") {
    throw InvariantViolation("run config: format must be json or csv");
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("run config: cannot open " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  RunConfig cfg = from_json(j);
  if (!cfg.skeleton_path.empty()) {
    std::ifstream probe(cfg.skeleton_path);
    if (!probe) throw InvariantViolation("run config: skeleton file missing: " + cfg.skeleton_path);
  }
  if (!cfg.body_path.empty()) {
    std::ifstream probe(cfg.body_path);
    if (!probe) throw InvariantViolation("run config: body file missing: " + cfg.body_path);
  }
  return cfg;
}

const Skeleton& RunConfig::skeleton() const {
  if (skeleton_path.empty()) {
    return Skeleton::default22();
  }
  if (!skeleton_) {
    skeleton_ = Skeleton::load(skeleton_path);
  }
  return *skeleton_;
}

const BodyModel& RunConfig::body() const {
  if (body_path.empty()) {
    return default_body();
  }
  if (!body_) {
    body_ = load_body_config(body_path, skeleton());
  }
  return *body_;
}

int thread_cap_from_env() {
  if (const char* env = std::getenv("PHYSIMETRICS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

/// Builds the clip for metric evaluation from any supported payload.  For
/// position payloads the persons carry positions only (no usable rotations),
/// so MPJPE is skipped.
struct LoadedClip {
  InteractionClip clip;
  bool has_rotations = false;
};

LoadedClip load_clip(const std::string& path, const RunConfig& cfg) {
  const MotionFile f = read_motion_file(path);
  LoadedClip out;
  if (f.kind == PayloadKind::kRep) {
    out.clip = clip_from_motion_file(f);
    out.has_rotations = true;
  } else if (f.kind == PayloadKind::kPositions) {
    const auto persons = positions_from_motion_file(f, cfg.y_up_inputs);
    if (f.joints != MotionRep::kCanonicalJoints && f.joints != 24) {
      throw InvariantViolation(path + ": expected 22- or 24-joint positions, got " +
                               std::to_string(f.joints));
    }
    for (const auto& p : persons) {
      MotionRep rep;
      rep.joints = MotionRep::kCanonicalJoints;
      rep.fps = f.fps;
      if (f.joints == 24) {
        // Extra hand joints occupy the two highest indices; drop them.
        rep.p.resize(static_cast<Eigen::Index>(f.frames) * 22, 3);
        for (int t = 0; t < f.frames; ++t) {
          rep.p.middleRows(static_cast<Eigen::Index>(t) * 22, 22) =
              p.middleRows(static_cast<Eigen::Index>(t) * 24, 22);
        }
      } else {
        rep.p = p;
      }
      rep.v = compute_velocity(rep.p, f.frames);
      // Identity placeholder; has_rotations stays false so nothing decodes it.
      rep.r.resize(rep.p.rows(), 6);
      rep.r.rowwise() = rot6d_to_row(Rotation6D::identity());
      out.clip.persons.push_back(std::move(rep));
    }
  } else {
    throw InvariantViolation(path + ": marker payloads cannot be evaluated as clips");
  }
  if (cfg.fps_override) {
    for (auto& person : out.clip.persons) person.fps = *cfg.fps_override;
  }
  out.clip.validate();
  return out;
}

Eigen::MatrixXd pooled_position_features(const std::vector<std::string>& paths,
                                         const RunConfig& cfg) {
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index total = 0;
  for (const auto& path : paths) {
    const LoadedClip loaded = load_clip(path, cfg);
    for (const auto& person : loaded.clip.persons) {
      blocks.push_back(position_features(person.p, person.frames()));
      total += blocks.back().rows();
    }
  }
  if (blocks.empty()) {
    throw InvariantViolation("fid_star: no frames in input set");
  }
  Eigen::MatrixXd all(total, blocks.front().cols());
  Eigen::Index row = 0;
  for (const auto& b : blocks) {
    all.middleRows(row, b.rows()) = b;
    row += b.rows();
  }
  return all;
}

}  // namespace

EvalOutput evaluate_files(const std::vector<std::string>& inputs,
                          const std::vector<std::string>& ref_inputs, const RunConfig& cfg,
                          int threads) {
  if (inputs.empty()) {
    throw InvariantViolation("eval: no input files");
  }
  const Skeleton& skel = cfg.skeleton();
  const BodyModel& body = cfg.body();
  const GroundPlane ground{cfg.ground_height};

  const int n = static_cast<int>(inputs.size());
  if (threads <= 0) threads = thread_cap_from_env();
  threads = std::min(threads, n);

  EvalOutput out;
  out.per_clip.resize(n);
  std::vector<std::exception_ptr> errors(n);

  // Fan out per clip; slot-indexed results keep the reduction order fixed.
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        const LoadedClip loaded = load_clip(inputs[i], cfg);
        const double fps = cfg.fps_override.value_or(0.0);
        MetricsReport report =
            evaluate_clip(loaded.clip, skel, body, ground, fps, loaded.has_rotations,
                          cfg.contact_eps);
        out.per_clip[i] = {inputs[i], report};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  MetricsReport& agg = out.aggregate;
  agg.clips = n;
  double mpjpe_sum = 0.0;
  int mpjpe_count = 0;
  double inter_sum = 0.0;
  int inter_count = 0;
  for (const auto& entry : out.per_clip) {
    const MetricsReport& r = entry.report;
    agg.penetration_mm += r.penetration_mm;
    agg.float_mm += r.float_mm;
    agg.skate_cm_s += r.skate_cm_s;
    agg.pfc += r.pfc;
    agg.frames += r.frames;
    agg.persons = std::max(agg.persons, r.persons);
    if (r.mpjpe_mm) {
      mpjpe_sum += *r.mpjpe_mm;
      ++mpjpe_count;
    }
    if (r.interpenetration_cm3) {
      inter_sum += *r.interpenetration_cm3;
      ++inter_count;
    }
  }
  agg.penetration_mm /= n;
  agg.float_mm /= n;
  agg.foot_contact_mm = agg.penetration_mm + agg.float_mm;
  agg.skate_cm_s /= n;
  agg.pfc /= n;
  if (mpjpe_count > 0) agg.mpjpe_mm = mpjpe_sum / mpjpe_count;
  if (inter_count > 0) agg.interpenetration_cm3 = inter_sum / inter_count;

  if (!ref_inputs.empty()) {
    const Eigen::MatrixXd fa = pooled_position_features(inputs, cfg);
    const Eigen::MatrixXd fb = pooled_position_features(ref_inputs, cfg);
    agg.fid_star = fid_star(fa, fb);
  }
  return out;
}

nlohmann::json report_to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["penetration_mm"] = r.penetration_mm;
  j["float_mm"] = r.float_mm;
  j["foot_contact_mm"] = r.foot_contact_mm;
  j["skate_cm_s"] = r.skate_cm_s;
  j["pfc"] = r.pfc;
  if (r.interpenetration_cm3) {
    j["interpenetration_cm3"] = *r.interpenetration_cm3;
  }
  if (r.mpjpe_mm) {
    j["mpjpe_mm"] = *r.mpjpe_mm;
  }
  if (r.fid_star) {
    j["fid_star"] = *r.fid_star;
  }
  j["counts"] = {{"frames", r.frames}, {"persons", r.persons}, {"clips", r.clips}};
  return j;
}

std::string report_csv_header() {
  return "name,penetration_mm,float_mm,foot_contact_mm,skate_cm_s,pfc,"
         "interpenetration_cm3,mpjpe_mm,fid_star,frames,persons,clips";
}

namespace {
std::string opt_str(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}
}  // namespace

std::string report_csv_row(const std::string& name, const MetricsReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << name << ',' << r.penetration_mm << ',' << r.float_mm << ',' << r.foot_contact_mm
     << ',' << r.skate_cm_s << ',' << r.pfc << ',' << opt_str(r.interpenetration_cm3) << ','
     << opt_str(r.mpjpe_mm) << ',' << opt_str(r.fid_star) << ',' << r.frames << ','
     << r.persons << ',' << r.clips;
  return os.str();
}

std::string format_eval_output(const EvalOutput& out, const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    os << report_csv_header() << "\n";
    for (const auto& entry : out.per_clip) {
      os << report_csv_row(entry.path, entry.report) << "\n";
    }
    os << report_csv_row("aggregate", out.aggregate) << "\n";
    return os.str();
  }
  nlohmann::json j;
  j["clips"] = nlohmann::json::array();
  for (const auto& entry : out.per_clip) {
    nlohmann::json item = report_to_json(entry.report);
    item["name"] = entry.path;
    j["clips"].push_back(item);
  }
  j["aggregate"] = report_to_json(out.aggregate);
  return j.dump(2) + "\n";
}

}  // namespace physimetrics
