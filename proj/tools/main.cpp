// physimetrics: batch conversion, validation, and physical-plausibility
// scoring for motion clips.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "physimetrics/errors.hpp"
#include "physimetrics/evaluate.hpp"
#include "physimetrics/ik.hpp"
#include "physimetrics/motion_file.hpp"
#include "physimetrics/representation.hpp"
#include "physimetrics/synth.hpp"

namespace pm = physimetrics;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitViolations = 4;

struct CommonOpts {
  std::string config_path;
  std::string skeleton_path;
  std::string body_path;
  std::string format;
  bool y_up = false;
};

pm::RunConfig resolve_config(const CommonOpts& opts) {
  pm::RunConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = pm::RunConfig::load(opts.config_path);
  }
  if (!opts.skeleton_path.empty()) cfg.skeleton_path = opts.skeleton_path;
  if (!opts.body_path.empty()) cfg.body_path = opts.body_path;
  if (!opts.format.empty()) cfg.format = opts.format;
  if (opts.y_up) cfg.y_up_inputs = true;
  return cfg;
}

int run_eval(const std::vector<std::string>& inputs, const std::vector<std::string>& refs,
             const CommonOpts& opts, const std::string& out_dir) {
  const pm::RunConfig cfg = resolve_config(opts);
  const pm::EvalOutput out =
      pm::evaluate_files(inputs, refs, cfg, pm::thread_cap_from_env());
  if (out_dir.empty()) {
    std::cout << pm::format_eval_output(out, cfg.format);
    return kExitOk;
  }
  // One report file per clip plus the dataset aggregate.
  std::filesystem::create_directories(out_dir);
  const bool csv = cfg.format == "csv";
  const std::string ext = csv ? ".csv" : ".json";
  auto write_report = [&](const std::string& name, const std::string& label,
                          const pm::MetricsReport& report) {
    const std::string path = out_dir + "/" + name + ".report" + ext;
    std::ofstream f(path, std::ios::trunc);
    if (csv) {
      f << pm::report_csv_header() << "\n" << pm::report_csv_row(label, report) << "\n";
    } else {
      auto j = pm::report_to_json(report);
      j["name"] = label;
      f << j.dump(2) << "\n";
    }
    std::cout << "wrote " << path << "\n";
  };
  for (const auto& entry : out.per_clip) {
    write_report(std::filesystem::path(entry.path).stem().string(), entry.path,
                 entry.report);
  }
  write_report("aggregate", "aggregate", out.aggregate);
  return kExitOk;
}

int run_fit(const std::string& input, const CommonOpts& opts, const std::string& out_path) {
  const pm::RunConfig cfg = resolve_config(opts);
  const pm::Skeleton& skel = cfg.skeleton();
  const pm::MotionFile f = pm::read_motion_file(input);
  if (f.kind != pm::PayloadKind::kPositions) {
    throw pm::InvariantViolation(input + ": fit expects a positions payload");
  }
  auto persons = pm::positions_from_motion_file(f, cfg.y_up_inputs);

  pm::InteractionClip clip;
  for (auto& p : persons) {
    pm::PointMatrix targets;
    if (f.joints == 24) {
      // Drop the two extra hand joints (highest indices).
      targets.resize(static_cast<Eigen::Index>(f.frames) * 22, 3);
      for (int t = 0; t < f.frames; ++t) {
        targets.middleRows(static_cast<Eigen::Index>(t) * 22, 22) =
            p.middleRows(static_cast<Eigen::Index>(t) * 24, 22);
      }
    } else if (f.joints == 22) {
      targets = std::move(p);
    } else {
      throw pm::InvariantViolation(input + ": fit expects 22 or 24 joints, got " +
                                   std::to_string(f.joints));
    }
    const double fps = cfg.fps_override.value_or(f.fps);
    const pm::IkResult ik = pm::ik_fit(skel, targets, f.frames, fps);
    pm::MotionRep rep = pm::rep_from_motion(skel, ik.pose);
    const double rms =
        std::sqrt(ik.residual_rms.squaredNorm() / static_cast<double>(f.frames));
    const double mpjpe = pm::pos_rot_mpjpe(rep, skel);
    std::cout << input << ": person " << clip.persons.size() << ": residual_rms_m " << rms
              << " mpjpe_mm " << mpjpe << "\n";
    clip.persons.push_back(std::move(rep));
  }
  clip.text = f.text;
  pm::write_motion_file(out_path, pm::motion_file_from_clip(clip));
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int run_validate(const std::string& input, const CommonOpts& opts) {
  const pm::RunConfig cfg = resolve_config(opts);
  const pm::Skeleton& skel = cfg.skeleton();
  const pm::MotionFile f = pm::read_motion_file(input);
  if (f.kind != pm::PayloadKind::kRep) {
    throw pm::InvariantViolation(input + ": validate expects a rep payload");
  }
  const pm::InteractionClip clip = pm::clip_from_motion_file(f);
  bool any = false;
  for (std::size_t n = 0; n < clip.persons.size(); ++n) {
    const auto violations = pm::validate_rep(clip.persons[n], skel);
    const double mpjpe = pm::pos_rot_mpjpe(clip.persons[n], skel);
    std::cout << input << ": person " << n << ": mpjpe_mm " << mpjpe << "\n";
    if (mpjpe > 50.0) {
      std::cout << "warning: pos/rot disagreement noticeable (mpjpe " << mpjpe
                << " mm > 50 mm)\n";
    }
    for (const auto& v : violations) {
      any = true;
      std::cout << "violation: " << v.component << ": " << v.kind << ": " << v.message
                << " (value " << v.value << ")\n";
    }
  }
  return any ? kExitViolations : kExitOk;
}

int run_synth(const std::string& kind, const pm::SynthParams& params, const CommonOpts& opts,
              const std::string& out_path) {
  const pm::RunConfig cfg = resolve_config(opts);
  const pm::MotionFile f =
      pm::synth_clip(kind, params, cfg.skeleton(), cfg.body().spheres);
  pm::write_motion_file(out_path, f);
  std::cout << "wrote " << out_path << " (" << f.persons << " person(s), " << f.frames
            << " frames)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical-plausibility metrics and motion representation tools"};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "Run config JSON");
  app.add_option("--skeleton", opts.skeleton_path, "Skeleton config JSON");
  app.add_option("--body", opts.body_path, "Body config JSON (markers + spheres)");
  app.add_option("--format", opts.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv", ""}));
  bool y_up = false;
  app.add_flag("--up-axis-y", y_up, "Treat input positions as y-up and convert");
  std::string up_axis;
  app.add_option("--up-axis", up_axis, "Declare input up axis (y or z)")
      ->check(CLI::IsMember({"y", "z", ""}));

  auto* eval_cmd = app.add_subcommand("eval", "Score clips and aggregate a dataset report");
  std::vector<std::string> inputs;
  std::vector<std::string> refs;
  std::string out_dir;
  eval_cmd->add_option("inputs", inputs, "Motion files (positions or rep)")->required();
  eval_cmd->add_option("--ref", refs, "Reference files for FID*");
  eval_cmd->add_option("--out", out_dir, "Directory for report files");

  auto* fit_cmd = app.add_subcommand("fit", "Fit rotations to positions and emit a rep file");
  std::string fit_input;
  std::string fit_out;
  fit_cmd->add_option("input", fit_input, "Positions motion file")->required();
  fit_cmd->add_option("--out", fit_out, "Output rep file")->required();

  auto* val_cmd = app.add_subcommand("validate", "Check a rep file's internal consistency");
  std::string val_input;
  val_cmd->add_option("input", val_input, "Rep motion file")->required();

  auto* synth_cmd = app.add_subcommand("synth", "Generate a deterministic test clip");
  std::string synth_kind;
  std::string synth_out;
  pm::SynthParams params;
  synth_cmd->add_option("--kind", synth_kind, "static | walk-line | two-person-approach")
      ->required();
  synth_cmd->add_option("--frames", params.frames, "Frame count");
  synth_cmd->add_option("--fps", params.fps, "Frames per second");
  synth_cmd->add_option("--speed", params.speed, "walk-line speed, m/frame");
  synth_cmd->add_option("--gap", params.gap, "closest root distance, m");
  synth_cmd->add_option("--offset-z", params.offset_z, "vertical shift after ground placement, m");
  synth_cmd->add_option("--out", synth_out, "Output motion file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << "physimetrics: error: parse: " << e.what() << "\n";
    return kExitParse;
  }
  opts.y_up = y_up || up_axis == "y";

  try {
    if (app.got_subcommand(eval_cmd)) return run_eval(inputs, refs, opts, out_dir);
    if (app.got_subcommand(fit_cmd)) return run_fit(fit_input, opts, fit_out);
    if (app.got_subcommand(val_cmd)) return run_validate(val_input, opts);
    if (app.got_subcommand(synth_cmd)) return run_synth(synth_kind, params, opts, synth_out);
  } catch (const pm::ParseError& e) {
    std::cerr << "physimetrics: error: parse: " << e.what() << "\n";
    return kExitParse;
  } catch (const pm::Error& e) {
    std::cerr << "physimetrics: error: invariant: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "physimetrics: error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}
