#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "physimetrics/bodymodel.hpp"
#include "physimetrics/losses.hpp"
#include "physimetrics/metrics.hpp"
#include "physimetrics/skeleton.hpp"

namespace physimetrics {

/// Batch run configuration; loadable from a JSON config file.
struct RunConfig {
  std::string skeleton_path;  // empty = shipped default
  std::string body_path;      // empty = shipped default
  LossConfig loss;
  double ground_height = 0.0;
  double contact_eps = 0.005;  // skate contact threshold, meters
  std::optional<double> fps_override;
  std::string format = "json";  // "json" or "csv"
  bool y_up_inputs = false;

  static RunConfig load(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j);

  const Skeleton& skeleton() const;
  const BodyModel& body() const;

 private:
  mutable std::optional<Skeleton> skeleton_;
  mutable std::optional<BodyModel> body_;
};

struct ClipReport {
  std::string path;
  MetricsReport report;
};

struct EvalOutput {
  std::vector<ClipReport> per_clip;
  MetricsReport aggregate;  // means across clips; fid_star filled with --ref
};

/// Evaluates every input clip and aggregates.  Per-clip work fans out over
/// at most `threads` workers; reduction order is fixed by input order so
/// reports are deterministic.  With `ref_inputs`, FID* is computed between
/// the pooled position frames of inputs and refs.
EvalOutput evaluate_files(const std::vector<std::string>& inputs,
                          const std::vector<std::string>& ref_inputs,
                          const RunConfig& cfg, int threads = 0);

nlohmann::json report_to_json(const MetricsReport& r);
std::string report_csv_header();
std::string report_csv_row(const std::string& name, const MetricsReport& r);

/// Serializes the whole evaluation (per-clip entries plus aggregate).
std::string format_eval_output(const EvalOutput& out, const std::string& format);

/// Thread cap from PHYSIMETRICS_THREADS, falling back to hardware concurrency.
int thread_cap_from_env();

}  // namespace physimetrics
