#pragma once

#include "onebit/sampler.hpp"
#include "onebit/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace onebit {

enum class TaskKind { OneBitCS, Logistic, OneBitInpainting };

std::string task_name(TaskKind t);
TaskKind parse_task(const std::string& name);

/// Full experiment description. Flat key-value text file with [section]
/// headers; every field can also be overridden with "section.key=value"
/// strings (the CLI forwards its flags this way).
struct ExperimentConfig {
  // [task]
  TaskKind task = TaskKind::OneBitCS;
  int n = 64;
  int m = 16;
  double mask_ratio = 0.5;  // inpainting only
  double sigma = 0.5;       // pre-quantization noise std
  std::string prior_path;
  int height = 0;  // optional image shape (enables SSIM); height*width must equal n
  int width = 0;

  // [schedule]
  int schedule_t = 1000;
  double beta_min = 1e-4;
  double beta_max = 0.02;

  // [recovery]
  double lambda = -1.0;  // < 0: resolved per task (0.02 CS/logistic, 1.0 inpainting)
  double zeta = 0.0;
  int nfe = 20;
  int inner_steps = 100;
  double inner_lr = 0.25;
  InnerMethod inner_method = InnerMethod::Adam;
  WarmStart warm_start = WarmStart::FromZ;
  double recovery_sigma = -1.0;  // < 0: matched to the observation sigma

  // [run]
  int trials = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int threads = 0;          // 0 = hardware concurrency
  double data_range = 2.0;  // PSNR/SSIM range

  double resolved_lambda() const;
  void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
void apply_override(ExperimentConfig& cfg, const std::string& key_eq_value);

/// Canonical "section.key=value" serialization, sorted, independent of how
/// the config was produced. The config hash is FNV-1a 64 of this string.
std::string canonical_config_string(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace onebit
