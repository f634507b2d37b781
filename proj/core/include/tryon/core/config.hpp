#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tryon/core/raster.hpp"

namespace tryon {

// Normalization mode for the per-location term in the sampling-correctness
// loss: relative similarity against the best-matching source feature, or a
// constant 1 (ablation).
enum class MuMode { kRelativeSimilarity, kConstantOne };

// Hyperparameters shared across the pipeline. Defaults are the desk-scale
// configuration: 128 px renders, small encoders, CPU-trainable budgets.
struct TrainConfig {
  // Correspondence softmax sharpness.
  double alpha = 100.0;
  MuMode mu_mode = MuMode::kRelativeSimilarity;
  // Patch size for the local affine regularizer (odd, >= 3).
  int patch_n = 5;
  // Loss weights (flow, regular, perc, ctx, adv, cycle).
  std::array<double, 6> lambdas = {1.0, 1.0, 0.001, 1.0, 10.0, 100.0};

  // Stage schedules.
  int flow_pretrain_epochs = 20;
  int cwm_joint_epochs = 10;
  int gdtm_geometry_epochs = 10;
  int gdtm_texture_epochs = 10;
  int pairs_per_epoch = 32;        // training pairs sampled per CWM epoch
  int gdtm_steps_per_epoch = 40;   // (view, point-batch) steps per GDTM epoch

  // Learning rates per stage.
  double lr_cwm = 2e-4;
  double lr_gdtm = 1e-3;
  int batch_size = 1;
  bool non_saturating_gan = false;
  bool two_scale_discriminator = false;
  bool spectral_norm = false;

  // Reconstruction.
  int grid_resolution = 64;

  // Dataset (desk defaults; full scale is 83/- subjects, 90 views, 512 px).
  int image_size = 128;
  int n_train_subjects = 8;
  int n_test_subjects = 2;
  int views_per_subject = 24;
  int train_pairs_per_subject = 0;  // 0 = exhaustive same-subject pairing
  double keypoint_sigma = 6.0;      // px, distance-field decay

  // Network widths.
  int corr_channels = 64;    // shared embedding width C
  int corr_stride = 4;       // correspondence resolution H/4
  int geom_feat_channels = 32;
  int mlp_hidden = 128;

  // Point sampling.
  int n_uniform_points = 4000;
  int n_surface_points = 4000;
  double occ_sigma_frac = 0.05;    // of bbox diagonal
  double color_sigma_frac = 0.01;  // of bbox diagonal
  int points_per_step = 1024;

  std::uint64_t seed = 17;

  void validate() const {
    for (double l : lambdas)
      if (l < 0) throw ValidationError("TrainConfig: lambda < 0");
    if (!(alpha > 0)) throw ValidationError("TrainConfig: alpha must be > 0");
    if (patch_n < 3 || patch_n % 2 == 0)
      throw ValidationError("TrainConfig: patch_n must be odd and >= 3");
    if (grid_resolution < 8) throw ValidationError("TrainConfig: grid_resolution < 8");
  }
};

TrainConfig load_config(const std::string& path);
void save_config(const TrainConfig& cfg, const std::string& path);
std::string config_json(const TrainConfig& cfg);
TrainConfig parse_config_json(const std::string& json_text);

// Stable hash of the serialized config; stored in checkpoints.
std::uint64_t config_hash(const TrainConfig& cfg);

}  // namespace tryon
