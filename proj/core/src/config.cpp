#include "tryon/core/config.hpp"

#include <fstream>
#include <json.hpp>

#include "tryon/core/rng.hpp"

namespace tryon {

using nlohmann::json;

namespace {

json to_json(const TrainConfig& c) {
  json j;
  j["alpha"] = c.alpha;
  j["mu_mode"] = c.mu_mode == MuMode::kRelativeSimilarity ? "relative" : "one";
  j["patch_n"] = c.patch_n;
  j["lambdas"] = c.lambdas;
  j["flow_pretrain_epochs"] = c.flow_pretrain_epochs;
  j["cwm_joint_epochs"] = c.cwm_joint_epochs;
  j["gdtm_geometry_epochs"] = c.gdtm_geometry_epochs;
  j["gdtm_texture_epochs"] = c.gdtm_texture_epochs;
  j["pairs_per_epoch"] = c.pairs_per_epoch;
  j["gdtm_steps_per_epoch"] = c.gdtm_steps_per_epoch;
  j["lr_cwm"] = c.lr_cwm;
  j["lr_gdtm"] = c.lr_gdtm;
  j["batch_size"] = c.batch_size;
  j["non_saturating_gan"] = c.non_saturating_gan;
  j["two_scale_discriminator"] = c.two_scale_discriminator;
  j["spectral_norm"] = c.spectral_norm;
  j["grid_resolution"] = c.grid_resolution;
  j["image_size"] = c.image_size;
  j["n_train_subjects"] = c.n_train_subjects;
  j["n_test_subjects"] = c.n_test_subjects;
  j["views_per_subject"] = c.views_per_subject;
  j["train_pairs_per_subject"] = c.train_pairs_per_subject;
  j["keypoint_sigma"] = c.keypoint_sigma;
  j["corr_channels"] = c.corr_channels;
  j["corr_stride"] = c.corr_stride;
  j["geom_feat_channels"] = c.geom_feat_channels;
  j["mlp_hidden"] = c.mlp_hidden;
  j["n_uniform_points"] = c.n_uniform_points;
  j["n_surface_points"] = c.n_surface_points;
  j["occ_sigma_frac"] = c.occ_sigma_frac;
  j["color_sigma_frac"] = c.color_sigma_frac;
  j["points_per_step"] = c.points_per_step;
  j["seed"] = c.seed;
  return j;
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

TrainConfig from_json(const json& j) {
  TrainConfig c;
  get_if(j, "alpha", c.alpha);
  if (j.contains("mu_mode"))
    c.mu_mode = j.at("mu_mode").get<std::string>() == "one" ? MuMode::kConstantOne
                                                            : MuMode::kRelativeSimilarity;
  get_if(j, "patch_n", c.patch_n);
  get_if(j, "lambdas", c.lambdas);
  get_if(j, "flow_pretrain_epochs", c.flow_pretrain_epochs);
  get_if(j, "cwm_joint_epochs", c.cwm_joint_epochs);
  get_if(j, "gdtm_geometry_epochs", c.gdtm_geometry_epochs);
  get_if(j, "gdtm_texture_epochs", c.gdtm_texture_epochs);
  get_if(j, "pairs_per_epoch", c.pairs_per_epoch);
  get_if(j, "gdtm_steps_per_epoch", c.gdtm_steps_per_epoch);
  get_if(j, "lr_cwm", c.lr_cwm);
  get_if(j, "lr_gdtm", c.lr_gdtm);
  get_if(j, "batch_size", c.batch_size);
  get_if(j, "non_saturating_gan", c.non_saturating_gan);
  get_if(j, "two_scale_discriminator", c.two_scale_discriminator);
  get_if(j, "spectral_norm", c.spectral_norm);
  get_if(j, "grid_resolution", c.grid_resolution);
  get_if(j, "image_size", c.image_size);
  get_if(j, "n_train_subjects", c.n_train_subjects);
  get_if(j, "n_test_subjects", c.n_test_subjects);
  get_if(j, "views_per_subject", c.views_per_subject);
  get_if(j, "train_pairs_per_subject", c.train_pairs_per_subject);
  get_if(j, "keypoint_sigma", c.keypoint_sigma);
  get_if(j, "corr_channels", c.corr_channels);
  get_if(j, "corr_stride", c.corr_stride);
  get_if(j, "geom_feat_channels", c.geom_feat_channels);
  get_if(j, "mlp_hidden", c.mlp_hidden);
  get_if(j, "n_uniform_points", c.n_uniform_points);
  get_if(j, "n_surface_points", c.n_surface_points);
  get_if(j, "occ_sigma_frac", c.occ_sigma_frac);
  get_if(j, "color_sigma_frac", c.color_sigma_frac);
  get_if(j, "points_per_step", c.points_per_step);
  get_if(j, "seed", c.seed);
  c.validate();
  return c;
}

}  // namespace

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  json j;
  in >> j;
  return from_json(j);
}

void save_config(const TrainConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write config: " + path);
  out << to_json(cfg).dump(2) << "\n";
}

std::string config_json(const TrainConfig& cfg) { return to_json(cfg).dump(2); }

TrainConfig parse_config_json(const std::string& json_text) {
  return from_json(json::parse(json_text));
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  return fnv1a(to_json(cfg).dump());
}

}  // namespace tryon
