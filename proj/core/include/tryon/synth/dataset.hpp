#pragma once

#include <string>
#include <vector>

#include "tryon/core/config.hpp"
#include "tryon/recon/point_sampling.hpp"
#include "tryon/synth/render.hpp"

namespace tryon {

struct ViewRecord {
  int subject_id = 0;
  float angle = 0.0f;
  std::string split;  // "train" or "test"
  std::string image_path, parsing_path, keypoints_path;
  WeakPerspectiveCamera camera;
};

struct SubjectRecord {
  int subject_id = 0;
  std::string split;
  std::string mesh_path;
  std::string occ_samples_path, color_samples_path;
  std::vector<int> view_indices;  // into Manifest::views
};

struct Manifest {
  std::uint64_t seed = 0;
  int image_size = 0;
  int views_per_subject = 0;
  std::vector<SubjectRecord> subjects;
  std::vector<ViewRecord> views;

  std::vector<int> train_view_indices() const;
  const SubjectRecord& subject(int subject_id) const;
};

// Renders every subject/view, writes rasters, meshes and ground-truth sample
// caches under out_dir, and returns the manifest (also saved as
// manifest.json). The split is by subject: the first n_train_subjects train,
// the rest test. Fully deterministic for a fixed config.
Manifest build_dataset(const TrainConfig& cfg, const std::string& out_dir);

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

// Draws (reference, source): two distinct views of one training subject.
std::pair<const ViewRecord*, const ViewRecord*> sample_pair(const Manifest& m, Rng& rng);

// Expected number of rendered views for a rendering protocol.
constexpr std::int64_t planned_view_count(int n_subjects, int views_per_subject) {
  return static_cast<std::int64_t>(n_subjects) * views_per_subject;
}

// Loads the persisted rasters for one view.
struct LoadedView {
  Image image;
  ParsingMap parsing;
  KeypointField keypoints;
  WeakPerspectiveCamera camera;
  int subject_id = 0;
  float angle = 0.0f;
};
LoadedView load_view(const ViewRecord& rec);

std::vector<OccupancySample> load_occ_samples(const std::string& path);
void save_occ_samples(const std::vector<OccupancySample>& samples, const std::string& path);
std::vector<ColorSample> load_color_samples(const std::string& path);
void save_color_samples(const std::vector<ColorSample>& samples, const std::string& path);

}  // namespace tryon
