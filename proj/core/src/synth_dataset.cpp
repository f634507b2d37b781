#include "tryon/synth/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "tryon/core/io.hpp"

namespace tryon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string view_stem(int subject, float angle) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "s%03d_a%05.1f", subject, angle);
  return buf;
}

json camera_json(const WeakPerspectiveCamera& c) {
  return json{{"scale", c.scale},
              {"center", {c.center_x, c.center_y}},
              {"rotation", c.rotation},
              {"depth_offset", c.depth_offset}};
}

WeakPerspectiveCamera camera_from_json(const json& j) {
  WeakPerspectiveCamera c;
  c.scale = j.at("scale").get<float>();
  c.center_x = j.at("center")[0].get<float>();
  c.center_y = j.at("center")[1].get<float>();
  c.rotation = j.at("rotation").get<std::array<float, 9>>();
  c.depth_offset = j.at("depth_offset").get<float>();
  return c;
}

}  // namespace

std::vector<int> Manifest::train_view_indices() const {
  std::vector<int> idx;
  for (size_t i = 0; i < views.size(); ++i)
    if (views[i].split == "train") idx.push_back(static_cast<int>(i));
  return idx;
}

const SubjectRecord& Manifest::subject(int subject_id) const {
  for (const auto& s : subjects)
    if (s.subject_id == subject_id) return s;
  throw ValidationError("manifest: unknown subject " + std::to_string(subject_id));
}

Manifest build_dataset(const TrainConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root / "images", ec);
  fs::create_directories(root / "parsing", ec);
  fs::create_directories(root / "keypoints", ec);
  fs::create_directories(root / "meshes", ec);
  fs::create_directories(root / "samples", ec);
  if (ec) throw IoError("cannot create dataset directories under " + out_dir);

  Manifest m;
  m.seed = cfg.seed;
  m.image_size = cfg.image_size;
  m.views_per_subject = cfg.views_per_subject;

  const int n_total = cfg.n_train_subjects + cfg.n_test_subjects;
  const auto lighting = default_lighting();

  for (int s = 0; s < n_total; ++s) {
    const auto spec = default_garment_spec(static_cast<std::uint64_t>(s));
    const SyntheticSubject subject =
        generate_subject(cfg.seed * 1000 + static_cast<std::uint64_t>(s), spec);

    SubjectRecord rec;
    rec.subject_id = s;
    rec.split = s < cfg.n_train_subjects ? "train" : "test";
    rec.mesh_path = (root / "meshes" / (view_stem(s, 0).substr(0, 4) + ".ply")).string();
    write_ply(subject.body_mesh, rec.mesh_path);

    // Ground-truth sample caches; per-subject RNG streams keyed by id so
    // parallel subject builds stay deterministic.
    Rng occ_rng = sub_rng(cfg.seed ^ 0x0ccu, static_cast<std::uint64_t>(s));
    const float diag = subject.body_mesh.bbox_diagonal();
    auto occ = sample_occupancy_points(subject.body_mesh, cfg.n_uniform_points,
                                       cfg.n_surface_points,
                                       static_cast<float>(cfg.occ_sigma_frac) * diag,
                                       occ_rng);
    rec.occ_samples_path = (root / "samples" / (view_stem(s, 0).substr(0, 4) + "_occ.bin")).string();
    save_occ_samples(occ, rec.occ_samples_path);

    Rng col_rng = sub_rng(cfg.seed ^ 0xc01u, static_cast<std::uint64_t>(s));
    auto col = sample_color_points(subject.body_mesh,
                                   cfg.n_uniform_points + cfg.n_surface_points,
                                   static_cast<float>(cfg.color_sigma_frac) * diag,
                                   col_rng);
    rec.color_samples_path = (root / "samples" / (view_stem(s, 0).substr(0, 4) + "_col.bin")).string();
    save_color_samples(col, rec.color_samples_path);

    for (int v = 0; v < cfg.views_per_subject; ++v) {
      const float angle = 360.0f * static_cast<float>(v) / static_cast<float>(cfg.views_per_subject);
      const RenderedView view = render_view(subject, angle, lighting, cfg.image_size,
                                            static_cast<float>(cfg.keypoint_sigma));
      ViewRecord vr;
      vr.subject_id = s;
      vr.angle = angle;
      vr.split = rec.split;
      vr.camera = view.camera;
      const std::string stem = view_stem(s, angle);
      vr.image_path = (root / "images" / (stem + ".tfld")).string();
      vr.parsing_path = (root / "parsing" / (stem + ".tfld")).string();
      vr.keypoints_path = (root / "keypoints" / (stem + ".tfld")).string();
      write_field(view.image, vr.image_path);
      write_ppm(view.image, (root / "images" / (stem + ".ppm")).string());
      write_field(view.parsing, vr.parsing_path);
      write_field(view.keypoints, vr.keypoints_path);
      rec.view_indices.push_back(static_cast<int>(m.views.size()));
      m.views.push_back(std::move(vr));
    }
    m.subjects.push_back(std::move(rec));
  }

  save_manifest(m, (root / "manifest.json").string());
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  json j;
  j["seed"] = m.seed;
  j["image_size"] = m.image_size;
  j["views_per_subject"] = m.views_per_subject;
  j["views"] = json::array();
  for (const auto& v : m.views)
    j["views"].push_back({{"subject_id", v.subject_id},
                          {"angle", v.angle},
                          {"split", v.split},
                          {"image", v.image_path},
                          {"parsing", v.parsing_path},
                          {"keypoints", v.keypoints_path},
                          {"camera", camera_json(v.camera)}});
  j["subjects"] = json::array();
  for (const auto& s : m.subjects)
    j["subjects"].push_back({{"subject_id", s.subject_id},
                             {"split", s.split},
                             {"mesh", s.mesh_path},
                             {"occ_samples", s.occ_samples_path},
                             {"color_samples", s.color_samples_path},
                             {"view_indices", s.view_indices}});
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << j.dump(1) << "\n";
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  json j;
  in >> j;
  Manifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.image_size = j.at("image_size").get<int>();
  m.views_per_subject = j.at("views_per_subject").get<int>();
  for (const auto& v : j.at("views")) {
    ViewRecord r;
    r.subject_id = v.at("subject_id").get<int>();
    r.angle = v.at("angle").get<float>();
    r.split = v.at("split").get<std::string>();
    r.image_path = v.at("image").get<std::string>();
    r.parsing_path = v.at("parsing").get<std::string>();
    r.keypoints_path = v.at("keypoints").get<std::string>();
    r.camera = camera_from_json(v.at("camera"));
    m.views.push_back(std::move(r));
  }
  for (const auto& s : j.at("subjects")) {
    SubjectRecord r;
    r.subject_id = s.at("subject_id").get<int>();
    r.split = s.at("split").get<std::string>();
    r.mesh_path = s.at("mesh").get<std::string>();
    r.occ_samples_path = s.at("occ_samples").get<std::string>();
    r.color_samples_path = s.at("color_samples").get<std::string>();
    r.view_indices = s.at("view_indices").get<std::vector<int>>();
    m.subjects.push_back(std::move(r));
  }
  return m;
}

std::pair<const ViewRecord*, const ViewRecord*> sample_pair(const Manifest& m, Rng& rng) {
  std::vector<const SubjectRecord*> eligible;
  for (const auto& s : m.subjects)
    if (s.split == "train" && s.view_indices.size() >= 2) eligible.push_back(&s);
  if (eligible.empty())
    throw ValidationError("sample_pair: no training subject with >= 2 views");
  const auto& subj = *eligible[rng.below(eligible.size())];
  const auto n = subj.view_indices.size();
  const auto i = rng.below(n);
  auto k = rng.below(n - 1);
  if (k >= i) ++k;  // distinct second view
  return {&m.views[static_cast<size_t>(subj.view_indices[i])],
          &m.views[static_cast<size_t>(subj.view_indices[k])]};
}

LoadedView load_view(const ViewRecord& rec) {
  LoadedView v;
  v.image = Image::from_raster(read_field(rec.image_path));
  Raster parsing = read_field(rec.parsing_path);
  v.parsing = ParsingMap(parsing.height, parsing.width, parsing.channels);
  static_cast<Raster&>(v.parsing) = std::move(parsing);
  Raster kp = read_field(rec.keypoints_path);
  v.keypoints = KeypointField(kp.height, kp.width, kp.channels);
  static_cast<Raster&>(v.keypoints) = std::move(kp);
  v.camera = rec.camera;
  v.subject_id = rec.subject_id;
  v.angle = rec.angle;
  return v;
}

void save_occ_samples(const std::vector<OccupancySample>& samples,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write samples: " + path);
  const std::uint64_t n = samples.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(n * sizeof(OccupancySample)));
}

std::vector<OccupancySample> load_occ_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open samples: " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  std::vector<OccupancySample> samples(n);
  in.read(reinterpret_cast<char*>(samples.data()),
          static_cast<std::streamsize>(n * sizeof(OccupancySample)));
  if (!in) throw IoError("truncated samples: " + path);
  return samples;
}

void save_color_samples(const std::vector<ColorSample>& samples,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write samples: " + path);
  const std::uint64_t n = samples.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(n * sizeof(ColorSample)));
}

std::vector<ColorSample> load_color_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open samples: " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  std::vector<ColorSample> samples(n);
  in.read(reinterpret_cast<char*>(samples.data()),
          static_cast<std::streamsize>(n * sizeof(ColorSample)));
  if (!in) throw IoError("truncated samples: " + path);
  return samples;
}

}  // namespace tryon
