#include "tryon/synth/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tryon {

namespace {

// Real spherical harmonics basis, bands 0-2.
void sh_basis(const Vec3& n, float* y) {
  y[0] = 0.282095f;
  y[1] = 0.488603f * n.y;
  y[2] = 0.488603f * n.z;
  y[3] = 0.488603f * n.x;
  y[4] = 1.092548f * n.x * n.y;
  y[5] = 1.092548f * n.y * n.z;
  y[6] = 0.315392f * (3.0f * n.z * n.z - 1.0f);
  y[7] = 1.092548f * n.x * n.z;
  y[8] = 0.546274f * (n.x * n.x - n.y * n.y);
}

}  // namespace

float sh_irradiance(const ShCoefficients& sh, const Vec3& n) {
  float y[9];
  sh_basis(n, y);
  float e = 0.0f;
  for (int i = 0; i < 9; ++i) e += sh[i] * y[i];
  return e;
}

ShCoefficients default_lighting() {
  // Warm ambient plus a key light from the upper-left-front of the camera.
  // (y points down in this world, so "up" is -y.)
  ShCoefficients sh{};
  sh[0] = 2.6f;
  sh[1] = -0.45f;  // brighter for normals facing up
  sh[2] = -0.85f;  // brighter for normals facing the camera (-z)
  sh[3] = -0.25f;
  sh[6] = 0.12f;
  return sh;
}

ShCoefficients ambient_only(float intensity) {
  ShCoefficients sh{};
  sh[0] = intensity / 0.282095f;
  return sh;
}

WeakPerspectiveCamera turntable_camera(const SyntheticSubject& subject, float angle,
                                       int image_size) {
  // Fit by the rotation-invariant radii so every view uses the same scale.
  float rh = 0.0f, rv = 0.0f;
  for (const auto& v : subject.body_mesh.vertices) {
    rh = std::max(rh, std::sqrt(v.x * v.x + v.z * v.z));
    rv = std::max(rv, std::fabs(v.y));
  }
  const float radius = std::max(rh, rv);
  const float scale = 0.46f * static_cast<float>(image_size) / std::max(radius, 1e-6f);
  const float c = 0.5f * static_cast<float>(image_size - 1);
  return WeakPerspectiveCamera::turntable(angle, scale, c, c);
}

KeypointField keypoint_field(const std::array<Vec3, kNumJoints>& joints,
                             const WeakPerspectiveCamera& cam, int h, int w,
                             float sigma) {
  KeypointField field(h, w, kNumJoints);
  for (int j = 0; j < kNumJoints; ++j) {
    const Projected p = project(cam, joints[static_cast<size_t>(j)]);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const float dx = static_cast<float>(x) - p.x;
        const float dy = static_cast<float>(y) - p.y;
        field.at(y, x, j) = std::exp(-std::sqrt(dx * dx + dy * dy) / sigma);
      }
  }
  return field;
}

RenderedView render_view(const SyntheticSubject& subject, float angle,
                         const ShCoefficients& lighting, int image_size,
                         float keypoint_sigma) {
  const auto& mesh = subject.body_mesh;
  if (mesh.vertices.empty()) throw ValidationError("render_view: empty mesh");

  RenderedView view;
  view.subject_id = static_cast<int>(subject.seed);
  view.view_angle = angle;
  view.camera = turntable_camera(subject, angle, image_size);
  view.image = Image(image_size, image_size);
  view.parsing = ParsingMap(image_size, image_size, kNumParsingLabels);
  view.tri_id = Raster(image_size, image_size, 1);

  // Project all vertices once.
  std::vector<Projected> proj(mesh.vertices.size());
  bool any_visible = false;
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    proj[i] = project(view.camera, mesh.vertices[i]);
    if (proj[i].x >= 0 && proj[i].x < image_size && proj[i].y >= 0 &&
        proj[i].y < image_size)
      any_visible = true;
  }
  if (!any_visible) throw ValidationError("render_view: subject out of view frustum");

  std::vector<float> zbuf(static_cast<size_t>(image_size) * image_size,
                          std::numeric_limits<float>::infinity());

  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Projected& a = proj[tri.a];
    const Projected& b = proj[tri.b];
    const Projected& c = proj[tri.c];

    const float area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (std::fabs(area) < 1e-12f) continue;
    const float inv_area = 1.0f / area;

    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}))));
    const int x1 = std::min(image_size - 1,
                            static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}))));
    const int y1 = std::min(image_size - 1,
                            static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}))));
    if (x0 > x1 || y0 > y1) continue;

    // Camera-space flat shading; the light is fixed relative to the camera.
    const Vec3 n_world = mesh.face_normal(t);
    const Vec3 n_cam = view.camera.rotate(n_world);
    const float irradiance = std::max(sh_irradiance(lighting, n_cam), 0.0f);
    const Vec3 albedo =
        (mesh.vertex_colors[tri.a] + mesh.vertex_colors[tri.b] + mesh.vertex_colors[tri.c]) *
        (1.0f / 3.0f);
    const Vec3 shaded{std::clamp(albedo.x * irradiance, 0.0f, 1.0f),
                      std::clamp(albedo.y * irradiance, 0.0f, 1.0f),
                      std::clamp(albedo.z * irradiance, 0.0f, 1.0f)};
    const int label = mesh.triangle_regions.empty() ? kTorsoGarment
                                                    : mesh.triangle_regions[t];

    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const float px = static_cast<float>(x), py = static_cast<float>(y);
        const float w0 = ((b.x - px) * (c.y - py) - (b.y - py) * (c.x - px)) * inv_area;
        const float w1 = ((c.x - px) * (a.y - py) - (c.y - py) * (a.x - px)) * inv_area;
        const float w2 = 1.0f - w0 - w1;
        if (w0 < 0.0f || w1 < 0.0f || w2 < 0.0f) continue;
        const float z = w0 * a.z + w1 * b.z + w2 * c.z;
        float& zb = zbuf[static_cast<size_t>(y) * image_size + x];
        if (z >= zb) continue;
        zb = z;
        view.image.at(y, x, 0) = shaded.x;
        view.image.at(y, x, 1) = shaded.y;
        view.image.at(y, x, 2) = shaded.z;
        view.parsing.set_label(y, x, label);
        view.tri_id.at(y, x, 0) = static_cast<float>(t + 1);
      }
  }

  // Background pixels stay label 0 with a white backdrop.
  for (int y = 0; y < image_size; ++y)
    for (int x = 0; x < image_size; ++x)
      if (view.tri_id.at(y, x, 0) == 0.0f) {
        view.parsing.set_label(y, x, kBackground);
        view.image.at(y, x, 0) = 1.0f;
        view.image.at(y, x, 1) = 1.0f;
        view.image.at(y, x, 2) = 1.0f;
      }

  view.keypoints =
      keypoint_field(subject.joint_positions, view.camera, image_size, image_size,
                     keypoint_sigma);
  return view;
}

}  // namespace tryon
