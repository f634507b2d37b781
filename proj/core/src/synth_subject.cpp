#include "tryon/synth/subject.hpp"

#include <algorithm>
#include <cmath>

#include "tryon/core/io.hpp"
#include "tryon/core/rng.hpp"
#include "tryon/recon/marching_cubes.hpp"

namespace tryon {

bool is_garment_label(int label) {
  return label == kTorsoGarment || label == kArmGarment || label == kArmsSkin;
}

bool is_foreground_label(int label) { return label != kBackground; }

bool is_clothing_label(int label) {
  return label == kTorsoGarment || label == kArmGarment || label == kLegsGarment;
}

namespace {

struct Capsule {
  Vec3 a, b;
  float r;

  float sdf(const Vec3& p) const {
    const Vec3 ab = b - a;
    const Vec3 ap = p - a;
    const float denom = ab.dot(ab);
    const float t = denom > 0.0f ? std::clamp(ap.dot(ab) / denom, 0.0f, 1.0f) : 0.0f;
    return (p - (a + ab * t)).norm() - r;
  }

  // Normalized position along the axis, for sleeve/pant-length cuts.
  float axis_frac(const Vec3& p) const {
    const Vec3 ab = b - a;
    const float denom = ab.dot(ab);
    return denom > 0.0f ? std::clamp((p - a).dot(ab) / denom, 0.0f, 1.0f) : 0.0f;
  }
};

enum BodyPart : int {
  kPartTorso = 0, kPartHead,
  kPartArmL, kPartArmR,
  kPartLegL, kPartLegR,
  kPartFootL, kPartFootR,
  kNumParts,
};

struct Body {
  std::array<Capsule, kNumParts> parts;

  // Smooth union keeps limb joins rounded so marching cubes never produces
  // knife-edge creases at part boundaries.
  float sdf(const Vec3& p) const {
    float d = parts[0].sdf(p);
    constexpr float k = 0.02f;
    for (int i = 1; i < kNumParts; ++i) {
      const float di = parts[i].sdf(p);
      const float h = std::clamp(0.5f + 0.5f * (d - di) / k, 0.0f, 1.0f);
      d = d * (1.0f - h) + di * h - k * h * (1.0f - h);
    }
    return d;
  }

  int nearest_part(const Vec3& p) const {
    int best = 0;
    float bd = parts[0].sdf(p);
    for (int i = 1; i < kNumParts; ++i) {
      const float di = parts[i].sdf(p);
      if (di < bd) {
        bd = di;
        best = i;
      }
    }
    return best;
  }
};

Body make_body(Rng& rng) {
  auto jitter = [&](float base, float spread) {
    return base * static_cast<float>(rng.uniform(1.0 - spread, 1.0 + spread));
  };
  Body body;
  const float torso_r = jitter(0.095f, 0.12f);
  const float neck_y = -0.17f;
  const float pelvis_y = jitter(0.12f, 0.1f);
  body.parts[kPartTorso] = {{0, neck_y, 0}, {0, pelvis_y, 0}, torso_r};

  const float head_r = jitter(0.065f, 0.1f);
  const float head_y = neck_y - torso_r - head_r * 0.45f;
  body.parts[kPartHead] = {{0, head_y, 0}, {0, head_y - 0.01f, 0}, head_r};

  const float arm_r = jitter(0.030f, 0.12f);
  const float shoulder_x = torso_r + arm_r * 0.55f;
  const float wrist_x = jitter(0.165f, 0.1f);
  const float wrist_y = jitter(0.10f, 0.15f);
  body.parts[kPartArmL] = {{-shoulder_x, neck_y + 0.015f, 0}, {-wrist_x, wrist_y, 0}, arm_r};
  body.parts[kPartArmR] = {{shoulder_x, neck_y + 0.015f, 0}, {wrist_x, wrist_y, 0}, arm_r};

  const float leg_r = jitter(0.042f, 0.1f);
  const float hip_x = 0.05f;
  const float ankle_y = jitter(0.40f, 0.06f);
  body.parts[kPartLegL] = {{-hip_x, pelvis_y, 0}, {-hip_x - 0.012f, ankle_y, 0}, leg_r};
  body.parts[kPartLegR] = {{hip_x, pelvis_y, 0}, {hip_x + 0.012f, ankle_y, 0}, leg_r};

  const float foot_r = jitter(0.026f, 0.1f);
  const float foot_y = ankle_y + 0.022f;
  body.parts[kPartFootL] = {{-hip_x - 0.012f, foot_y, 0.005f},
                            {-hip_x - 0.012f, foot_y, 0.055f}, foot_r};
  body.parts[kPartFootR] = {{hip_x + 0.012f, foot_y, 0.005f},
                            {hip_x + 0.012f, foot_y, 0.055f}, foot_r};
  return body;
}

int label_for(const Body& body, const GarmentSpec& spec, const Vec3& p) {
  const int part = body.nearest_part(p);
  switch (part) {
    case kPartHead: return kHead;
    case kPartTorso: return kTorsoGarment;
    case kPartArmL:
    case kPartArmR: {
      if (spec.long_sleeves) return kArmGarment;
      const float t = body.parts[part].axis_frac(p);
      return t < spec.sleeve_frac ? kArmGarment : kArmsSkin;
    }
    case kPartLegL:
    case kPartLegR: {
      const float t = body.parts[part].axis_frac(p);
      return t < spec.pants_frac ? kLegsGarment : kLegsSkin;
    }
    default: return kFeet;
  }
}

Vec3 pattern_color(const GarmentSpec& spec, const Vec3& p) {
  switch (spec.pattern) {
    case GarmentPattern::kSolid: return spec.top_color;
    case GarmentPattern::kStripes: {
      const int band = static_cast<int>(std::floor(p.y / spec.stripe_period));
      return (band & 1) ? spec.top_color2 : spec.top_color;
    }
    case GarmentPattern::kChecks: {
      const int bx = static_cast<int>(std::floor(p.x / spec.stripe_period));
      const int bz = static_cast<int>(std::floor((p.z + 10.0f) / spec.stripe_period));
      return ((bx + bz) & 1) ? spec.top_color2 : spec.top_color;
    }
  }
  return spec.top_color;
}

Vec3 albedo_for(const GarmentSpec& spec, int label, const Vec3& p) {
  switch (label) {
    case kHead:
    case kArmsSkin:
    case kLegsSkin: return spec.skin_tone;
    case kTorsoGarment:
    case kArmGarment: return pattern_color(spec, p);
    case kLegsGarment: return spec.pants_color;
    case kFeet: return spec.shoe_color;
    default: return {0, 0, 0};
  }
}

}  // namespace

SyntheticSubject generate_subject(std::uint64_t seed, const GarmentSpec& spec,
                                  int mc_resolution) {
  Rng rng = sub_rng(seed, "subject");
  const Body body = make_body(rng);

  OccupancyGrid grid;
  grid.nx = grid.ny = grid.nz = mc_resolution;
  grid.bbox_lo = {-0.55f, -0.55f, -0.55f};
  grid.bbox_hi = {0.55f, 0.55f, 0.55f};
  grid.values.resize(static_cast<size_t>(mc_resolution) * mc_resolution * mc_resolution);
  const float cell = (grid.bbox_hi.x - grid.bbox_lo.x) / static_cast<float>(mc_resolution - 1);
  for (int z = 0; z < mc_resolution; ++z)
    for (int y = 0; y < mc_resolution; ++y)
      for (int x = 0; x < mc_resolution; ++x) {
        const Vec3 p = grid.position(static_cast<float>(x), static_cast<float>(y),
                                     static_cast<float>(z));
        // Occupancy convention: inside -> 1, level 0.5 on sdf == 0. The SDF
        // maps linearly across two cells so crossings interpolate sub-cell.
        grid.at(x, y, z) = std::clamp(0.5f - body.sdf(p) / (2.0f * cell), 0.0f, 1.0f);
      }

  SyntheticSubject subject;
  subject.seed = seed;
  subject.garment_spec = spec;
  subject.body_mesh = marching_cubes(grid, 0.5f);

  auto& mesh = subject.body_mesh;
  mesh.triangle_regions.resize(mesh.triangles.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 c = (mesh.vertices[tri.a] + mesh.vertices[tri.b] + mesh.vertices[tri.c]) *
                   (1.0f / 3.0f);
    mesh.triangle_regions[t] = label_for(body, spec, c);
  }
  mesh.vertex_colors.resize(mesh.vertices.size());
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec3& p = mesh.vertices[v];
    mesh.vertex_colors[v] = albedo_for(spec, label_for(body, spec, p), p);
  }

  auto mid = [](const Vec3& a, const Vec3& b) { return (a + b) * 0.5f; };
  auto& j = subject.joint_positions;
  const auto& parts = body.parts;
  j[kHeadTop] = parts[kPartHead].a - Vec3{0, parts[kPartHead].r, 0};
  j[kNeck] = parts[kPartTorso].a;
  j[kPelvis] = parts[kPartTorso].b;
  j[kShoulderL] = parts[kPartArmL].a;
  j[kElbowL] = mid(parts[kPartArmL].a, parts[kPartArmL].b);
  j[kWristL] = parts[kPartArmL].b;
  j[kShoulderR] = parts[kPartArmR].a;
  j[kElbowR] = mid(parts[kPartArmR].a, parts[kPartArmR].b);
  j[kWristR] = parts[kPartArmR].b;
  j[kHipL] = parts[kPartLegL].a;
  j[kKneeL] = mid(parts[kPartLegL].a, parts[kPartLegL].b);
  j[kAnkleL] = parts[kPartLegL].b;
  j[kHipR] = parts[kPartLegR].a;
  j[kKneeR] = mid(parts[kPartLegR].a, parts[kPartLegR].b);
  j[kAnkleR] = parts[kPartLegR].b;
  return subject;
}

GarmentSpec default_garment_spec(std::uint64_t subject_index) {
  GarmentSpec spec;
  // Golden-angle hue stepping keeps any two subjects' tops far apart in color.
  const double hue = std::fmod(0.137 + 0.381966011 * static_cast<double>(subject_index), 1.0);
  auto hsv = [](double h, double s, double v) {
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = v - c;
    return Vec3{static_cast<float>(r + m), static_cast<float>(g + m),
                static_cast<float>(b + m)};
  };
  spec.top_color = hsv(hue, 0.85, 0.85);
  spec.top_color2 = hsv(std::fmod(hue + 0.5, 1.0), 0.25, 0.95);
  spec.pattern = static_cast<GarmentPattern>(subject_index % 3);
  spec.long_sleeves = (subject_index % 2) == 1;
  spec.pants_color = hsv(std::fmod(hue + 0.31, 1.0), 0.7, 0.5);
  Rng rng = sub_rng(subject_index, "skin");
  spec.skin_tone = {static_cast<float>(rng.uniform(0.55, 0.9)),
                    static_cast<float>(rng.uniform(0.45, 0.7)),
                    static_cast<float>(rng.uniform(0.35, 0.6))};
  return spec;
}

}  // namespace tryon
