#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tryon/core/mesh.hpp"

namespace tryon {

// Parsing labels. 8 of the 20 channels are used; the rest stay all-zero to
// keep the map layout compatible with 20-label human-parsing conventions.
enum ParsingLabel : int {
  kBackground = 0,
  kHead = 1,
  kTorsoGarment = 2,
  kArmsSkin = 3,
  kArmGarment = 4,
  kLegsGarment = 5,
  kLegsSkin = 6,
  kFeet = 7,
};
constexpr int kNumParsingLabels = 20;

// The garment mask for layout compositing: torso garment, arm garment and
// exposed arm skin transfer together.
bool is_garment_label(int label);
// Any non-background label.
bool is_foreground_label(int label);
// Clothing labels (garments only, no skin) for warp-side masking.
bool is_clothing_label(int label);

enum class GarmentPattern { kSolid, kStripes, kChecks };

struct GarmentSpec {
  Vec3 top_color{0.8f, 0.2f, 0.2f};
  Vec3 top_color2{0.9f, 0.9f, 0.9f};  // secondary stripe/check color
  GarmentPattern pattern = GarmentPattern::kSolid;
  float stripe_period = 0.08f;  // world units
  bool long_sleeves = false;
  float sleeve_frac = 0.45f;  // fraction of the arm covered when short-sleeved
  Vec3 pants_color{0.2f, 0.25f, 0.6f};
  float pants_frac = 0.55f;  // fraction of the leg covered by the garment
  Vec3 skin_tone{0.85f, 0.68f, 0.55f};
  Vec3 shoe_color{0.15f, 0.12f, 0.1f};
};

// Joint order is fixed across the dataset.
enum Joint : int {
  kHeadTop = 0, kNeck, kPelvis,
  kShoulderL, kElbowL, kWristL,
  kShoulderR, kElbowR, kWristR,
  kHipL, kKneeL, kAnkleL,
  kHipR, kKneeR, kAnkleR,
  kNumJoints,
};

// Procedurally generated textured humanoid. The body is the iso-surface of a
// smooth union of capsules, extracted with marching cubes, so it is a single
// watertight component by construction (parity tests stay exact). World
// coordinates: y grows downward (image-like), head around y=-0.4.
struct SyntheticSubject {
  TexturedMesh body_mesh;  // triangle_regions hold ParsingLabel tags
  GarmentSpec garment_spec;
  std::array<Vec3, kNumJoints> joint_positions;
  std::uint64_t seed = 0;
};

// Deterministic for a fixed (seed, spec). Limb proportions are jittered
// within bounded ranges; garment textures are painted onto the tagged
// triangle sets.
SyntheticSubject generate_subject(std::uint64_t seed, const GarmentSpec& spec,
                                  int mc_resolution = 56);

// Convenience: a deterministic per-subject garment spec with well-separated
// top colors (golden-angle hue stepping) and alternating patterns.
GarmentSpec default_garment_spec(std::uint64_t subject_index);

}  // namespace tryon
