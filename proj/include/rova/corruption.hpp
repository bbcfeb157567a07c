#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rova/frame_store.hpp"
#include "rova/rng.hpp"

namespace rova {

enum class PerturbationFamily { kWeather, kLighting, kCamera, kOcclusion };

enum class PerturbationSubtype {
  kFog,
  kRain,
  kSnow,
  kDusk,
  kNight,
  kOverexposure,
  kShadow,
  kTranslation,
  kZoom,
  kRotation,
  kStaticOcclusion,
  kDynamicOcclusion,
};

inline constexpr std::array<PerturbationFamily, 4> kAllFamilies = {
    PerturbationFamily::kWeather, PerturbationFamily::kLighting, PerturbationFamily::kCamera,
    PerturbationFamily::kOcclusion};

inline constexpr std::array<PerturbationSubtype, 12> kAllSubtypes = {
    PerturbationSubtype::kFog,          PerturbationSubtype::kRain,
    PerturbationSubtype::kSnow,         PerturbationSubtype::kDusk,
    PerturbationSubtype::kNight,        PerturbationSubtype::kOverexposure,
    PerturbationSubtype::kShadow,       PerturbationSubtype::kTranslation,
    PerturbationSubtype::kZoom,         PerturbationSubtype::kRotation,
    PerturbationSubtype::kStaticOcclusion, PerturbationSubtype::kDynamicOcclusion};

PerturbationFamily family_of(PerturbationSubtype subtype);
std::vector<PerturbationSubtype> subtypes_of(PerturbationFamily family);

std::string_view to_string(PerturbationFamily family);
std::string_view to_string(PerturbationSubtype subtype);
PerturbationFamily parse_family(std::string_view name);
PerturbationSubtype parse_subtype(PerturbationFamily family, std::string_view name);

/// A (family, subtype) pair; construction rejects subtypes outside the family.
class PerturbationStyle {
 public:
  PerturbationStyle(PerturbationFamily family, PerturbationSubtype subtype);
  explicit PerturbationStyle(PerturbationSubtype subtype)
      : PerturbationStyle(family_of(subtype), subtype) {}

  PerturbationFamily family() const { return family_; }
  PerturbationSubtype subtype() const { return subtype_; }
  std::string name() const;

  bool operator==(const PerturbationStyle&) const = default;

 private:
  PerturbationFamily family_;
  PerturbationSubtype subtype_;
};

/// True for subtypes whose binary map changes over time.
bool is_dynamic(PerturbationSubtype subtype);
/// True for subtypes whose binary map is full-field by construction
/// (fog, dusk, night); their coverage does not scale with intensity.
bool is_full_field(PerturbationSubtype subtype);

enum class BlendMode {
  kAttenuate,  // out = f * ((1 - B) + B * C)
  kLiteral,    // out = f * (B * C)
};
std::string_view to_string(BlendMode mode);
BlendMode parse_blend_mode(std::string_view name);

// --- style-specific region parameters ---------------------------------------
// All lengths are in pixels, all times in frames.

struct Box {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0,x1) x [y0,y1)
  bool operator==(const Box&) const = default;
};

struct FogParams {
  double cell = 16.0;  // value-noise lattice spacing
  double drift = 0.5;  // horizontal noise drift per frame
  bool operator==(const FogParams&) const = default;
};

/// Rain streaks or snow flakes advected downward, with horizontal wind.
struct PrecipitationParams {
  int count = 0;
  int length = 1;      // sprite height
  int width = 1;       // sprite width
  double fall = 1.0;   // vertical drift per frame
  double wind = 0.0;   // horizontal amplitude (snow sway) or drift (rain)
  bool operator==(const PrecipitationParams&) const = default;
};

/// Global luminance attenuation; C = 1 - (base + gradient * (1 - depth)).
struct LightParams {
  double base = 0.0;
  double gradient = 0.0;
  bool operator==(const LightParams&) const = default;
};

struct GlareParams {
  double cx = 0, cy = 0, rx = 1, ry = 1;
  bool operator==(const GlareParams&) const = default;
};

struct ShadowParams {
  std::vector<std::array<double, 2>> polygon;  // (x, y) vertices
  bool operator==(const ShadowParams&) const = default;
};

/// Shake trajectory. Translation: amplitude_x/amplitude_y in pixels with
/// direction signs; zoom: amplitude_x is the maximum zoom-out fraction;
/// rotation: amplitude_x is the maximum angle in radians.
struct CameraParams {
  double amplitude_x = 0;
  double amplitude_y = 0;
  int sign_x = 1;
  int sign_y = 1;
  int period = 8;
  double phase = 0;  // in periods, [0,1)
  bool operator==(const CameraParams&) const = default;
};

/// Opaque boxes; dynamic occlusion moves every box by (vx, vy) per frame.
struct OcclusionParams {
  std::vector<Box> boxes;
  double vx = 0;
  double vy = 0;
  bool operator==(const OcclusionParams&) const = default;
};

using RegionParams = std::variant<FogParams, PrecipitationParams, LightParams, GlareParams,
                                  ShadowParams, CameraParams, OcclusionParams>;

/// Everything needed to regenerate a corrupted video from its clean source.
struct PerturbationSpec {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  PerturbationStyle style{PerturbationSubtype::kFog};
  double intensity = 0.7;
  std::uint64_t seed = 0;
  bool shuffle = false;
  std::optional<std::vector<int>> permutation;  // 0-based; out[t] = in[perm[t]]
  BlendMode blend = BlendMode::kAttenuate;
  RegionParams region = FogParams{};
  Shape3 video_shape;

  bool operator==(const PerturbationSpec&) const = default;
};

/// Throws on any invariant violation (unknown schema, bad intensity,
/// non-bijective permutation, region record not matching the style).
void validate(const PerturbationSpec& spec);

nlohmann::json to_json(const PerturbationSpec& spec);
PerturbationSpec spec_from_json(const nlohmann::json& j);

/// Draws style-specific region parameters from the seed.
PerturbationSpec sample_spec(PerturbationStyle style, Shape3 shape, double intensity,
                             std::uint64_t seed, bool shuffle);

/// Permutation used by `spec`: explicit if present, else drawn from the
/// seed when shuffle is set, else identity.
std::vector<int> resolve_permutation(const PerturbationSpec& spec);

/// out frame t = in frame perm[t]. perm must be a bijection on {0..T-1}.
FrameSequence temporal_shuffle(const FrameSequence& seq, const std::vector<int>& perm);

MaskStack generate_mask(const PerturbationSpec& spec);

FrameSequence apply_mask(const FrameSequence& seq, const MaskStack& mask, BlendMode mode);

/// Shuffle (when requested) then mask, in the spec's blend mode.
FrameSequence apply_corruption(const FrameSequence& seq, const PerturbationSpec& spec);
FrameSequence apply_corruption(const FrameSequence& seq, const PerturbationSpec& spec,
                               BlendMode mode);

/// Rebuilds the corrupted output of `spec` from `clean`.
FrameSequence regenerate(const PerturbationSpec& spec, const FrameSequence& clean);

// --- protocol and sampling ---------------------------------------------------

enum class ProtocolMode { kStatic, kDynamic };
std::string_view to_string(ProtocolMode mode);
ProtocolMode parse_protocol(std::string_view name);

/// Seed policy. Static: seed is a pure function of (video id, style, variant),
/// so masks are fixed per video. Dynamic: every call draws a fresh seed from
/// the run stream.
class CorruptionProtocol {
 public:
  CorruptionProtocol(ProtocolMode mode, std::uint64_t run_seed)
      : mode_(mode), stream_(derive_key(run_seed, {fnv1a("protocol")})) {}

  ProtocolMode mode() const { return mode_; }
  std::uint64_t seed_for(std::string_view video_id, const PerturbationStyle& style,
                         std::uint64_t variant = 0);

 private:
  ProtocolMode mode_;
  CounterRng stream_;
};

/// Picks a family by weight, then a subtype uniformly within it.
class StyleSampler {
 public:
  explicit StyleSampler(std::array<double, 4> family_weights);
  PerturbationStyle sample(CounterRng& rng) const;
  const std::array<double, 4>& weights() const { return weights_; }

 private:
  std::array<double, 4> weights_;
};

// --- temporal coherence ------------------------------------------------------

struct Centroid {
  double x = 0, y = 0;
};

/// Centroid of B_t per frame; nullopt for frames with an empty binary map.
std::vector<std::optional<Centroid>> binary_centroids(const MaskStack& mask);
/// Largest centroid displacement between consecutive non-empty frames.
double max_centroid_step(const MaskStack& mask);
bool binary_is_frame_invariant(const MaskStack& mask);
/// Static subtypes: frame-invariant binary maps. Dynamic subtypes: centroid
/// step below max_step (defaults to H/8 when max_step <= 0).
bool is_temporally_coherent(const MaskStack& mask, PerturbationSubtype subtype,
                            double max_step = 0);

}  // namespace rova
