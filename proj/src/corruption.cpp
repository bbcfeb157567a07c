#include "rova/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rova/error.hpp"

namespace rova {

using nlohmann::json;

// --- names -------------------------------------------------------------------

PerturbationFamily family_of(PerturbationSubtype subtype) {
  switch (subtype) {
    case PerturbationSubtype::kFog:
    case PerturbationSubtype::kRain:
    case PerturbationSubtype::kSnow:
      return PerturbationFamily::kWeather;
    case PerturbationSubtype::kDusk:
    case PerturbationSubtype::kNight:
    case PerturbationSubtype::kOverexposure:
    case PerturbationSubtype::kShadow:
      return PerturbationFamily::kLighting;
    case PerturbationSubtype::kTranslation:
    case PerturbationSubtype::kZoom:
    case PerturbationSubtype::kRotation:
      return PerturbationFamily::kCamera;
    case PerturbationSubtype::kStaticOcclusion:
    case PerturbationSubtype::kDynamicOcclusion:
      return PerturbationFamily::kOcclusion;
  }
  fail(ErrorKind::kDomain, "unknown perturbation subtype");
}

std::vector<PerturbationSubtype> subtypes_of(PerturbationFamily family) {
  std::vector<PerturbationSubtype> out;
  for (auto s : kAllSubtypes)
    if (family_of(s) == family) out.push_back(s);
  return out;
}

std::string_view to_string(PerturbationFamily family) {
  switch (family) {
    case PerturbationFamily::kWeather: return "weather";
    case PerturbationFamily::kLighting: return "lighting";
    case PerturbationFamily::kCamera: return "camera";
    case PerturbationFamily::kOcclusion: return "occlusion";
  }
  return "?";
}

std::string_view to_string(PerturbationSubtype subtype) {
  switch (subtype) {
    case PerturbationSubtype::kFog: return "fog";
    case PerturbationSubtype::kRain: return "rain";
    case PerturbationSubtype::kSnow: return "snow";
    case PerturbationSubtype::kDusk: return "dusk";
    case PerturbationSubtype::kNight: return "night";
    case PerturbationSubtype::kOverexposure: return "overexposure";
    case PerturbationSubtype::kShadow: return "shadow";
    case PerturbationSubtype::kTranslation: return "translation";
    case PerturbationSubtype::kZoom: return "zoom";
    case PerturbationSubtype::kRotation: return "rotation";
    case PerturbationSubtype::kStaticOcclusion: return "static";
    case PerturbationSubtype::kDynamicOcclusion: return "dynamic";
  }
  return "?";
}

PerturbationFamily parse_family(std::string_view name) {
  for (auto f : kAllFamilies)
    if (to_string(f) == name) return f;
  fail(ErrorKind::kDomain, "unknown perturbation family '" + std::string(name) + "'");
}

PerturbationSubtype parse_subtype(PerturbationFamily family, std::string_view name) {
  for (auto s : subtypes_of(family))
    if (to_string(s) == name) return s;
  fail(ErrorKind::kDomain, "unknown subtype '" + std::string(name) + "' for family " +
                               std::string(to_string(family)));
}

PerturbationStyle::PerturbationStyle(PerturbationFamily family, PerturbationSubtype subtype)
    : family_(family), subtype_(subtype) {
  if (family_of(subtype) != family) {
    fail(ErrorKind::kDomain, "subtype " + std::string(to_string(subtype)) +
                                 " does not belong to family " + std::string(to_string(family)));
  }
}

std::string PerturbationStyle::name() const {
  return std::string(to_string(family_)) + "/" + std::string(to_string(subtype_));
}

bool is_dynamic(PerturbationSubtype subtype) {
  switch (subtype) {
    case PerturbationSubtype::kRain:
    case PerturbationSubtype::kSnow:
    case PerturbationSubtype::kTranslation:
    case PerturbationSubtype::kZoom:
    case PerturbationSubtype::kRotation:
    case PerturbationSubtype::kDynamicOcclusion:
      return true;
    default:
      return false;
  }
}

bool is_full_field(PerturbationSubtype subtype) {
  return subtype == PerturbationSubtype::kFog || subtype == PerturbationSubtype::kDusk ||
         subtype == PerturbationSubtype::kNight;
}

std::string_view to_string(BlendMode mode) {
  return mode == BlendMode::kAttenuate ? "attenuate" : "literal";
}

BlendMode parse_blend_mode(std::string_view name) {
  if (name == "attenuate") return BlendMode::kAttenuate;
  if (name == "literal") return BlendMode::kLiteral;
  fail(ErrorKind::kDomain, "unknown blend mode '" + std::string(name) + "'");
}

std::string_view to_string(ProtocolMode mode) {
  return mode == ProtocolMode::kStatic ? "static" : "dynamic";
}

ProtocolMode parse_protocol(std::string_view name) {
  if (name == "static") return ProtocolMode::kStatic;
  if (name == "dynamic") return ProtocolMode::kDynamic;
  fail(ErrorKind::kDomain, "unknown protocol '" + std::string(name) + "'");
}

// --- validation ----------------------------------------------------------------

namespace {

std::size_t expected_region_index(PerturbationSubtype subtype) {
  switch (subtype) {
    case PerturbationSubtype::kFog: return 0;
    case PerturbationSubtype::kRain:
    case PerturbationSubtype::kSnow: return 1;
    case PerturbationSubtype::kDusk:
    case PerturbationSubtype::kNight: return 2;
    case PerturbationSubtype::kOverexposure: return 3;
    case PerturbationSubtype::kShadow: return 4;
    case PerturbationSubtype::kTranslation:
    case PerturbationSubtype::kZoom:
    case PerturbationSubtype::kRotation: return 5;
    case PerturbationSubtype::kStaticOcclusion:
    case PerturbationSubtype::kDynamicOcclusion: return 6;
  }
  return 0;
}

void check_permutation(const std::vector<int>& perm, int t) {
  if (static_cast<int>(perm.size()) != t) {
    fail(ErrorKind::kShape, "permutation length " + std::to_string(perm.size()) +
                                " does not match T=" + std::to_string(t));
  }
  std::vector<char> seen(perm.size(), 0);
  for (int p : perm) {
    if (p < 0 || p >= t || seen[static_cast<std::size_t>(p)])
      fail(ErrorKind::kDomain, "permutation is not a bijection on {0..T-1}");
    seen[static_cast<std::size_t>(p)] = 1;
  }
}

struct RegionChecker {
  void operator()(const FogParams& p) const {
    if (!(p.cell > 0) || !std::isfinite(p.drift)) fail(ErrorKind::kDomain, "fog: cell must be > 0");
  }
  void operator()(const PrecipitationParams& p) const {
    if (p.count < 0 || p.length < 1 || p.width < 1 || !std::isfinite(p.fall) || !std::isfinite(p.wind))
      fail(ErrorKind::kDomain, "precipitation: count >= 0, sprite >= 1x1 required");
  }
  void operator()(const LightParams& p) const {
    if (p.base < 0 || p.gradient < 0 || p.base + p.gradient > 1)
      fail(ErrorKind::kDomain, "light: base, gradient >= 0 and base + gradient <= 1 required");
  }
  void operator()(const GlareParams& p) const {
    if (!(p.rx > 0) || !(p.ry > 0)) fail(ErrorKind::kDomain, "glare: radii must be > 0");
  }
  void operator()(const ShadowParams& p) const {
    if (p.polygon.size() < 3) fail(ErrorKind::kDomain, "shadow: polygon needs >= 3 vertices");
  }
  void operator()(const CameraParams& p) const {
    if (p.period < 1 || p.amplitude_x < 0 || p.amplitude_y < 0 ||
        std::abs(p.sign_x) != 1 || std::abs(p.sign_y) != 1)
      fail(ErrorKind::kDomain, "camera: period >= 1, amplitudes >= 0, signs +-1 required");
  }
  void operator()(const OcclusionParams& p) const {
    for (const auto& b : p.boxes)
      if (b.x1 < b.x0 || b.y1 < b.y0) fail(ErrorKind::kDomain, "occlusion: malformed box");
  }
};

}  // namespace

void validate(const PerturbationSpec& spec) {
  if (spec.schema_version != PerturbationSpec::kSchemaVersion) {
    fail(ErrorKind::kFormat,
         "unknown spec schema_version " + std::to_string(spec.schema_version));
  }
  if (!(spec.intensity > 0.0 && spec.intensity <= 1.0))
    fail(ErrorKind::kDomain, "intensity must lie in (0,1], got " + std::to_string(spec.intensity));
  auto s = spec.video_shape;
  if (s.t < 1 || s.h < 1 || s.w < 1) fail(ErrorKind::kShape, "video_shape must be positive");
  if (spec.permutation) check_permutation(*spec.permutation, s.t);
  if (spec.region.index() != expected_region_index(spec.style.subtype()))
    fail(ErrorKind::kDomain, "region_params do not match style " + spec.style.name());
  std::visit(RegionChecker{}, spec.region);
}

// --- JSON ------------------------------------------------------------------------

namespace {

struct RegionToJson {
  json operator()(const FogParams& p) const { return {{"cell", p.cell}, {"drift", p.drift}}; }
  json operator()(const PrecipitationParams& p) const {
    return {{"count", p.count}, {"length", p.length}, {"width", p.width},
            {"fall", p.fall},   {"wind", p.wind}};
  }
  json operator()(const LightParams& p) const {
    return {{"base", p.base}, {"gradient", p.gradient}};
  }
  json operator()(const GlareParams& p) const {
    return {{"cx", p.cx}, {"cy", p.cy}, {"rx", p.rx}, {"ry", p.ry}};
  }
  json operator()(const ShadowParams& p) const {
    json poly = json::array();
    for (auto& v : p.polygon) poly.push_back({v[0], v[1]});
    return {{"polygon", poly}};
  }
  json operator()(const CameraParams& p) const {
    return {{"amplitude_x", p.amplitude_x}, {"amplitude_y", p.amplitude_y},
            {"sign_x", p.sign_x},           {"sign_y", p.sign_y},
            {"period", p.period},           {"phase", p.phase}};
  }
  json operator()(const OcclusionParams& p) const {
    json boxes = json::array();
    for (auto& b : p.boxes) boxes.push_back({b.x0, b.y0, b.x1, b.y1});
    return {{"boxes", boxes}, {"vx", p.vx}, {"vy", p.vy}};
  }
};

RegionParams region_from_json(PerturbationSubtype subtype, const json& j) {
  switch (expected_region_index(subtype)) {
    case 0:
      return FogParams{j.at("cell").get<double>(), j.at("drift").get<double>()};
    case 1:
      return PrecipitationParams{j.at("count").get<int>(), j.at("length").get<int>(),
                                 j.at("width").get<int>(), j.at("fall").get<double>(),
                                 j.at("wind").get<double>()};
    case 2:
      return LightParams{j.at("base").get<double>(), j.at("gradient").get<double>()};
    case 3:
      return GlareParams{j.at("cx").get<double>(), j.at("cy").get<double>(),
                         j.at("rx").get<double>(), j.at("ry").get<double>()};
    case 4: {
      ShadowParams p;
      for (auto& v : j.at("polygon")) p.polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      return p;
    }
    case 5:
      return CameraParams{j.at("amplitude_x").get<double>(), j.at("amplitude_y").get<double>(),
                          j.at("sign_x").get<int>(),         j.at("sign_y").get<int>(),
                          j.at("period").get<int>(),         j.at("phase").get<double>()};
    default: {
      OcclusionParams p;
      for (auto& b : j.at("boxes"))
        p.boxes.push_back({b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()});
      p.vx = j.at("vx").get<double>();
      p.vy = j.at("vy").get<double>();
      return p;
    }
  }
}

}  // namespace

json to_json(const PerturbationSpec& spec) {
  json j;
  j["schema_version"] = spec.schema_version;
  j["style"] = {{"family", to_string(spec.style.family())},
                {"subtype", to_string(spec.style.subtype())}};
  j["intensity"] = spec.intensity;
  j["seed"] = spec.seed;
  j["shuffle"] = spec.shuffle;
  if (spec.permutation) j["permutation"] = *spec.permutation;
  j["blend"] = to_string(spec.blend);
  j["video_shape"] = {spec.video_shape.t, spec.video_shape.h, spec.video_shape.w};
  j["region_params"] = std::visit(RegionToJson{}, spec.region);
  return j;
}

PerturbationSpec spec_from_json(const json& j) {
  PerturbationSpec spec;
  try {
    spec.schema_version = j.at("schema_version").get<int>();
    if (spec.schema_version != PerturbationSpec::kSchemaVersion) {
      fail(ErrorKind::kFormat,
           "unknown spec schema_version " + std::to_string(spec.schema_version));
    }
    auto family = parse_family(j.at("style").at("family").get<std::string>());
    auto subtype = parse_subtype(family, j.at("style").at("subtype").get<std::string>());
    spec.style = PerturbationStyle(family, subtype);
    spec.intensity = j.at("intensity").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.shuffle = j.at("shuffle").get<bool>();
    if (j.contains("permutation")) spec.permutation = j.at("permutation").get<std::vector<int>>();
    spec.blend = parse_blend_mode(j.value("blend", std::string("attenuate")));
    const auto& shape = j.at("video_shape");
    spec.video_shape = {shape.at(0).get<int>(), shape.at(1).get<int>(), shape.at(2).get<int>()};
    spec.region = region_from_json(subtype, j.at("region_params"));
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, std::string("malformed perturbation spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

// --- sampling --------------------------------------------------------------------

namespace {

double depth_proxy(int y, int h) {
  return h > 1 ? static_cast<double>(y) / static_cast<double>(h - 1) : 1.0;
}

// Triangle wave in [-1, 1] with unit period; tri(0) = -1, tri(0.5) = 1.
double tri(double u) {
  double f = u - std::floor(u);
  return 1.0 - 4.0 * std::abs(f - 0.5);
}

double phase_position(const CameraParams& p, int t) {
  return static_cast<double>(t) / static_cast<double>(p.period) + p.phase;
}

Box sized_box(Shape3 s, double intensity) {
  int bw = std::max(1, static_cast<int>(std::floor(std::sqrt(intensity) * s.w)));
  int bh = std::max(1, static_cast<int>(std::floor(std::sqrt(intensity) * s.h)));
  return {0, 0, std::min(bw, s.w), std::min(bh, s.h)};
}

// Lower rows are nearer, so occluders are biased toward the bottom half.
int near_biased_row(int h, int bh, CounterRng& rng) {
  int range = h - bh;
  if (range <= 0) return 0;
  return range - static_cast<int>(rng.below(static_cast<std::uint64_t>(range / 2 + 1)));
}

RegionParams sample_region(PerturbationSubtype subtype, Shape3 s, double eta, CounterRng& rng) {
  const double h = s.h, w = s.w;
  switch (subtype) {
    case PerturbationSubtype::kFog: {
      double cell = std::max(2.0, std::min(h, w) / 4.0);
      return FogParams{cell, cell / 16.0 * rng.uniform(0.5, 1.5)};
    }
    case PerturbationSubtype::kRain: {
      PrecipitationParams p;
      p.length = std::max(1, s.h / 8);
      p.width = 1;
      p.count = std::max(1, static_cast<int>(std::floor(eta * h * w / (p.length * p.width))));
      p.fall = std::max(1.0, h / 16.0);
      p.wind = p.fall * rng.uniform(-0.25, 0.25);
      return p;
    }
    case PerturbationSubtype::kSnow: {
      PrecipitationParams p;
      p.length = p.width = std::max(1, std::min(s.h, s.w) / 32);
      p.count = std::max(1, static_cast<int>(std::floor(eta * h * w / (p.length * p.width))));
      p.fall = std::max(0.5, h / 48.0);
      p.wind = std::max(1.0, w / 32.0) * rng.uniform(0.5, 1.0);
      return p;
    }
    case PerturbationSubtype::kDusk:
      return LightParams{0.25 + rng.uniform(-0.05, 0.05), 0.35};
    case PerturbationSubtype::kNight:
      return LightParams{0.70 + rng.uniform(-0.05, 0.05), 0.2};
    case PerturbationSubtype::kOverexposure: {
      double a = 0.9 * std::sqrt(eta / M_PI);
      GlareParams g;
      g.rx = std::max(0.5, a * w);
      g.ry = std::max(0.5, a * h);
      g.cx = w > 2 * g.rx ? rng.uniform(g.rx, w - g.rx) : w / 2;
      g.cy = h / 2 > g.ry ? rng.uniform(g.ry, h / 2) : h / 2;
      return g;
    }
    case PerturbationSubtype::kShadow: {
      double side = 0.9 * std::sqrt(eta);
      double bw = side * w, bh = side * h;
      double x0 = rng.uniform(0.0, w - bw);
      double y0 = rng.uniform((h - bh) / 2.0, h - bh);
      ShadowParams p;
      p.polygon = {{x0 + rng.uniform() * bw, y0},
                   {x0 + bw, y0 + rng.uniform() * bh},
                   {x0 + rng.uniform() * bw, y0 + bh},
                   {x0, y0 + rng.uniform() * bh}};
      return p;
    }
    case PerturbationSubtype::kTranslation:
    case PerturbationSubtype::kZoom:
    case PerturbationSubtype::kRotation: {
      CameraParams p;
      if (subtype == PerturbationSubtype::kTranslation) {
        // Single-axis shake: an L-shaped border would let the centroid jump between arms.
        if (rng.bernoulli(0.5))
          p.amplitude_x = eta * w / 4.0;
        else
          p.amplitude_y = eta * h / 4.0;
      } else {
        p.amplitude_x = eta / 2.0;  // zoom-out fraction or radians
      }
      p.sign_x = rng.bernoulli(0.5) ? 1 : -1;
      p.sign_y = rng.bernoulli(0.5) ? 1 : -1;
      p.period = 8 + static_cast<int>(rng.below(9));
      p.phase = rng.uniform();
      return p;
    }
    case PerturbationSubtype::kStaticOcclusion:
    case PerturbationSubtype::kDynamicOcclusion: {
      Box b = sized_box(s, eta);
      int bw = b.x1, bh = b.y1;
      b.x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.w - bw + 1)));
      b.y0 = near_biased_row(s.h, bh, rng);
      b.x1 = b.x0 + bw;
      b.y1 = b.y0 + bh;
      OcclusionParams p{{b}, 0.0, 0.0};
      if (subtype == PerturbationSubtype::kDynamicOcclusion && s.t > 1) {
        double vmax = std::min(h, w) / 16.0;
        double span = s.t - 1;
        double end_x = std::clamp(b.x0 + rng.uniform(-vmax, vmax) * span, 0.0, w - bw);
        double end_y = std::clamp(b.y0 + rng.uniform(-vmax, vmax) * span, 0.0, h - bh);
        p.vx = (end_x - b.x0) / span;
        p.vy = (end_y - b.y0) / span;
      }
      return p;
    }
  }
  fail(ErrorKind::kDomain, "unknown subtype");
}

}  // namespace

PerturbationSpec sample_spec(PerturbationStyle style, Shape3 shape, double intensity,
                             std::uint64_t seed, bool shuffle) {
  PerturbationSpec spec;
  spec.style = style;
  spec.intensity = intensity;
  spec.seed = seed;
  spec.shuffle = shuffle;
  spec.video_shape = shape;
  if (!(intensity > 0.0 && intensity <= 1.0))
    fail(ErrorKind::kDomain, "intensity must lie in (0,1], got " + std::to_string(intensity));
  if (shape.t < 1 || shape.h < 1 || shape.w < 1) fail(ErrorKind::kShape, "video_shape must be positive");
  CounterRng rng(derive_key(seed, {fnv1a("region"), static_cast<std::uint64_t>(style.subtype())}));
  spec.region = sample_region(style.subtype(), shape, intensity, rng);
  validate(spec);
  return spec;
}

std::vector<int> resolve_permutation(const PerturbationSpec& spec) {
  int t = spec.video_shape.t;
  if (spec.permutation) {
    check_permutation(*spec.permutation, t);
    return *spec.permutation;
  }
  if (spec.shuffle) {
    CounterRng rng(derive_key(spec.seed, {fnv1a("shuffle")}));
    return random_permutation(t, rng);
  }
  std::vector<int> id(static_cast<std::size_t>(t));
  std::iota(id.begin(), id.end(), 0);
  return id;
}

FrameSequence temporal_shuffle(const FrameSequence& seq, const std::vector<int>& perm) {
  check_permutation(perm, seq.frames());
  std::vector<std::uint8_t> out;
  out.reserve(seq.bytes().size());
  for (int src : perm) {
    auto f = seq.frame(src);
    out.insert(out.end(), f.begin(), f.end());
  }
  return FrameSequence(seq.frames(), seq.height(), seq.width(), std::move(out), seq.frame_rate());
}

// --- mask generation -------------------------------------------------------------

namespace {

class MaskBuilder {
 public:
  explicit MaskBuilder(Shape3 s) : s_(s), b_(s.size(), 0), c_(s.size(), 1.0f) {}

  void set(int t, int y, int x, double c) {
    if (x < 0 || y < 0 || x >= s_.w || y >= s_.h) return;
    auto i = (static_cast<std::size_t>(t) * s_.h + y) * s_.w + x;
    b_[i] = 1;
    c_[i] = static_cast<float>(std::clamp(c, 0.0, 1.0));
  }

  MaskStack build() && { return MaskStack(s_, std::move(b_), std::move(c_)); }

 private:
  Shape3 s_;
  std::vector<std::uint8_t> b_;
  std::vector<float> c_;
};

double lattice(const CounterRng& rng, std::int64_t i, std::int64_t j) {
  auto idx = mix64(static_cast<std::uint64_t>(i)) ^ static_cast<std::uint64_t>(j);
  return static_cast<double>(rng.at(idx) >> 11) * 0x1.0p-53;
}

double value_noise(const CounterRng& rng, double u, double v) {
  double fi = std::floor(u), fj = std::floor(v);
  auto i = static_cast<std::int64_t>(fi);
  auto j = static_cast<std::int64_t>(fj);
  double fu = u - fi, fv = v - fj;
  fu = fu * fu * (3 - 2 * fu);
  fv = fv * fv * (3 - 2 * fv);
  double a = lattice(rng, i, j), b = lattice(rng, i + 1, j);
  double c = lattice(rng, i, j + 1), d = lattice(rng, i + 1, j + 1);
  return (a * (1 - fu) + b * fu) * (1 - fv) + (c * (1 - fu) + d * fu) * fv;
}

void fill_fog(MaskBuilder& m, Shape3 s, double eta, const FogParams& p, std::uint64_t seed) {
  CounterRng noise(derive_key(seed, {fnv1a("fog")}));
  for (int t = 0; t < s.t; ++t)
    for (int y = 0; y < s.h; ++y) {
      double far = 1.0 - depth_proxy(y, s.h);
      for (int x = 0; x < s.w; ++x) {
        double n = value_noise(noise, (x + p.drift * t) / p.cell, y / p.cell);
        m.set(t, y, x, 1.0 - eta * (0.3 + 0.5 * n) * (0.5 + 0.5 * far));
      }
    }
}

void fill_light(MaskBuilder& m, Shape3 s, double eta, const LightParams& p) {
  for (int t = 0; t < s.t; ++t)
    for (int y = 0; y < s.h; ++y) {
      double far = 1.0 - depth_proxy(y, s.h);
      double c = 1.0 - eta * (p.base + p.gradient * far);
      for (int x = 0; x < s.w; ++x) m.set(t, y, x, c);
    }
}

void fill_precipitation(MaskBuilder& m, Shape3 s, double eta, const PrecipitationParams& p,
                        bool snow, std::uint64_t seed) {
  CounterRng rng(derive_key(seed, {fnv1a(snow ? "snow" : "rain")}));
  const double cycle = s.h + p.length;
  const double c = snow ? 1.0 - 0.7 * eta : 1.0 - 0.5 * eta;
  for (int k = 0; k < p.count; ++k) {
    double x0 = static_cast<double>(rng.below(static_cast<std::uint64_t>(s.w)));
    double y0 = rng.uniform() * cycle;
    double sway_phase = rng.uniform();
    for (int t = 0; t < s.t; ++t) {
      double y = std::fmod(y0 + p.fall * t, cycle) - p.length;
      double dx = snow ? p.wind * tri(t / 12.0 + sway_phase) : p.wind * t;
      auto x = static_cast<int>(std::floor(x0 + dx));
      x = ((x % s.w) + s.w) % s.w;
      auto top = static_cast<int>(std::floor(y));
      for (int yy = top; yy < top + p.length; ++yy)
        for (int xx = x; xx < x + p.width; ++xx) m.set(t, yy, xx, c);
    }
  }
}

void fill_glare(MaskBuilder& m, Shape3 s, const GlareParams& g) {
  for (int y = 0; y < s.h; ++y)
    for (int x = 0; x < s.w; ++x) {
      double u = (x + 0.5 - g.cx) / g.rx, v = (y + 0.5 - g.cy) / g.ry;
      double r2 = u * u + v * v;
      if (r2 > 1.0) continue;
      for (int t = 0; t < s.t; ++t) m.set(t, y, x, 0.05 + 0.25 * r2);
    }
}

bool inside_polygon(const std::vector<std::array<double, 2>>& poly, double px, double py) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    double xi = poly[i][0], yi = poly[i][1], xj = poly[j][0], yj = poly[j][1];
    if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

void fill_shadow(MaskBuilder& m, Shape3 s, const ShadowParams& p) {
  for (int y = 0; y < s.h; ++y)
    for (int x = 0; x < s.w; ++x) {
      if (!inside_polygon(p.polygon, x + 0.5, y + 0.5)) continue;
      for (int t = 0; t < s.t; ++t) m.set(t, y, x, 1.0 - depth_proxy(y, s.h));
    }
}

void fill_camera(MaskBuilder& m, Shape3 s, PerturbationSubtype subtype, const CameraParams& p) {
  const double cx = s.w / 2.0, cy = s.h / 2.0;
  for (int t = 0; t < s.t; ++t) {
    double u = phase_position(p, t);
    double shake = (1.0 + tri(u)) / 2.0;  // [0,1]
    if (subtype == PerturbationSubtype::kTranslation) {
      auto dx = static_cast<int>(std::lround(p.amplitude_x * shake));
      auto dy = static_cast<int>(std::lround(p.amplitude_y * shake));
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x) {
          bool col = p.sign_x > 0 ? x < dx : x >= s.w - dx;
          bool row = p.sign_y > 0 ? y < dy : y >= s.h - dy;
          if (col || row) m.set(t, y, x, 0.0);
        }
    } else if (subtype == PerturbationSubtype::kZoom) {
      double scale = 1.0 - p.amplitude_x * shake;
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x)
          if (std::abs(x + 0.5 - cx) > scale * cx || std::abs(y + 0.5 - cy) > scale * cy)
            m.set(t, y, x, 0.0);
    } else {
      double angle = p.amplitude_x * tri(u);
      double cs = std::cos(angle), sn = std::sin(angle);
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x) {
          double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
          double sx = cs * dx + sn * dy + cx, sy = -sn * dx + cs * dy + cy;
          if (sx < 0 || sy < 0 || sx >= s.w || sy >= s.h) m.set(t, y, x, 0.0);
        }
    }
  }
}

void fill_occlusion(MaskBuilder& m, Shape3 s, const OcclusionParams& p) {
  for (int t = 0; t < s.t; ++t) {
    auto ox = static_cast<int>(std::lround(p.vx * t));
    auto oy = static_cast<int>(std::lround(p.vy * t));
    for (const auto& b : p.boxes)
      for (int y = std::max(0, b.y0 + oy); y < std::min(s.h, b.y1 + oy); ++y)
        for (int x = std::max(0, b.x0 + ox); x < std::min(s.w, b.x1 + ox); ++x)
          m.set(t, y, x, 0.0);
  }
}

}  // namespace

MaskStack generate_mask(const PerturbationSpec& spec) {
  validate(spec);
  const Shape3 s = spec.video_shape;
  const double eta = spec.intensity;
  MaskBuilder m(s);
  auto sub = spec.style.subtype();
  switch (sub) {
    case PerturbationSubtype::kFog:
      fill_fog(m, s, eta, std::get<FogParams>(spec.region), spec.seed);
      break;
    case PerturbationSubtype::kRain:
    case PerturbationSubtype::kSnow:
      fill_precipitation(m, s, eta, std::get<PrecipitationParams>(spec.region),
                         sub == PerturbationSubtype::kSnow, spec.seed);
      break;
    case PerturbationSubtype::kDusk:
    case PerturbationSubtype::kNight:
      fill_light(m, s, eta, std::get<LightParams>(spec.region));
      break;
    case PerturbationSubtype::kOverexposure:
      fill_glare(m, s, std::get<GlareParams>(spec.region));
      break;
    case PerturbationSubtype::kShadow:
      fill_shadow(m, s, std::get<ShadowParams>(spec.region));
      break;
    case PerturbationSubtype::kTranslation:
    case PerturbationSubtype::kZoom:
    case PerturbationSubtype::kRotation:
      fill_camera(m, s, sub, std::get<CameraParams>(spec.region));
      break;
    case PerturbationSubtype::kStaticOcclusion:
    case PerturbationSubtype::kDynamicOcclusion:
      fill_occlusion(m, s, std::get<OcclusionParams>(spec.region));
      break;
  }
  return std::move(m).build();
}

// --- application -----------------------------------------------------------------

FrameSequence apply_mask(const FrameSequence& seq, const MaskStack& mask, BlendMode mode) {
  if (mask.shape() != seq.shape()) fail(ErrorKind::kShape, "mask shape does not match sequence");
  auto in = seq.bytes();
  std::vector<std::uint8_t> out(in.size());
  auto bin = mask.binary();
  auto mod = mask.modulation();
  const double clean_factor = mode == BlendMode::kAttenuate ? 1.0 : 0.0;
  for (std::size_t p = 0; p < bin.size(); ++p) {
    double factor = bin[p] ? static_cast<double>(mod[p]) : clean_factor;
    for (std::size_t c = 0; c < FrameSequence::kChannels; ++c) {
      auto i = p * FrameSequence::kChannels + c;
      // factor <= 1 and in[i] is integral, so rounding never exceeds the input
      out[i] = static_cast<std::uint8_t>(std::lround(in[i] * factor));
    }
  }
  return FrameSequence(seq.frames(), seq.height(), seq.width(), std::move(out), seq.frame_rate());
}

FrameSequence apply_corruption(const FrameSequence& seq, const PerturbationSpec& spec) {
  return apply_corruption(seq, spec, spec.blend);
}

FrameSequence apply_corruption(const FrameSequence& seq, const PerturbationSpec& spec,
                               BlendMode mode) {
  validate(spec);
  if (spec.video_shape != seq.shape()) {
    auto s = spec.video_shape;
    fail(ErrorKind::kShape, "spec video_shape (" + std::to_string(s.t) + "," + std::to_string(s.h) +
                                "," + std::to_string(s.w) + ") does not match sequence");
  }
  auto shuffled = temporal_shuffle(seq, resolve_permutation(spec));
  return apply_mask(shuffled, generate_mask(spec), mode);
}

FrameSequence regenerate(const PerturbationSpec& spec, const FrameSequence& clean) {
  return apply_corruption(clean, spec);
}

// --- protocol --------------------------------------------------------------------

std::uint64_t CorruptionProtocol::seed_for(std::string_view video_id, const PerturbationStyle& style,
                                           std::uint64_t variant) {
  if (mode_ == ProtocolMode::kDynamic) return stream_.next_u64();
  return derive_key(fnv1a(video_id), {static_cast<std::uint64_t>(style.subtype()), variant});
}

StyleSampler::StyleSampler(std::array<double, 4> family_weights) : weights_(family_weights) {
  double total = 0;
  for (double w : weights_) {
    if (!(w >= 0) || !std::isfinite(w)) fail(ErrorKind::kValidation, "style weights must be >= 0");
    total += w;
  }
  if (!(total > 0)) fail(ErrorKind::kValidation, "style weights must not all be zero");
}

PerturbationStyle StyleSampler::sample(CounterRng& rng) const {
  double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  double u = rng.uniform() * total;
  std::size_t idx = 0;
  for (; idx + 1 < weights_.size(); ++idx) {
    if (weights_[idx] > 0 && u < weights_[idx]) break;
    u -= weights_[idx];
  }
  while (weights_[idx] <= 0) --idx;  // guard against rounding at the top end
  auto subs = subtypes_of(kAllFamilies[idx]);
  auto sub = subs[static_cast<std::size_t>(rng.below(subs.size()))];
  return PerturbationStyle(kAllFamilies[idx], sub);
}

// --- coherence -------------------------------------------------------------------

std::vector<std::optional<Centroid>> binary_centroids(const MaskStack& mask) {
  auto s = mask.shape();
  std::vector<std::optional<Centroid>> out;
  for (int t = 0; t < s.t; ++t) {
    double sx = 0, sy = 0, n = 0;
    for (int y = 0; y < s.h; ++y)
      for (int x = 0; x < s.w; ++x)
        if (mask.binary_at(t, y, x)) {
          sx += x;
          sy += y;
          n += 1;
        }
    if (n > 0)
      out.push_back(Centroid{sx / n, sy / n});
    else
      out.push_back(std::nullopt);
  }
  return out;
}

double max_centroid_step(const MaskStack& mask) {
  auto c = binary_centroids(mask);
  double worst = 0;
  for (std::size_t t = 1; t < c.size(); ++t) {
    if (!c[t] || !c[t - 1]) continue;
    worst = std::max(worst, std::hypot(c[t]->x - c[t - 1]->x, c[t]->y - c[t - 1]->y));
  }
  return worst;
}

bool binary_is_frame_invariant(const MaskStack& mask) {
  auto s = mask.shape();
  auto bin = mask.binary();
  auto n = s.pixels_per_frame();
  for (int t = 1; t < s.t; ++t)
    if (!std::equal(bin.begin(), bin.begin() + static_cast<std::ptrdiff_t>(n),
                    bin.begin() + static_cast<std::ptrdiff_t>(t * n)))
      return false;
  return true;
}

bool is_temporally_coherent(const MaskStack& mask, PerturbationSubtype subtype, double max_step) {
  if (!is_dynamic(subtype)) return binary_is_frame_invariant(mask);
  if (max_step <= 0) max_step = mask.shape().h / 8.0;
  return max_centroid_step(mask) < max_step;
}

}  // namespace rova
