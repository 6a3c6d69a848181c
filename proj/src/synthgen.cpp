#include "mcpad/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mcpad/rng.hpp"

namespace mcpad {

const char *to_string(SceneClass cls) {
  switch (cls) {
    case SceneClass::bonafide: return "bonafide";
    case SceneClass::print: return "print";
    case SceneClass::replay: return "replay";
    case SceneClass::rigid_mask: return "rigid-mask";
    case SceneClass::flexible_mask: return "flexible-mask";
    case SceneClass::fake_head: return "fake-head";
    case SceneClass::paper_mask: return "paper-mask";
    default: return "glasses";
  }
}

SceneClass scene_class_from_string(const std::string &s) {
  if (s == "bonafide") return SceneClass::bonafide;
  if (s == "print") return SceneClass::print;
  if (s == "replay") return SceneClass::replay;
  if (s == "rigid-mask") return SceneClass::rigid_mask;
  if (s == "flexible-mask") return SceneClass::flexible_mask;
  if (s == "fake-head") return SceneClass::fake_head;
  if (s == "paper-mask") return SceneClass::paper_mask;
  if (s == "glasses") return SceneClass::glasses;
  throw corrupt_input_error("unknown scene class '" + s + "'");
}

namespace {

// Per-class channel response. A 2D attack is a rectangular card/screen:
// flat depth and uniform infrared filling the whole face box. Bonafide
// and 3D attacks carry an elliptical depth dome protruding toward the
// camera; infrared is a material base level with a radial falloff.
struct ClassProfile {
  bool flat_depth;
  double dome_amplitude;  // raw depth units, 3D classes
  double plane_tilt;      // raw depth units across the card, 2D classes
  double ir_base;
  double ir_falloff;
  bool periocular_band;
};

ClassProfile profile_for(SceneClass cls) {
  switch (cls) {
    case SceneClass::bonafide:      return {false, 2000.0, 0.0, 20400.0, 1000.0, false};
    case SceneClass::print:         return {true, 0.0, 130.0, 19900.0, 150.0, false};
    case SceneClass::replay:        return {true, 0.0, 60.0, 15500.0, -150.0, false};
    case SceneClass::rigid_mask:    return {false, 1800.0, 0.0, 19150.0, 400.0, false};
    case SceneClass::flexible_mask: return {false, 1900.0, 0.0, 19600.0, 500.0, false};
    case SceneClass::fake_head:     return {false, 2100.0, 0.0, 18800.0, 300.0, false};
    case SceneClass::paper_mask:    return {false, 1700.0, 0.0, 19300.0, 250.0, false};
    default:                        return {false, 2000.0, 0.0, 20400.0, 800.0, true};
  }
}

// The background spreads are wide, and the classes whose margins are
// tight (bonafide vs the warmer masks and prints) sit at deviations close
// to the background's median absolute deviation: the per-frame MAD then
// barely moves with face size, so their normalized signatures stay put.
// Classes far out in either direction (replay, the glasses band) can
// afford the residual scale wobble.
constexpr double kBackgroundDepth = 42000.0;
constexpr double kDepthRowGradient = 40.0;
constexpr double kFaceDepthBase = 41400.0;
// Held artifacts sit visibly shy of where a real head's surface would:
// the anchor-mean depth then separates 2D attacks from domes even where
// the variance signal is diluted.
constexpr double kCardDepth = 41300.0;
constexpr double kBackgroundIr = 19000.0;
constexpr double kIrColGradient = 31.0;
constexpr double kGlassesBandIr = 15000.0;  // IR-opaque band across the eyes
constexpr double kGlassesBandHalfHeight = 0.35;  // fraction of face half-height
constexpr double kDepthIrNoiseScale = 32.0;  // 8-bit knob -> 16-bit raw units
// Sparse exact-zero depth holes: enough to exercise the nonzero-mask
// statistics downstream without drowning region variances in speckle.
constexpr int kHoleDivisor = 2000;

std::uint16_t clamp_u16_nonzero(double v) {
  return static_cast<std::uint16_t>(std::clamp(v, 1.0, 65535.0));
}

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0) + 0.5);
}

}  // namespace

GeneratedScene generate_scene(const SceneSpec &spec) {
  if (!spec.face_box.valid() || spec.face_box.x_min < 0 ||
      spec.face_box.y_min < 0 ||
      spec.face_box.x_max > spec.image_width ||
      spec.face_box.y_max > spec.image_height)
    throw error("generate_scene: face box must lie inside the image");

  const int w = spec.image_width;
  const int h = spec.image_height;
  const ClassProfile prof = profile_for(spec.cls);
  const BBox &fb = spec.face_box;
  const double fcx = fb.center_x();
  const double fcy = fb.center_y();
  const double rx = fb.width() / 2.0;
  const double ry = fb.height() / 2.0;
  const double eye_y = fcy - 0.15 * ry;
  const double eye_dx = 0.38 * rx;
  const double eye_r = 0.16 * std::min(rx, ry);
  const double depth_noise = spec.noise * kDepthIrNoiseScale;

  Rng rng(spec.seed);
  GeneratedScene out;
  out.cls = spec.cls;
  out.face_box = fb;
  out.frame.depth = RawChannel16(w, h);
  out.frame.ir = RawChannel16(w, h);
  out.frame.color = RgbImage(w, h);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5;
      const double py = y + 0.5;
      const double nx = (px - fcx) / rx;
      const double ny = (py - fcy) / ry;
      const double rho2 = nx * nx + ny * ny;
      const bool in_ellipse = rho2 <= 1.0;
      const bool in_box = px >= fb.x_min && px < fb.x_max && py >= fb.y_min &&
                          py < fb.y_max;
      // 2D artifacts occupy the full rectangular box, heads the ellipse.
      const bool on_surface = prof.flat_depth ? in_box : in_ellipse;

      // Depth: background plane with a vertical gradient; the face is
      // either a dome rising toward the camera or a flat card/screen.
      double depth = kBackgroundDepth + kDepthRowGradient * (y - h / 2.0);
      if (on_surface) {
        if (prof.flat_depth)
          depth = kCardDepth + prof.plane_tilt * nx;
        else
          depth = kFaceDepthBase - prof.dome_amplitude * std::sqrt(1.0 - rho2);
      }
      depth += rng.normal(0.0, depth_noise);
      out.frame.depth.at(x, y) = clamp_u16_nonzero(depth);

      // Infrared: ambient gradient outside, material signature inside.
      double ir = kBackgroundIr + kIrColGradient * (x - w / 2.0);
      if (on_surface) {
        ir = prof.ir_base - prof.ir_falloff * std::min(rho2, 1.0);
        if (prof.periocular_band &&
            std::abs(py - eye_y) <= kGlassesBandHalfHeight * ry)
          ir = kGlassesBandIr;
      }
      ir += rng.normal(0.0, depth_noise);
      out.frame.ir.at(x, y) = clamp_u16_nonzero(ir);

      // Color: every class looks like a face. Shaded skin ellipse with
      // dark eye disks over a textured background.
      double r = 96.0, g = 92.0, b = 88.0;
      if (in_ellipse) {
        const double shade = 1.0 - 0.25 * rho2;
        r = 204.0 * shade;
        g = 168.0 * shade;
        b = 148.0 * shade;
        const double dl = std::hypot(px - (fcx - eye_dx), py - eye_y);
        const double dr = std::hypot(px - (fcx + eye_dx), py - eye_y);
        if (dl <= eye_r || dr <= eye_r) {
          r -= 90.0;
          g -= 80.0;
          b -= 70.0;
        }
        if (prof.periocular_band &&
            std::abs(py - eye_y) <= kGlassesBandHalfHeight * ry) {
          r -= 85.0;
          g -= 85.0;
          b -= 80.0;
        }
      }
      const double cn = rng.normal(0.0, spec.noise);
      out.frame.color.set(x, y, clamp_u8(r + cn), clamp_u8(g + cn),
                          clamp_u8(b + cn));
    }
  }

  // Background depth holes: exact zeros, as real sensors produce. Kept out
  // of the face box so the box-variance rule below stays meaningful.
  const int n_holes = (w * h) / kHoleDivisor;
  for (int k = 0; k < n_holes; ++k) {
    const int x = static_cast<int>(rng.uniform_int(0, w - 1));
    const int y = static_cast<int>(rng.uniform_int(0, h - 1));
    const double px = x + 0.5, py = y + 0.5;
    if (px >= fb.x_min && px < fb.x_max && py >= fb.y_min && py < fb.y_max)
      continue;
    out.frame.depth.at(x, y) = 0;
  }
  return out;
}

double depth_variance_in_box(const RawFrame &frame, const BBox &box) {
  const int x0 = std::max(0, static_cast<int>(std::floor(box.x_min)));
  const int y0 = std::max(0, static_cast<int>(std::floor(box.y_min)));
  const int x1 = std::min(frame.depth.width, static_cast<int>(std::ceil(box.x_max)));
  const int y1 = std::min(frame.depth.height, static_cast<int>(std::ceil(box.y_max)));
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const double v = frame.depth.at(x, y);
      if (v == 0.0) continue;
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  if (n == 0) return 0.0;
  const double mean = sum / static_cast<double>(n);
  return std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
}

// ---------------------------------------------------------------------------
// Dataset generation

namespace {

constexpr const char *kManifestHeader =
    "id,split,class,x_min,y_min,x_max,y_max,seed";

SceneClass attack_class(int k) {
  static constexpr SceneClass kAttacks[kAttackClassCount] = {
      SceneClass::print,        SceneClass::replay,
      SceneClass::rigid_mask,   SceneClass::flexible_mask,
      SceneClass::fake_head,    SceneClass::paper_mask,
      SceneClass::glasses,
  };
  return kAttacks[k % kAttackClassCount];
}

std::string make_id(Split split, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d", to_string(split), index);
  return buf;
}

}  // namespace

std::vector<ManifestRow> generate_dataset(const GenConfig &cfg,
                                          const std::filesystem::path &out_dir) {
  if (cfg.image_size < 32) throw config_error("gen: image_size must be >= 32");
  if (cfg.train_count <= 0 || cfg.dev_count <= 0 || cfg.eval_count <= 0)
    throw config_error("gen: split counts must be positive");
  if (cfg.bonafide_fraction <= 0.0 || cfg.bonafide_fraction >= 1.0)
    throw config_error("gen: bonafide_fraction must be in (0,1)");
  if (cfg.noise < 0.0) throw config_error("gen: noise must be >= 0");

  std::filesystem::create_directories(out_dir / "frames");

  const Split splits[3] = {Split::train, Split::dev, Split::eval};
  const int counts[3] = {cfg.train_count, cfg.dev_count, cfg.eval_count};

  std::vector<ManifestRow> rows;
  for (int si = 0; si < 3; ++si) {
    int attack_cursor = 0;
    for (int i = 0; i < counts[si]; ++i) {
      // Bresenham-style interleave hits round(count * fraction) exactly.
      const double f = cfg.bonafide_fraction;
      const bool bona = std::floor((i + 1) * f) > std::floor(i * f);

      ManifestRow row;
      row.id = make_id(splits[si], i);
      row.split = splits[si];
      row.cls = bona ? SceneClass::bonafide : attack_class(attack_cursor++);
      row.seed = mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(si)),
                          static_cast<std::uint64_t>(i));

      // Face placement from its own stream so scene content stays a pure
      // function of (seed, class, box).
      Rng place(mix_seed(row.seed, 0xb0f5));
      const double size = place.uniform(40.0, 76.0);
      const double ratio = place.uniform(1.0, 1.3);
      const double bw = size / std::sqrt(ratio);
      const double bh = size * std::sqrt(ratio);
      const double margin = 2.0;
      const double cx =
          place.uniform(bw / 2.0 + margin, cfg.image_size - bw / 2.0 - margin);
      const double cy =
          place.uniform(bh / 2.0 + margin, cfg.image_size - bh / 2.0 - margin);
      row.box = {cx - bw / 2.0, cy - bh / 2.0, cx + bw / 2.0, cy + bh / 2.0};

      SceneSpec spec;
      spec.cls = row.cls;
      spec.face_box = row.box;
      spec.noise = cfg.noise;
      spec.seed = row.seed;
      spec.image_width = cfg.image_size;
      spec.image_height = cfg.image_size;
      const GeneratedScene scene = generate_scene(spec);

      save_mc16(frame_path(out_dir, row.id, "color"), scene.frame.color);
      save_mc16(frame_path(out_dir, row.id, "depth"), scene.frame.depth);
      save_mc16(frame_path(out_dir, row.id, "ir"), scene.frame.ir);
      rows.push_back(std::move(row));
    }
  }
  write_manifest(out_dir / "manifest.csv", rows);
  return rows;
}

void write_manifest(const std::filesystem::path &path,
                    const std::vector<ManifestRow> &rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw data_error("cannot open for writing: " + path.string());
  os << kManifestHeader << "\n";
  char buf[192];
  for (const ManifestRow &r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g,%.17g,%.17g,%.17g,%llu",
                  r.id.c_str(), to_string(r.split), to_string(r.cls),
                  r.box.x_min, r.box.y_min, r.box.x_max, r.box.y_max,
                  static_cast<unsigned long long>(r.seed));
    os << buf << "\n";
  }
  if (!os) throw data_error("write failed: " + path.string());
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open manifest: " + path.string());
  std::string line;
  if (!std::getline(is, line) ||
      (line != kManifestHeader && line != std::string(kManifestHeader) + "\r"))
    throw corrupt_input_error("manifest: bad header in " + path.string());

  std::vector<ManifestRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() != 8)
      throw corrupt_input_error("manifest line " + std::to_string(line_no) +
                                ": expected 8 fields");
    ManifestRow r;
    r.id = f[0];
    if (f[1] == "train")
      r.split = Split::train;
    else if (f[1] == "dev")
      r.split = Split::dev;
    else if (f[1] == "eval")
      r.split = Split::eval;
    else
      throw corrupt_input_error("manifest line " + std::to_string(line_no) +
                                ": bad split '" + f[1] + "'");
    r.cls = scene_class_from_string(f[2]);
    try {
      r.box = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6])};
      r.seed = std::stoull(f[7]);
    } catch (const std::exception &) {
      throw corrupt_input_error("manifest line " + std::to_string(line_no) +
                                ": bad numeric field");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::filesystem::path frame_path(const std::filesystem::path &data_dir,
                                 const std::string &id, const char *channel) {
  return data_dir / "frames" / (id + "_" + channel + ".mc16");
}

RawFrame load_frame(const std::filesystem::path &data_dir,
                    const std::string &id) {
  RawFrame f;
  f.color = load_mc16_rgb(frame_path(data_dir, id, "color"));
  f.depth = load_mc16_channel16(frame_path(data_dir, id, "depth"));
  f.ir = load_mc16_channel16(frame_path(data_dir, id, "ir"));
  return f;
}

}  // namespace mcpad
