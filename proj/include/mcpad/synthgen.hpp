#ifndef MCPAD_SYNTHGEN_HPP
#define MCPAD_SYNTHGEN_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mcpad/geometry.hpp"
#include "mcpad/image.hpp"
#include "mcpad/metrics.hpp"

namespace mcpad {

// Presentation classes, one bonafide plus the seven attack categories.
enum class SceneClass {
  bonafide,
  print,
  replay,
  rigid_mask,
  flexible_mask,
  fake_head,
  paper_mask,
  glasses,
};

inline constexpr int kAttackClassCount = 7;

const char *to_string(SceneClass cls);
SceneClass scene_class_from_string(const std::string &s);
inline bool is_attack(SceneClass cls) { return cls != SceneClass::bonafide; }

// Recipe for one synthetic capture. noise is a Gaussian std in 8-bit
// intensity units; the 16-bit channels apply noise * 32 in raw units.
struct SceneSpec {
  SceneClass cls = SceneClass::bonafide;
  BBox face_box;
  double noise = 2.0;
  std::uint64_t seed = 0;
  int image_width = 128;
  int image_height = 128;
};

struct GeneratedScene {
  RawFrame frame;
  BBox face_box;
  SceneClass cls = SceneClass::bonafide;
};

// Deterministic scene synthesis. All classes share a face-like color
// appearance; class identity lives in the depth and infrared channels:
// bonafide and 3D attacks carry a protruding depth dome, 2D attacks a
// planar surface; infrared reflectance levels differ per material; the
// glasses attack is bonafide-like with a periocular infrared band.
// Background depth contains exact-zero holes (outside the face box only).
GeneratedScene generate_scene(const SceneSpec &spec);

// Population variance of nonzero depth pixels under the box. This is the
// hand-written 2D-vs-3D rule used to guard generation quality.
double depth_variance_in_box(const RawFrame &frame, const BBox &box);

struct GenConfig {
  int image_size = 128;
  int train_count = 200;
  int dev_count = 100;
  int eval_count = 100;
  double bonafide_fraction = 0.5;  // remaining mass split over attack types
  double noise = 2.0;
  std::uint64_t seed = 7;
};

struct ManifestRow {
  std::string id;
  Split split = Split::train;
  SceneClass cls = SceneClass::bonafide;
  BBox box;
  std::uint64_t seed = 0;
};

// Writes frames/<id>_{color,depth,ir}.mc16 plus manifest.csv under
// out_dir. Scene seeds are derived per (split, index) from the global
// seed, so splits never share frames. Returns the manifest rows.
std::vector<ManifestRow> generate_dataset(const GenConfig &cfg,
                                          const std::filesystem::path &out_dir);

void write_manifest(const std::filesystem::path &path,
                    const std::vector<ManifestRow> &rows);
std::vector<ManifestRow> read_manifest(const std::filesystem::path &path);

// Frame file paths for a manifest row.
std::filesystem::path frame_path(const std::filesystem::path &data_dir,
                                 const std::string &id, const char *channel);

// Loads the three channel files of one sample.
RawFrame load_frame(const std::filesystem::path &data_dir,
                    const std::string &id);

}  // namespace mcpad

#endif  // MCPAD_SYNTHGEN_HPP
