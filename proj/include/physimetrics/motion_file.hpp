#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "physimetrics/representation.hpp"
#include "physimetrics/types.hpp"

namespace physimetrics {

enum class PayloadKind : std::uint32_t {
  kPositions = 0,  // N x T x J x 3
  kRep = 1,        // N x T x 264
  kMarkers = 2,    // N x T x 67 x 3
};

/// On-disk motion container.  Binary files carry magic "PHYM", a u32
/// version, a fixed header, and a little-endian f32 payload whose length
/// must match the declared shapes exactly.  Files named *.json use an
/// equivalent JSON encoding.
struct MotionFile {
  std::uint32_t version = 1;
  PayloadKind kind = PayloadKind::kPositions;
  int joints = 22;
  int frames = 0;
  int persons = 1;
  double fps = 20.0;
  char up_axis = 'z';
  std::optional<std::string> text;
  std::vector<float> payload;  // persons * frames * width(), C order

  int width() const {
    switch (kind) {
      case PayloadKind::kRep:
        return MotionRep::kFrameWidth;
      case PayloadKind::kMarkers:
        return 67 * 3;
      default:
        return joints * 3;
    }
  }
  std::size_t expected_payload_size() const {
    return static_cast<std::size_t>(persons) * frames * width();
  }
};

/// Sniffs the magic to pick binary vs JSON decoding.  Throws ParseError
/// (naming file and byte offset) or InvariantViolation.
MotionFile read_motion_file(const std::string& path);

/// Binary unless the path ends in .json.  Write -> read is bit-exact.
void write_motion_file(const std::string& path, const MotionFile& f);

MotionFile motion_file_from_positions(const std::vector<PointMatrix>& persons, int frames,
                                      double fps, int joints);
MotionFile motion_file_from_clip(const InteractionClip& clip);

/// Extracts per-person positions, converting a y-up payload to canonical
/// z-up.  force_y_up overrides the header axis (ingestion flag).  Throws
/// InvariantViolation for non-position payloads when conversion is forced.
std::vector<PointMatrix> positions_from_motion_file(const MotionFile& f,
                                                    bool force_y_up = false);

/// Decodes a rep payload into a clip.  Throws InvariantViolation on other
/// payload kinds or non-canonical joint counts.
InteractionClip clip_from_motion_file(const MotionFile& f);

/// Rotates a y-up point into the canonical z-up frame: (x, y, z) -> (x, -z, y).
inline Vec3 y_up_to_z_up(const Vec3& p) { return Vec3(p.x(), -p.z(), p.y()); }

}  // namespace physimetrics
