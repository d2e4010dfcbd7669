#include "physimetrics/motion_file.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "physimetrics/errors.hpp"

namespace physimetrics {

namespace {

constexpr char kMagic[4] = {'P', 'H', 'Y', 'M'};
constexpr std::uint32_t kVersion = 1;

// Little-endian scalar IO.  The header is fixed-width; payload is f32.
template <typename T>
void put_le(std::string* out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out->append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const std::string& data, std::size_t* offset, const std::string& path) {
  if (*offset + sizeof(T) > data.size()) {
    throw ParseError(path + ": byte " + std::to_string(*offset) + ": truncated header");
  }
  T value;
  std::memcpy(&value, data.data() + *offset, sizeof(T));
  *offset += sizeof(T);
  return value;
}

void validate_header(const MotionFile& f, const std::string& path) {
  if (f.version != kVersion) {
    throw ParseError(path + ": unsupported format version " + std::to_string(f.version));
  }
  if (f.kind != PayloadKind::kPositions && f.kind != PayloadKind::kRep &&
      f.kind != PayloadKind::kMarkers) {
    throw ParseError(path + ": unknown payload kind");
  }
  if (f.frames < 1 || f.persons < 1 || f.joints < 1) {
    throw InvariantViolation(path + ": non-positive shape in header");
  }
  if (f.kind == PayloadKind::kRep && f.joints != MotionRep::kCanonicalJoints) {
    throw InvariantViolation(path + ": rep payloads require 22 joints");
  }
  if (!(f.fps > 0.0)) {
    throw InvariantViolation(path + ": fps must be positive");
  }
  if (f.up_axis != 'z' && f.up_axis != 'y') {
    throw InvariantViolation(path + ": up_axis must be 'z' or 'y'");
  }
}

MotionFile read_binary(const std::string& data, const std::string& path) {
  std::size_t offset = 4;  // magic already checked
  MotionFile f;
  f.version = get_le<std::uint32_t>(data, &offset, path);
  f.kind = static_cast<PayloadKind>(get_le<std::uint32_t>(data, &offset, path));
  f.joints = static_cast<int>(get_le<std::uint32_t>(data, &offset, path));
  f.frames = static_cast<int>(get_le<std::uint32_t>(data, &offset, path));
  f.persons = static_cast<int>(get_le<std::uint32_t>(data, &offset, path));
  f.fps = get_le<float>(data, &offset, path);
  f.up_axis = static_cast<char>(get_le<std::uint8_t>(data, &offset, path));
  offset += 3;  // padding
  const auto text_len = get_le<std::uint32_t>(data, &offset, path);
  if (text_len > 0) {
    if (offset + text_len > data.size()) {
      throw ParseError(path + ": byte " + std::to_string(offset) + ": truncated text field");
    }
    f.text = data.substr(offset, text_len);
    offset += text_len;
  }
  validate_header(f, path);

  const std::size_t expected_bytes = f.expected_payload_size() * sizeof(float);
  if (data.size() - offset != expected_bytes) {
    throw ParseError(path + ": byte " + std::to_string(offset) + ": payload is " +
                     std::to_string(data.size() - offset) + " bytes, header declares " +
                     std::to_string(expected_bytes));
  }
  f.payload.resize(f.expected_payload_size());
  std::memcpy(f.payload.data(), data.data() + offset, expected_bytes);
  return f;
}

MotionFile read_json(const std::string& data, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(data);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  MotionFile f;
  try {
    f.version = j.at("version").get<std::uint32_t>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "positions") {
      f.kind = PayloadKind::kPositions;
    } else if (kind == "rep") {
      f.kind = PayloadKind::kRep;
    } else if (kind == "markers") {
      f.kind = PayloadKind::kMarkers;
    } else {
      throw ParseError(path + ": unknown payload kind \"" + kind + "\"");
    }
    f.joints = j.at("joints").get<int>();
    f.frames = j.at("frames").get<int>();
    f.persons = j.at("persons").get<int>();
    f.fps = j.at("fps").get<double>();
    f.up_axis = j.at("up_axis").get<std::string>().at(0);
    if (j.contains("text") && !j["text"].is_null()) {
      f.text = j["text"].get<std::string>();
    }
    validate_header(f, path);
    const auto& payload = j.at("payload");
    if (!payload.is_array() || payload.size() != f.expected_payload_size()) {
      throw ParseError(path + ": payload length " + std::to_string(payload.size()) +
                       " does not match declared shapes (" +
                       std::to_string(f.expected_payload_size()) + ")");
    }
    f.payload.reserve(payload.size());
    for (const auto& v : payload) {
      f.payload.push_back(v.get<float>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return f;
}

bool has_json_suffix(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

}  // namespace

MotionFile read_motion_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  if (data.size() >= 4 && std::memcmp(data.data(), kMagic, 4) == 0) {
    return read_binary(data, path);
  }
  // Not the binary magic: anything else must parse as the JSON encoding.
  return read_json(data, path);
}

void write_motion_file(const std::string& path, const MotionFile& f) {
  validate_header(f, path);
  if (f.payload.size() != f.expected_payload_size()) {
    throw InvariantViolation(path + ": payload size disagrees with header shapes");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ParseError(path + ": cannot open file for writing");
  }
  if (has_json_suffix(path)) {
    nlohmann::json j;
    j["version"] = f.version;
    j["kind"] = f.kind == PayloadKind::kPositions ? "positions"
                : f.kind == PayloadKind::kRep     ? "rep"
                                                  : "markers";
    j["joints"] = f.joints;
    j["frames"] = f.frames;
    j["persons"] = f.persons;
    j["fps"] = f.fps;
    j["up_axis"] = std::string(1, f.up_axis);
    if (f.text) j["text"] = *f.text;
    j["payload"] = f.payload;
    out << j.dump(2) << "\n";
    return;
  }
  std::string data;
  data.append(kMagic, 4);
  put_le<std::uint32_t>(&data, f.version);
  put_le<std::uint32_t>(&data, static_cast<std::uint32_t>(f.kind));
  put_le<std::uint32_t>(&data, static_cast<std::uint32_t>(f.joints));
  put_le<std::uint32_t>(&data, static_cast<std::uint32_t>(f.frames));
  put_le<std::uint32_t>(&data, static_cast<std::uint32_t>(f.persons));
  put_le<float>(&data, static_cast<float>(f.fps));
  put_le<std::uint8_t>(&data, static_cast<std::uint8_t>(f.up_axis));
  data.append(3, '\0');
  const std::string text = f.text.value_or("");
  put_le<std::uint32_t>(&data, static_cast<std::uint32_t>(text.size()));
  data += text;
  data.append(reinterpret_cast<const char*>(f.payload.data()),
              f.payload.size() * sizeof(float));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

MotionFile motion_file_from_positions(const std::vector<PointMatrix>& persons, int frames,
                                      double fps, int joints) {
  MotionFile f;
  f.kind = PayloadKind::kPositions;
  f.joints = joints;
  f.frames = frames;
  f.persons = static_cast<int>(persons.size());
  f.fps = fps;
  f.payload.reserve(f.expected_payload_size());
  for (const auto& p : persons) {
    if (p.rows() != static_cast<Eigen::Index>(frames) * joints) {
      throw ShapeMismatch("motion_file_from_positions: person shape disagrees");
    }
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (int c = 0; c < 3; ++c) {
        f.payload.push_back(static_cast<float>(p(i, c)));
      }
    }
  }
  return f;
}

MotionFile motion_file_from_clip(const InteractionClip& clip) {
  clip.validate();
  MotionFile f;
  f.kind = PayloadKind::kRep;
  f.joints = MotionRep::kCanonicalJoints;
  f.frames = clip.frames();
  f.persons = static_cast<int>(clip.persons.size());
  f.fps = clip.fps();
  f.text = clip.text;
  f.payload.reserve(f.expected_payload_size());
  for (const auto& person : clip.persons) {
    if (person.joints != MotionRep::kCanonicalJoints) {
      throw InvariantViolation("motion_file_from_clip: rep payloads require 22 joints");
    }
    const auto flat = flatten_rep(person);
    for (Eigen::Index t = 0; t < flat.rows(); ++t) {
      for (Eigen::Index c = 0; c < flat.cols(); ++c) {
        f.payload.push_back(static_cast<float>(flat(t, c)));
      }
    }
  }
  return f;
}

std::vector<PointMatrix> positions_from_motion_file(const MotionFile& f, bool force_y_up) {
  const bool convert = force_y_up || f.up_axis == 'y';
  if (f.kind != PayloadKind::kPositions && f.kind != PayloadKind::kMarkers) {
    if (convert) {
      throw InvariantViolation("up-axis conversion is only supported for position payloads");
    }
  }
  int joints = f.joints;
  std::size_t width = 0;
  std::size_t stride = 3;
  std::size_t offset0 = 0;
  switch (f.kind) {
    case PayloadKind::kPositions:
      width = static_cast<std::size_t>(f.joints) * 3;
      break;
    case PayloadKind::kMarkers:
      joints = 67;
      width = 67 * 3;
      break;
    case PayloadKind::kRep:
      // The position block leads each 264-wide frame.
      width = MotionRep::kFrameWidth;
      joints = MotionRep::kCanonicalJoints;
      break;
  }
  std::vector<PointMatrix> out;
  out.reserve(f.persons);
  for (int n = 0; n < f.persons; ++n) {
    PointMatrix p(static_cast<Eigen::Index>(f.frames) * joints, 3);
    for (int t = 0; t < f.frames; ++t) {
      const std::size_t frame_base =
          (static_cast<std::size_t>(n) * f.frames + t) * width + offset0;
      for (int j = 0; j < joints; ++j) {
        Vec3 v(f.payload[frame_base + j * stride],
               f.payload[frame_base + j * stride + 1],
               f.payload[frame_base + j * stride + 2]);
        if (convert) v = y_up_to_z_up(v);
        p.row(flat_index(t, j, joints)) = v.transpose();
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

InteractionClip clip_from_motion_file(const MotionFile& f) {
  if (f.kind != PayloadKind::kRep) {
    throw InvariantViolation("clip_from_motion_file: expected a rep payload");
  }
  InteractionClip clip;
  clip.text = f.text;
  const int T = f.frames;
  const int W = MotionRep::kFrameWidth;
  for (int n = 0; n < f.persons; ++n) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> flat(T, W);
    for (int t = 0; t < T; ++t) {
      const std::size_t base = (static_cast<std::size_t>(n) * T + t) * W;
      for (int c = 0; c < W; ++c) {
        flat(t, c) = f.payload[base + c];
      }
    }
    MotionRep rep = unflatten_rep(flat, f.fps);
    clip.persons.push_back(std::move(rep));
  }
  clip.validate();
  return clip;
}

}  // namespace physimetrics
