#include "core/sequence_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "core/canonical_json.hpp"
#include "core/error.hpp"
#include "json.hpp"

namespace jeanie {

namespace {
using nlohmann::json;

SkeletonSequence sequence_from_parsed(const json& doc) {
  require(doc.is_object(), ErrorCode::Format, "sequence document must be a JSON object");
  require(doc.contains("frames") && doc["frames"].is_array(), ErrorCode::Format,
          "sequence document needs a 'frames' array");
  const auto& frames = doc["frames"];
  require(!frames.empty(), ErrorCode::Format, "sequence has no frames");

  const int t_count = static_cast<int>(frames.size());
  require(frames[0].is_array() && !frames[0].empty(), ErrorCode::Format,
          "each frame must be a nonempty array of joints");
  const int j_count = static_cast<int>(frames[0].size());

  if (doc.contains("joints")) {
    require(doc["joints"].is_number_integer() && doc["joints"].get<int>() == j_count,
            ErrorCode::Format, "'joints' does not match the per-frame joint count");
  }

  SkeletonSequence seq = SkeletonSequence::zeros(t_count, j_count);
  if (doc.contains("label")) {
    require(doc["label"].is_string(), ErrorCode::Format, "'label' must be a string");
    seq.label = doc["label"].get<std::string>();
  }
  for (int t = 0; t < t_count; ++t) {
    const auto& frame = frames[t];
    require(frame.is_array() && static_cast<int>(frame.size()) == j_count, ErrorCode::Format,
            "frame " + std::to_string(t) + " has an inconsistent joint count");
    for (int j = 0; j < j_count; ++j) {
      const auto& joint = frame[j];
      require(joint.is_array() && joint.size() == 3, ErrorCode::Format,
              "each joint must be an [x,y,z] triple");
      for (int c = 0; c < 3; ++c) {
        require(joint[c].is_number(), ErrorCode::Format, "joint coordinates must be numbers");
        const double v = joint[c].get<double>();
        require(std::isfinite(v), ErrorCode::Format, "joint coordinates must be finite");
        seq.at(t, j, c) = v;
      }
    }
  }
  if (doc.contains("subjects") && !doc["subjects"].is_null()) {
    require(doc["subjects"].is_array(), ErrorCode::Format, "'subjects' must be an array of arrays");
    for (const auto& part : doc["subjects"]) {
      require(part.is_array() && !part.empty(), ErrorCode::Format,
              "each subject partition must be a nonempty array");
      std::vector<int> indices;
      for (const auto& v : part) {
        require(v.is_number_integer(), ErrorCode::Format, "subject indices must be integers");
        const int idx = v.get<int>();
        require(idx >= 0 && idx < j_count, ErrorCode::Format, "subject index out of range");
        indices.push_back(idx);
      }
      seq.subjects.push_back(std::move(indices));
    }
  }
  return seq;
}

Eigen::Matrix3d matrix3_from(const json& arr, const std::string& name) {
  require(arr.is_array() && arr.size() == 3, ErrorCode::Format, name + " must be a 3x3 array");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    require(arr[r].is_array() && arr[r].size() == 3, ErrorCode::Format, name + " must be a 3x3 array");
    for (int c = 0; c < 3; ++c) {
      require(arr[r][c].is_number(), ErrorCode::Format, name + " entries must be numbers");
      m(r, c) = arr[r][c].get<double>();
    }
  }
  return m;
}

json parse_or_format_error(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  require(!doc.is_discarded(), ErrorCode::Format, "invalid JSON in " + what);
  return doc;
}

}  // namespace

SkeletonSequence sequence_from_json(const std::string& text) {
  return sequence_from_parsed(parse_or_format_error(text, "sequence document"));
}

std::string sequence_to_json(const SkeletonSequence& seq) {
  JsonValue doc = JsonValue::object();
  doc["label"] = seq.label;
  doc["joints"] = seq.joints;
  JsonValue frames = JsonValue::array();
  for (int t = 0; t < seq.frames; ++t) {
    JsonValue frame = JsonValue::array();
    for (int j = 0; j < seq.joints; ++j) {
      JsonValue joint = JsonValue::array();
      for (int c = 0; c < 3; ++c) joint.push_back(seq.at(t, j, c));
      frame.push_back(std::move(joint));
    }
    frames.push_back(std::move(frame));
  }
  doc["frames"] = std::move(frames);
  if (!seq.subjects.empty()) {
    JsonValue subjects = JsonValue::array();
    for (const auto& part : seq.subjects) {
      JsonValue p = JsonValue::array();
      for (int idx : part) p.push_back(idx);
      subjects.push_back(std::move(p));
    }
    doc["subjects"] = std::move(subjects);
  }
  return doc.dump();
}

std::vector<SkeletonSequence> corpus_from_jsonl(const std::string& text) {
  std::vector<SkeletonSequence> corpus;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc = json::parse(line, nullptr, false);
    require(!doc.is_discarded(), ErrorCode::Format,
            "invalid JSON on line " + std::to_string(line_no));
    try {
      corpus.push_back(sequence_from_parsed(doc));
    } catch (const Error& e) {
      raise(ErrorCode::Format, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  require(!corpus.empty(), ErrorCode::Format, "corpus file holds no sequences");
  return corpus;
}

std::string corpus_to_jsonl(const std::vector<SkeletonSequence>& corpus) {
  std::string out;
  for (const auto& seq : corpus) {
    out += sequence_to_json(seq);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot write file: " + path);
  out << content;
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

std::vector<SkeletonSequence> load_corpus(const std::string& path) {
  return corpus_from_jsonl(read_file(path));
}

SkeletonSequence load_sequence(const std::string& path) {
  return sequence_from_json(read_file(path));
}

CameraModel camera_from_json(const std::string& text) {
  const json doc = parse_or_format_error(text, "camera document");
  require(doc.is_object(), ErrorCode::Format, "camera document must be a JSON object");
  CameraModel cam;
  if (doc.contains("intrinsics_left")) cam.intrinsics_left = matrix3_from(doc["intrinsics_left"], "intrinsics_left");
  if (doc.contains("intrinsics_right")) cam.intrinsics_right = matrix3_from(doc["intrinsics_right"], "intrinsics_right");
  if (doc.contains("rotation")) cam.rotation = matrix3_from(doc["rotation"], "rotation");
  if (doc.contains("translation")) {
    const auto& t = doc["translation"];
    require(t.is_array() && t.size() == 3, ErrorCode::Format, "translation must be a 3-vector");
    for (int i = 0; i < 3; ++i) {
      require(t[i].is_number(), ErrorCode::Format, "translation entries must be numbers");
      cam.translation(i) = t[i].get<double>();
    }
  }
  if (doc.contains("distance_m")) {
    require(doc["distance_m"].is_number(), ErrorCode::Format, "distance_m must be a number");
    cam.distance_m = doc["distance_m"].get<double>();
    require(cam.distance_m > 0.0, ErrorCode::Format, "distance_m must be positive");
  }
  return cam;
}

CameraModel load_camera(const std::string& path) { return camera_from_json(read_file(path)); }

}  // namespace jeanie
