#pragma once

#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/skeleton.hpp"

namespace jeanie {

// One sequence per JSON document:
// {"label": str, "joints": J, "fps": optional, "subjects": optional [[...]],
//  "frames": [[[x,y,z] x J] x T]}
SkeletonSequence sequence_from_json(const std::string& text);
std::string sequence_to_json(const SkeletonSequence& seq);

// JSON-lines corpus, one sequence per line; parse failures name the line.
std::vector<SkeletonSequence> corpus_from_jsonl(const std::string& text);
std::vector<SkeletonSequence> load_corpus(const std::string& path);
std::string corpus_to_jsonl(const std::vector<SkeletonSequence>& corpus);

SkeletonSequence load_sequence(const std::string& path);

// {"intrinsics_left": 3x3, "intrinsics_right": 3x3, "rotation": 3x3,
//  "translation": [3], "distance_m": f}
CameraModel camera_from_json(const std::string& text);
CameraModel load_camera(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace jeanie
