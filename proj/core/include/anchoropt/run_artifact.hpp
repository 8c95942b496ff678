#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anchoropt/embedding_space.hpp"
#include "anchoropt/optimizer.hpp"

namespace anchoropt {

inline constexpr int kArtifactMajorVersion = 1;
inline constexpr int kArtifactMinorVersion = 0;

// Self-describing result of one optimization run, persisted as a directory:
// manifest.json (version, config snapshot, anchors, keys), estimate.bin
// (float64 raw matrix) and trace.csv. Round-trips losslessly.
struct RunArtifact {
  std::string config_json;  // full flag/config snapshot, including rng seeds

  std::vector<std::string> x_anchor_keys;   // seed-first order
  std::vector<std::string> y_anchor_keys;   // discretized discoveries
  std::vector<Index> x_anchor_indices;      // into the aligned key list
  std::vector<Index> y_anchor_indices;
  std::vector<std::string> seed_x_keys;
  std::vector<std::string> seed_y_keys;
  int collisions = 0;

  Matrix raw_estimate;
  OptimizationTrace trace;
};

void save_run(const std::filesystem::path& dir, const RunArtifact& artifact);

// Throws VersionMismatch for artifacts from a newer major version and
// CorruptArtifact for missing, truncated or malformed pieces.
RunArtifact load_run(const std::filesystem::path& dir);

}  // namespace anchoropt
