#include "anchoropt/run_artifact.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace anchoropt {

namespace {

using nlohmann::json;

constexpr char kEstimateMagic[4] = {'A', 'O', 'E', 'S'};

void write_estimate(const std::filesystem::path& path, const Matrix& raw) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(errc::invalid_argument, "cannot open " + path.string() + " for writing");
  }
  out.write(kEstimateMagic, 4);
  const std::uint32_t rows = static_cast<std::uint32_t>(raw.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(raw.cols());
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  for (Index i = 0; i < raw.rows(); ++i) {
    for (Index j = 0; j < raw.cols(); ++j) {
      const double value = raw(i, j);
      out.write(reinterpret_cast<const char*>(&value), sizeof(double));
    }
  }
}

Matrix read_estimate(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errc::corrupt_artifact, path.string() + ": missing estimate");
  }
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kEstimateMagic)) {
    raise(errc::corrupt_artifact, path.string() + ": bad estimate magic");
  }
  std::uint32_t rows, cols;
  if (!in.read(reinterpret_cast<char*>(&rows), 4) || !in.read(reinterpret_cast<char*>(&cols), 4)) {
    raise(errc::corrupt_artifact, path.string() + ": truncated estimate header");
  }
  Matrix raw(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      double value;
      if (!in.read(reinterpret_cast<char*>(&value), sizeof(double))) {
        raise(errc::corrupt_artifact, path.string() + ": truncated estimate data");
      }
      raw(i, j) = value;
    }
  }
  return raw;
}

void write_trace(const std::filesystem::path& path, const OptimizationTrace& trace) {
  std::ofstream out(path);
  if (!out) {
    raise(errc::invalid_argument, "cannot open " + path.string() + " for writing");
  }
  out << "step,mse,marginal_error,wall_time\n";
  out.precision(17);
  for (const auto& record : trace.steps) {
    out << record.step << ',' << record.mse << ',' << record.marginal_error << ','
        << record.wall_time << '\n';
  }
}

OptimizationTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(errc::corrupt_artifact, path.string() + ": missing trace");
  }
  std::string line;
  if (!std::getline(in, line) || line != "step,mse,marginal_error,wall_time") {
    raise(errc::corrupt_artifact, path.string() + ": bad trace header");
  }
  OptimizationTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    StepRecord record;
    char c1, c2, c3;
    std::istringstream ss(line);
    if (!(ss >> record.step >> c1 >> record.mse >> c2 >> record.marginal_error >> c3 >>
          record.wall_time) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      raise(errc::corrupt_artifact, path.string() + ": bad trace row '" + line + "'");
    }
    trace.steps.push_back(record);
  }
  return trace;
}

json keys_to_json(const std::vector<std::string>& keys) { return json(keys); }

std::vector<std::string> keys_from_json(const json& j) {
  return j.get<std::vector<std::string>>();
}

json indices_to_json(const std::vector<Index>& indices) {
  json out = json::array();
  for (Index i : indices) out.push_back(static_cast<std::int64_t>(i));
  return out;
}

std::vector<Index> indices_from_json(const json& j) {
  std::vector<Index> out;
  for (const auto& v : j) out.push_back(static_cast<Index>(v.get<std::int64_t>()));
  return out;
}

}  // namespace

void save_run(const std::filesystem::path& dir, const RunArtifact& artifact) {
  std::filesystem::create_directories(dir);

  json manifest;
  manifest["artifact_version"] = {{"major", kArtifactMajorVersion},
                                  {"minor", kArtifactMinorVersion}};
  manifest["config"] =
      artifact.config_json.empty() ? json::object() : json::parse(artifact.config_json);
  manifest["anchors"] = {
      {"x_keys", keys_to_json(artifact.x_anchor_keys)},
      {"y_keys", keys_to_json(artifact.y_anchor_keys)},
      {"x_indices", indices_to_json(artifact.x_anchor_indices)},
      {"y_indices", indices_to_json(artifact.y_anchor_indices)},
      {"seed_x_keys", keys_to_json(artifact.seed_x_keys)},
      {"seed_y_keys", keys_to_json(artifact.seed_y_keys)},
      {"collisions", artifact.collisions},
  };
  manifest["reseed_events"] = artifact.trace.reseed_events;

  std::ofstream out(dir / "manifest.json");
  if (!out) {
    raise(errc::invalid_argument, "cannot open " + (dir / "manifest.json").string());
  }
  out << manifest.dump(2) << '\n';
  out.close();

  write_estimate(dir / "estimate.bin", artifact.raw_estimate);
  write_trace(dir / "trace.csv", artifact.trace);
}

RunArtifact load_run(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    raise(errc::corrupt_artifact, manifest_path.string() + ": missing manifest");
  }
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    raise(errc::corrupt_artifact, manifest_path.string() + ": " + e.what());
  }

  RunArtifact artifact;
  try {
    const auto& version = manifest.at("artifact_version");
    const int major = version.at("major").get<int>();
    if (major > kArtifactMajorVersion) {
      raise(errc::version_mismatch, "artifact major version " + std::to_string(major) +
                                        " is newer than supported " +
                                        std::to_string(kArtifactMajorVersion));
    }
    artifact.config_json = manifest.at("config").dump();
    const auto& anchors = manifest.at("anchors");
    artifact.x_anchor_keys = keys_from_json(anchors.at("x_keys"));
    artifact.y_anchor_keys = keys_from_json(anchors.at("y_keys"));
    artifact.x_anchor_indices = indices_from_json(anchors.at("x_indices"));
    artifact.y_anchor_indices = indices_from_json(anchors.at("y_indices"));
    artifact.seed_x_keys = keys_from_json(anchors.at("seed_x_keys"));
    artifact.seed_y_keys = keys_from_json(anchors.at("seed_y_keys"));
    artifact.collisions = anchors.at("collisions").get<int>();
  } catch (const json::exception& e) {
    raise(errc::corrupt_artifact, manifest_path.string() + ": " + e.what());
  }

  artifact.raw_estimate = read_estimate(dir / "estimate.bin");
  artifact.trace = read_trace(dir / "trace.csv");
  try {
    artifact.trace.reseed_events = manifest.value("reseed_events", 0);
  } catch (const json::exception& e) {
    raise(errc::corrupt_artifact, manifest_path.string() + ": " + e.what());
  }
  return artifact;
}

}  // namespace anchoropt
