#include "anchoropt/embedding_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace anchoropt {

namespace {

constexpr char kBinaryMagic[4] = {'A', 'O', 'E', 'B'};
constexpr std::uint32_t kBinaryVersion = 1;
constexpr std::uint32_t kFlagLabeled = 1u;

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line, const std::string& what) {
  raise(errc::parse_error, path.string() + ":" + std::to_string(line) + ": " + what);
}

struct TextPayload {
  std::vector<std::string> keys;
  Matrix vectors;
  std::vector<int> labels;
};

TextPayload load_text(const std::filesystem::path& path, bool labeled) {
  std::ifstream in(path);
  if (!in) {
    raise(errc::parse_error, path.string() + ": cannot open");
  }
  std::string line;
  if (!std::getline(in, line)) {
    parse_fail(path, 1, "missing header");
  }
  std::istringstream header(line);
  long long n = 0, d = 0;
  if (!(header >> n >> d) || n < 1 || d < 1) {
    parse_fail(path, 1, "header must be 'N d' with positive integers");
  }

  TextPayload payload;
  payload.keys.reserve(static_cast<std::size_t>(n));
  payload.vectors.resize(n, d);
  if (labeled) {
    payload.labels.reserve(static_cast<std::size_t>(n));
  }
  int line_no = 1;
  for (long long row = 0; row < n; ++row) {
    if (!std::getline(in, line)) {
      parse_fail(path, line_no + 1, "expected " + std::to_string(n) + " rows, got " +
                                        std::to_string(row));
    }
    ++line_no;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) {
      parse_fail(path, line_no, "missing key");
    }
    if (labeled) {
      int label;
      if (!(ss >> label)) {
        parse_fail(path, line_no, "missing label");
      }
      payload.labels.push_back(label);
    }
    for (long long c = 0; c < d; ++c) {
      double value;
      if (!(ss >> value)) {
        raise(errc::dim_inconsistent,
              path.string() + ":" + std::to_string(line_no) + ": row has fewer than " +
                  std::to_string(d) + " values");
      }
      payload.vectors(row, c) = value;
    }
    double extra;
    if (ss >> extra) {
      raise(errc::dim_inconsistent, path.string() + ":" + std::to_string(line_no) +
                                        ": row has more than " + std::to_string(d) + " values");
    }
    payload.keys.push_back(std::move(key));
  }
  return payload;
}

void save_text(const std::filesystem::path& path, const EmbeddingSpace& space,
               const std::vector<int>* labels) {
  std::ofstream out(path);
  if (!out) {
    raise(errc::invalid_argument, "cannot open " + path.string() + " for writing");
  }
  out << space.size() << ' ' << space.dim() << '\n';
  out.precision(9);  // float32 storage fidelity
  for (Index i = 0; i < space.size(); ++i) {
    out << space.keys()[static_cast<std::size_t>(i)];
    if (labels) {
      out << ' ' << (*labels)[static_cast<std::size_t>(i)];
    }
    for (Index j = 0; j < space.dim(); ++j) {
      out << ' ' << static_cast<float>(space.vectors()(i, j));
    }
    out << '\n';
  }
}

template <typename T>
void read_raw(std::ifstream& in, const std::filesystem::path& path, T* value) {
  if (!in.read(reinterpret_cast<char*>(value), sizeof(T))) {
    raise(errc::parse_error, path.string() + ": truncated file");
  }
}

TextPayload load_binary(const std::filesystem::path& path, bool labeled) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errc::parse_error, path.string() + ": cannot open");
  }
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kBinaryMagic)) {
    raise(errc::parse_error, path.string() + ": bad magic");
  }
  std::uint32_t version, flags, n, d;
  read_raw(in, path, &version);
  read_raw(in, path, &flags);
  read_raw(in, path, &n);
  read_raw(in, path, &d);
  if (version != kBinaryVersion) {
    raise(errc::version_mismatch, path.string() + ": format version " + std::to_string(version));
  }
  const bool has_labels = (flags & kFlagLabeled) != 0;
  if (labeled && !has_labels) {
    raise(errc::parse_error, path.string() + ": file carries no labels");
  }
  if (n < 1 || d < 1) {
    raise(errc::parse_error, path.string() + ": empty table");
  }

  TextPayload payload;
  payload.keys.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t len;
    read_raw(in, path, &len);
    std::string key(len, '\0');
    if (!in.read(key.data(), len)) {
      raise(errc::parse_error, path.string() + ": truncated key table");
    }
    payload.keys.push_back(std::move(key));
  }
  if (has_labels) {
    payload.labels.resize(n);
    if (!in.read(reinterpret_cast<char*>(payload.labels.data()),
                 static_cast<std::streamsize>(n * sizeof(std::int32_t)))) {
      raise(errc::parse_error, path.string() + ": truncated labels");
    }
  }
  std::vector<float> row(d);
  payload.vectors.resize(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()),
                 static_cast<std::streamsize>(d * sizeof(float)))) {
      raise(errc::parse_error, path.string() + ": truncated data");
    }
    for (std::uint32_t j = 0; j < d; ++j) {
      payload.vectors(i, j) = row[j];
    }
  }
  return payload;
}

void save_binary(const std::filesystem::path& path, const EmbeddingSpace& space,
                 const std::vector<int>* labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(errc::invalid_argument, "cannot open " + path.string() + " for writing");
  }
  out.write(kBinaryMagic, 4);
  const std::uint32_t version = kBinaryVersion;
  const std::uint32_t flags = labels ? kFlagLabeled : 0u;
  const std::uint32_t n = static_cast<std::uint32_t>(space.size());
  const std::uint32_t d = static_cast<std::uint32_t>(space.dim());
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&flags), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  for (const auto& key : space.keys()) {
    const std::uint32_t len = static_cast<std::uint32_t>(key.size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(key.data(), len);
  }
  if (labels) {
    std::vector<std::int32_t> packed(labels->begin(), labels->end());
    out.write(reinterpret_cast<const char*>(packed.data()),
              static_cast<std::streamsize>(packed.size() * sizeof(std::int32_t)));
  }
  std::vector<float> row(d);
  for (Index i = 0; i < space.size(); ++i) {
    for (Index j = 0; j < space.dim(); ++j) {
      row[static_cast<std::size_t>(j)] = static_cast<float>(space.vectors()(i, j));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

EmbeddingSpace to_space(TextPayload&& payload) {
  return EmbeddingSpace(std::move(payload.keys), std::move(payload.vectors));
}

}  // namespace

EmbeddingSpace load_word_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  return to_space(format == EmbeddingFormat::text ? load_text(path, false)
                                                  : load_binary(path, false));
}

void save_word_embeddings(const std::filesystem::path& path, const EmbeddingSpace& space,
                          EmbeddingFormat format) {
  if (format == EmbeddingFormat::text) {
    save_text(path, space, nullptr);
  } else {
    save_binary(path, space, nullptr);
  }
}

LabeledEmbeddings load_labeled_embeddings(const std::filesystem::path& path,
                                          EmbeddingFormat format) {
  TextPayload payload =
      format == EmbeddingFormat::text ? load_text(path, true) : load_binary(path, true);
  std::vector<int> labels = std::move(payload.labels);
  return {to_space(std::move(payload)), std::move(labels)};
}

void save_labeled_embeddings(const std::filesystem::path& path, const EmbeddingSpace& space,
                             const std::vector<int>& labels, EmbeddingFormat format) {
  if (static_cast<Index>(labels.size()) != space.size()) {
    raise(errc::length_mismatch, "labels/rows: " + std::to_string(labels.size()) + "/" +
                                     std::to_string(space.size()));
  }
  if (format == EmbeddingFormat::text) {
    save_text(path, space, &labels);
  } else {
    save_binary(path, space, &labels);
  }
}

EmbeddingFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errc::parse_error, path.string() + ": cannot open");
  }
  char magic[4] = {};
  in.read(magic, 4);
  return std::equal(magic, magic + 4, kBinaryMagic) ? EmbeddingFormat::binary
                                                    : EmbeddingFormat::text;
}

AlignedPair intersect_and_subsample(const EmbeddingSpace& space_a, const EmbeddingSpace& space_b,
                                    Index n, std::uint64_t rng_seed) {
  std::vector<std::string> shared;
  for (const auto& key : space_a.keys()) {
    if (space_b.contains(key)) {
      shared.push_back(key);
    }
  }
  if (shared.empty()) {
    raise(errc::empty_intersection, "the vocabularies do not overlap");
  }
  std::sort(shared.begin(), shared.end());

  if (n > 0 && n < static_cast<Index>(shared.size())) {
    std::mt19937_64 rng(rng_seed);
    for (Index i = 0; i < n; ++i) {
      std::uniform_int_distribution<Index> pick(i, static_cast<Index>(shared.size()) - 1);
      std::swap(shared[static_cast<std::size_t>(i)], shared[static_cast<std::size_t>(pick(rng))]);
    }
    shared.resize(static_cast<std::size_t>(n));
    std::sort(shared.begin(), shared.end());
  }

  std::vector<Index> rows_a, rows_b;
  rows_a.reserve(shared.size());
  rows_b.reserve(shared.size());
  for (const auto& key : shared) {
    rows_a.push_back(space_a.index_of(key));
    rows_b.push_back(space_b.index_of(key));
  }
  AlignedPair out{shared, EmbeddingSpace(shared, space_a.rows(rows_a)),
                  EmbeddingSpace(shared, space_b.rows(rows_b))};
  return out;
}

SeedSelection select_seed_and_candidates(Index n_keys, Index n_seed, Index n_total,
                                         std::uint64_t rng_seed) {
  if (n_seed < 1 || n_seed > n_total) {
    raise(errc::invalid_argument, "need 1 <= n_seed <= n_total");
  }
  if (n_total > n_keys) {
    raise(errc::not_enough_keys, std::to_string(n_total) + " anchors from " +
                                     std::to_string(n_keys) + " keys");
  }
  std::vector<Index> pool(static_cast<std::size_t>(n_keys));
  std::iota(pool.begin(), pool.end(), Index{0});
  std::mt19937_64 rng(rng_seed);
  for (Index i = 0; i < n_total; ++i) {
    std::uniform_int_distribution<Index> pick(i, n_keys - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(n_total));
  SeedSelection out;
  out.seed_indices.assign(pool.begin(), pool.begin() + n_seed);
  out.x_anchor_indices = std::move(pool);
  return out;
}

}  // namespace anchoropt
