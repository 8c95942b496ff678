#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "anchoropt/embedding_space.hpp"

namespace anchoropt {

// On-disk embedding formats. Text: an "N d" header line followed by
// "key v1 ... vd" lines. Binary: magic "AOEB", little-endian u32 version,
// flags, N, d, a length-prefixed key table, optional i32 labels, then
// float32 row-major data. Rows are normalized on load.
enum class EmbeddingFormat { text, binary };

EmbeddingSpace load_word_embeddings(const std::filesystem::path& path, EmbeddingFormat format);
void save_word_embeddings(const std::filesystem::path& path, const EmbeddingSpace& space,
                          EmbeddingFormat format);

// Labeled variant: an integer label column after the key.
struct LabeledEmbeddings {
  EmbeddingSpace space;
  std::vector<int> labels;
};
LabeledEmbeddings load_labeled_embeddings(const std::filesystem::path& path,
                                          EmbeddingFormat format);
void save_labeled_embeddings(const std::filesystem::path& path, const EmbeddingSpace& space,
                             const std::vector<int>& labels, EmbeddingFormat format);

// Sniffs the binary magic; anything else is treated as text.
EmbeddingFormat detect_format(const std::filesystem::path& path);

// Shared vocabulary, subsampled to at most n keys. Keys come out in
// lexicographic order; both spaces are row-matched to that order.
struct AlignedPair {
  std::vector<std::string> keys;
  EmbeddingSpace a;
  EmbeddingSpace b;
};
AlignedPair intersect_and_subsample(const EmbeddingSpace& space_a, const EmbeddingSpace& space_b,
                                    Index n, std::uint64_t rng_seed);

// Disjoint uniform draws over the aligned key list: n_seed seed pairs (the
// same aligned index on both sides) plus the remaining x-side anchors.
struct SeedSelection {
  std::vector<Index> seed_indices;      // aligned indices, both sides
  std::vector<Index> x_anchor_indices;  // length n_total, seeds first
};
SeedSelection select_seed_and_candidates(Index n_keys, Index n_seed, Index n_total,
                                         std::uint64_t rng_seed);

}  // namespace anchoropt
