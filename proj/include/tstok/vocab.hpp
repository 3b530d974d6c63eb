#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstok/tokenizer.hpp"

namespace tstok {

// Placement of the K + 1 new token ids after a text vocabulary of size
// |V_L|. The separator takes the top slot; the slot below it is reserved and
// never emitted by the codec.
struct VocabularyMap {
    std::uint64_t text_vocab_size = 0;
    std::uint64_t new_id_first = 0; // |V_L|
    std::uint64_t new_id_last = 0;  // |V_L| + K
    std::uint64_t separator_id = 0; // == new_id_last
    std::uint64_t reserved_id = 0;  // |V_L| + K - 1
    std::string spec_fingerprint;

    std::uint64_t new_token_count() const { return new_id_last - new_id_first + 1; }
};

VocabularyMap build_vocab_map(std::uint64_t text_vocab_size, const TokenizerSpec& spec);

// Row-major f32 table with file header {magic "EMB1", u32 rows, u32 dim}.
struct EmbeddingMatrix {
    std::uint32_t rows = 0;
    std::uint32_t dim = 0;
    std::vector<float> data;

    float at(std::uint32_t row, std::uint32_t col) const { return data[static_cast<std::size_t>(row) * dim + col]; }
};

void write_embeddings(std::ostream& out, const EmbeddingMatrix& m);
EmbeddingMatrix read_embeddings(std::istream& in);
void write_embeddings_file(const std::string& path, const EmbeddingMatrix& m);
EmbeddingMatrix read_embeddings_file(const std::string& path);

// Appends `count` rows, each the column-wise mean of the existing rows.
// Means accumulate in 64-bit before the f32 store; original rows are copied
// bit-identically.
EmbeddingMatrix extend_embeddings_mean(const EmbeddingMatrix& matrix, std::uint32_t count);

// Hand-off manifest for external trainers: vocabulary map, tokenizer
// parameters, corpus inventory, and advisory hyperparameter defaults.
std::string emit_training_manifest(const VocabularyMap& map, const TokenizerSpec& spec,
                                   const std::vector<std::string>& corpus_paths);

} // namespace tstok
