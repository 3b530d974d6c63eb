#include "tstok/vocab.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "tstok/errors.hpp"

namespace tstok {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) fail(errc::corrupt_matrix, "truncated embedding header");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

} // namespace

VocabularyMap build_vocab_map(std::uint64_t text_vocab_size, const TokenizerSpec& spec) {
    spec.validate();
    if (text_vocab_size < 1) fail(errc::spec_invalid, "text vocabulary must be non-empty");
    if (spec.vocab_offset != text_vocab_size)
        fail(errc::spec_invalid, "tokenizer vocab_offset must equal the text vocabulary size");
    VocabularyMap map;
    map.text_vocab_size = text_vocab_size;
    map.new_id_first = text_vocab_size;
    map.new_id_last = text_vocab_size + spec.K;
    map.separator_id = map.new_id_last;
    map.reserved_id = map.new_id_last - 1;
    map.spec_fingerprint = spec.fingerprint();
    return map;
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& m) {
    out.write(kMagic, 4);
    put_u32(out, m.rows);
    put_u32(out, m.dim);
    for (float v : m.data) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(bits >> (8 * i));
        out.write(b, 4);
    }
    if (!out) fail(errc::io_error, "failed writing embedding matrix");
}

EmbeddingMatrix read_embeddings(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(errc::corrupt_matrix, "bad embedding magic");
    EmbeddingMatrix m;
    m.rows = get_u32(in);
    m.dim = get_u32(in);
    if (m.rows < 1 || m.dim < 1) fail(errc::corrupt_matrix, "bad embedding shape");
    m.data.resize(static_cast<std::size_t>(m.rows) * m.dim);
    for (auto& v : m.data) {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in) fail(errc::corrupt_matrix, "truncated embedding data");
        std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
                             static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
        v = std::bit_cast<float>(bits);
        if (!std::isfinite(v)) fail(errc::corrupt_matrix, "non-finite embedding entry");
    }
    char extra;
    if (in.read(&extra, 1)) fail(errc::corrupt_matrix, "trailing bytes after embedding data");
    return m;
}

void write_embeddings_file(const std::string& path, const EmbeddingMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    write_embeddings(out, m);
}

EmbeddingMatrix read_embeddings_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open: " + path);
    return read_embeddings(in);
}

EmbeddingMatrix extend_embeddings_mean(const EmbeddingMatrix& matrix, std::uint32_t count) {
    if (count < 1) fail(errc::spec_invalid, "count must be >= 1");
    if (matrix.rows < 1 || matrix.data.size() != static_cast<std::size_t>(matrix.rows) * matrix.dim)
        fail(errc::corrupt_matrix, "matrix shape does not match its data");
    std::vector<double> mean(matrix.dim, 0.0);
    for (std::uint32_t r = 0; r < matrix.rows; ++r)
        for (std::uint32_t c = 0; c < matrix.dim; ++c) mean[c] += static_cast<double>(matrix.at(r, c));
    for (double& v : mean) v /= static_cast<double>(matrix.rows);

    EmbeddingMatrix out;
    out.rows = matrix.rows + count;
    out.dim = matrix.dim;
    out.data = matrix.data;
    out.data.reserve(static_cast<std::size_t>(out.rows) * out.dim);
    for (std::uint32_t i = 0; i < count; ++i)
        for (std::uint32_t c = 0; c < matrix.dim; ++c) out.data.push_back(static_cast<float>(mean[c]));
    return out;
}

std::string emit_training_manifest(const VocabularyMap& map, const TokenizerSpec& spec,
                                   const std::vector<std::string>& corpus_paths) {
    nlohmann::json j{
        {"schema", 1},
        {"vocabulary",
         {{"text_vocab_size", map.text_vocab_size},
          {"new_id_first", map.new_id_first},
          {"new_id_last", map.new_id_last},
          {"separator_id", map.separator_id},
          {"reserved_id", map.reserved_id},
          {"spec_fingerprint", map.spec_fingerprint}}},
        {"tokenizer",
         {{"K", spec.K}, {"s", spec.s}, {"vocab_offset", spec.vocab_offset}, {"separator_id", spec.separator_id()}}},
        {"corpus", corpus_paths},
        // published defaults passed through as advisory values for trainers
        {"training_advisory",
         {{"lr_pretrain", 2e-3},
          {"lr_instruct", 2e-5},
          {"epochs_pretrain", 1},
          {"epochs_instruct", 1},
          {"lr_schedule", "cosine"},
          {"mean_init_lm_head", true}}}};
    return j.dump(2);
}

} // namespace tstok
