#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tstok/benchmark.hpp"
#include "tstok/dataset.hpp"
#include "tstok/errors.hpp"
#include "tstok/eval.hpp"
#include "tstok/patch_vq.hpp"
#include "tstok/rng.hpp"
#include "tstok/series.hpp"
#include "tstok/text_codec.hpp"
#include "tstok/tokenizer.hpp"
#include "tstok/vocab.hpp"
#include "tstok/window_sampler.hpp"

namespace py = pybind11;
using namespace tstok;

namespace {

TimeSeries series_from_channels(const std::vector<std::vector<double>>& channels) {
    return TimeSeries::from_channels(channels);
}

std::vector<std::vector<double>> series_to_channels(const TimeSeries& s) {
    std::vector<std::vector<double>> out(s.channels());
    for (std::size_t c = 0; c < s.channels(); ++c) out[c].assign(s.channel(c).begin(), s.channel(c).end());
    return out;
}

} // namespace

PYBIND11_MODULE(_tstok, m) {
    m.doc() = "time-series tokenization, dataset, and evaluation toolkit";

    py::register_exception<Error>(m, "TstokError");

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init(&series_from_channels), py::arg("channels"))
        .def_property_readonly("length", &TimeSeries::length)
        .def_property_readonly("channels", &TimeSeries::channels)
        .def("to_channels", &series_to_channels);

    py::class_<NormalizationStats>(m, "NormalizationStats")
        .def_readonly("mean", &NormalizationStats::mean)
        .def_readonly("std", &NormalizationStats::std);

    py::class_<TokenizerSpec>(m, "TokenizerSpec")
        .def(py::init([](std::uint32_t K, double s, std::uint64_t vocab_offset, bool pre_normalized) {
                 TokenizerSpec spec{K, s, vocab_offset, pre_normalized};
                 spec.validate();
                 return spec;
             }),
             py::arg("K") = 8192, py::arg("s") = 3.0, py::arg("vocab_offset") = 0,
             py::arg("pre_normalized") = false)
        .def_readonly("K", &TokenizerSpec::K)
        .def_readonly("s", &TokenizerSpec::s)
        .def_readonly("vocab_offset", &TokenizerSpec::vocab_offset)
        .def_readonly("pre_normalized", &TokenizerSpec::pre_normalized)
        .def_property_readonly("separator_id", &TokenizerSpec::separator_id)
        .def("fingerprint", &TokenizerSpec::fingerprint);

    m.def(
        "normalize",
        [](const TimeSeries& s) {
            auto r = normalize(s);
            return py::make_tuple(r.series, r.stats);
        },
        py::arg("series"));
    m.def("denormalize", &denormalize, py::arg("series"), py::arg("stats"));

    m.def(
        "encode", [](const TimeSeries& s, const TokenizerSpec& spec) { return encode(s, spec).ids; },
        py::arg("series"), py::arg("spec"));
    m.def(
        "decode",
        [](const std::vector<std::uint64_t>& ids, const TokenizerSpec& spec) { return decode(ids, spec); },
        py::arg("ids"), py::arg("spec"));

    m.def(
        "reconstruction_error",
        [](const TimeSeries& a, const TimeSeries& b, const std::string& metric) {
            ErrorMetric m_ = metric == "mse" ? ErrorMetric::MSE
                           : metric == "max_abs" ? ErrorMetric::MaxAbs
                                                 : ErrorMetric::MAE;
            return reconstruction_error(a, b, m_);
        },
        py::arg("original"), py::arg("reconstructed"), py::arg("metric") = "mae");

    m.def(
        "text_encode",
        [](const TimeSeries& s, std::uint32_t precision) { return text_encode(s, TextCodecSpec{precision}); },
        py::arg("series"), py::arg("precision") = 2);
    m.def(
        "text_decode",
        [](const std::string& text, std::uint32_t precision) { return text_decode(text, TextCodecSpec{precision}); },
        py::arg("text"), py::arg("precision") = 2);

    py::class_<PatchCodebook>(m, "PatchCodebook")
        .def_readonly("patch_length", &PatchCodebook::patch_length)
        .def_readonly("codewords", &PatchCodebook::codewords)
        .def("to_json", &PatchCodebook::to_json)
        .def_static("from_json", &PatchCodebook::from_json);
    m.def("train_patch_vq", &train_patch_vq, py::arg("corpus"), py::arg("patch_length"), py::arg("codebook_size"),
          py::arg("iterations") = 50, py::arg("seed") = 42);
    m.def(
        "vq_encode",
        [](const TimeSeries& s, const PatchCodebook& book) { return vq_encode(s, book).tokens.ids; },
        py::arg("series"), py::arg("codebook"));

    py::class_<Segment>(m, "Segment")
        .def_readonly("uuid", &Segment::uuid)
        .def_readonly("source_id", &Segment::source_id)
        .def_readonly("start", &Segment::start)
        .def_readonly("length", &Segment::length)
        .def_readonly("channels", &Segment::channels)
        .def_readonly("values", &Segment::values);
    m.def(
        "sample_windows",
        [](const TimeSeries& s, const std::string& source_id, std::size_t window, std::size_t stride,
           std::size_t min_length, std::size_t max_length, std::size_t max_elements, std::uint64_t seed) {
            WindowParams params;
            params.window = window;
            params.stride = stride;
            params.min_length = min_length;
            params.max_length = max_length;
            params.max_elements = max_elements;
            params.seed = seed;
            return sample_windows(s, source_id, params);
        },
        py::arg("series"), py::arg("source_id"), py::arg("window") = 256, py::arg("stride") = 32,
        py::arg("min_length") = 1, py::arg("max_length") = 256, py::arg("max_elements") = 1024,
        py::arg("seed") = 42);

    m.def("extract_choice", [](const std::string& response) -> py::object {
        auto r = extract_choice(response);
        if (!r.verdict) return py::none();
        return py::str(std::string(1, *r.verdict));
    });
    m.def("rank_points", &rank_points, py::arg("model_overall_means"));

    py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
        .def(py::init([](std::uint32_t rows, std::uint32_t dim, std::vector<float> data) {
                 EmbeddingMatrix e;
                 e.rows = rows;
                 e.dim = dim;
                 e.data = std::move(data);
                 return e;
             }),
             py::arg("rows"), py::arg("dim"), py::arg("data"))
        .def_readonly("rows", &EmbeddingMatrix::rows)
        .def_readonly("dim", &EmbeddingMatrix::dim)
        .def_readonly("data", &EmbeddingMatrix::data);
    m.def("extend_embeddings_mean", &extend_embeddings_mean, py::arg("matrix"), py::arg("count"));

    m.def("make_synthetic_corpus", &make_synthetic_corpus, py::arg("count"), py::arg("length"),
          py::arg("channels") = 1, py::arg("seed") = 42);

    m.def("balance_qa_json", [](const std::vector<std::string>& lines, std::uint64_t seed) {
        std::vector<QASample> samples;
        samples.reserve(lines.size());
        for (const auto& line : lines) samples.push_back(QASample::from_json(line));
        Rng rng(seed);
        auto balanced = balance_qa(std::move(samples), rng);
        std::vector<std::string> out;
        out.reserve(balanced.samples.size());
        for (const auto& s : balanced.samples) out.push_back(s.to_json());
        return py::make_tuple(out, balanced.trimmed);
    });

    m.attr("__version__") = "0.1.0";
}
