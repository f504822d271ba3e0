#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mmfuse/mmfuse.hpp"

namespace py = pybind11;
using namespace mmfuse;

namespace {

GridSpec make_grid(std::size_t dim_step, std::size_t dim_min, double alpha_step, double ridge,
                   const std::optional<std::string>& motifs, bool normalize_concat) {
    GridSpec g;
    g.dim_step = dim_step;
    g.dim_min = dim_min;
    g.alpha_step = alpha_step;
    g.ridge = ridge;
    g.normalize_concat = normalize_concat;
    if (motifs) g.motif_filter = parse_motifs(*motifs);
    return g;
}

Modality modality(const std::string& side) {
    if (side == "textual" || side == "T") return Modality::textual;
    if (side == "visual" || side == "V") return Modality::visual;
    throw py::value_error("side must be 'textual' or 'visual'");
}

py::dict result_dict(const EvaluationResult& r) {
    py::dict d;
    d["rho"] = r.rho ? py::object(py::float_(*r.rho)) : py::object(py::none());
    d["n_evaluated"] = r.n_evaluated;
    d["n_total"] = r.n_total;
    d["n_degenerate"] = r.n_degenerate;
    d["coverage"] = r.coverage();
    d["error"] = r.error;
    return d;
}

}  // namespace

PYBIND11_MODULE(_mmfuse, m) {
    m.doc() = "Multimodal word-embedding fusion (C++ core)";

    auto base = py::register_exception<Error>(m, "MmfuseError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<AlignmentError>(m, "AlignmentError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<GridError>(m, "GridError", base.ptr());
    py::register_exception<LookupError>(m, "LookupError", base.ptr());
    py::register_exception<UndefinedCorrelation>(m, "UndefinedCorrelation", base.ptr());
    py::register_exception<NoResultError>(m, "NoResultError", base.ptr());

    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def(py::init<std::vector<std::string>, Matrix, std::string>(), py::arg("words"), py::arg("matrix"),
             py::arg("name") = "")
        .def_property_readonly("words", [](const EmbeddingTable& t) { return t.vocab().words(); })
        .def_property_readonly("matrix", &EmbeddingTable::matrix)
        .def_property_readonly("name", &EmbeddingTable::name)
        .def_property_readonly("dim", &EmbeddingTable::dim)
        .def("__len__", &EmbeddingTable::size)
        .def("__contains__", [](const EmbeddingTable& t, const std::string& w) { return t.vocab().contains(w); })
        .def("row", &EmbeddingTable::row, py::arg("word"))
        .def("__repr__", [](const EmbeddingTable& t) {
            return "<EmbeddingTable '" + t.name() + "' " + std::to_string(t.size()) + "x" +
                   std::to_string(t.dim()) + ">";
        });

    m.def("load_embeddings", &load_embeddings, py::arg("path"), py::arg("name") = "");
    m.def("save_embeddings", &save_embeddings, py::arg("table"), py::arg("path"));
    m.def("align_vocabularies", &align_vocabularies, py::arg("a"), py::arg("b"));

    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("mean", &PcaModel::mean)
        .def_readonly("components", &PcaModel::components)
        .def_readonly("explained_variance", &PcaModel::explained_variance)
        .def_property_readonly("k", &PcaModel::k);
    m.def("pca_fit", &pca_fit, py::arg("x"), py::arg("k"));
    m.def("pca_transform", &pca_transform, py::arg("model"), py::arg("x"));

    py::class_<CcaModel>(m, "CcaModel")
        .def_readonly("mean_x", &CcaModel::mean_x)
        .def_readonly("mean_y", &CcaModel::mean_y)
        .def_readonly("proj_x", &CcaModel::proj_x)
        .def_readonly("proj_y", &CcaModel::proj_y)
        .def_readonly("correlations", &CcaModel::correlations)
        .def_readonly("ridge", &CcaModel::ridge)
        .def_property_readonly("k", &CcaModel::k);
    m.def("cca_fit", &cca_fit, py::arg("x"), py::arg("y"), py::arg("k"), py::arg("ridge") = kDefaultRidge);
    m.def(
        "cca_transform",
        [](const CcaModel& model, const Matrix& x, const std::string& side) {
            return cca_transform(model, x, modality(side));
        },
        py::arg("model"), py::arg("x"), py::arg("side"));
    m.def(
        "rcca_residual",
        [](const Matrix& original, const Matrix& projected, const PcaModel* reduction) {
            return rcca_residual(original, projected, reduction);
        },
        py::arg("original"), py::arg("projected"), py::arg("reduction") = nullptr);

    py::class_<Configuration>(m, "Configuration")
        .def_static("parse", &parse_configuration, py::arg("text"))
        .def("format", &format_configuration)
        .def("describe", &describe_configuration)
        .def_property_readonly("motifs", [](const Configuration& c) { return format_motifs(motifs_of(c)); })
        .def("validate", &validate_configuration, py::arg("dim_t"), py::arg("dim_v"))
        .def("output_dimension", &output_dimension, py::arg("dim_t"), py::arg("dim_v"))
        .def("__str__", &format_configuration_inline)
        .def("__repr__", [](const Configuration& c) { return "<Configuration " + format_configuration_inline(c) + ">"; })
        .def("__eq__", [](const Configuration& a, const Configuration& b) { return a == b; })
        .def("__hash__", [](const Configuration& c) { return py::hash(py::str(format_configuration_inline(c))); });

    m.def(
        "enumerate_configurations",
        [](std::size_t dim_t, std::size_t dim_v, std::size_t dim_step, std::size_t dim_min, double alpha_step,
           double ridge, const std::optional<std::string>& motifs, bool normalize_concat) {
            return enumerate_configurations(
                dim_t, dim_v, make_grid(dim_step, dim_min, alpha_step, ridge, motifs, normalize_concat));
        },
        py::arg("dim_t"), py::arg("dim_v"), py::arg("dim_step") = 50, py::arg("dim_min") = 50,
        py::arg("alpha_step") = 0.1, py::arg("ridge") = kDefaultRidge, py::arg("motifs") = py::none(),
        py::arg("normalize_concat") = false);

    py::class_<Benchmark>(m, "Benchmark")
        .def(py::init([](std::string name, const std::vector<std::tuple<std::string, std::string, double>>& pairs) {
                 std::vector<WordPair> ps;
                 for (const auto& [a, b, g] : pairs) ps.push_back({a, b, g});
                 return Benchmark(std::move(name), std::move(ps));
             }),
             py::arg("name"), py::arg("pairs"))
        .def_property_readonly("name", &Benchmark::name)
        .def_property_readonly("pairs",
                               [](const Benchmark& b) {
                                   std::vector<std::tuple<std::string, std::string, double>> out;
                                   for (const auto& p : b.pairs()) out.emplace_back(p.first, p.second, p.gold);
                                   return out;
                               })
        .def("__len__", &Benchmark::size);
    m.def("load_benchmark", &load_benchmark, py::arg("path"), py::arg("name") = "");

    m.def(
        "cosine", [](const Vector& u, const Vector& v) { return cosine({u.data(), size_t(u.size())}, {v.data(), size_t(v.size())}); },
        py::arg("u"), py::arg("v"));
    m.def("spearman", [](const std::vector<double>& a, const std::vector<double>& b) { return spearman(a, b); },
          py::arg("a"), py::arg("b"));

    py::class_<ScoringModel>(m, "ScoringModel")
        .def_property_readonly("is_pair", &ScoringModel::is_pair)
        .def_property_readonly("output_dim", &ScoringModel::output_dim)
        .def_property_readonly("tables",
                               [](const ScoringModel& s) {
                                   std::vector<EmbeddingTable> out;
                                   if (s.is_pair()) {
                                       out = {s.pair().first, s.pair().second};
                                   } else {
                                       out = {s.single().table};
                                   }
                                   return out;
                               })
        .def_property_readonly("alpha",
                               [](const ScoringModel& s) -> std::optional<double> {
                                   if (!s.is_pair()) return std::nullopt;
                                   return s.pair().alpha;
                               })
        .def("score", [](const ScoringModel& s, const std::string& a, const std::string& b) { return pair_score(s, a, b); },
             py::arg("w1"), py::arg("w2"));
    m.def("apply_configuration",
          py::overload_cast<const Configuration&, const EmbeddingTable&, const EmbeddingTable&>(&apply_configuration),
          py::arg("config"), py::arg("textual"), py::arg("visual"));
    m.def(
        "evaluate", [](const ScoringModel& model, const Benchmark& bench) { return result_dict(evaluate(model, bench)); },
        py::arg("model"), py::arg("bench"));

    py::class_<SearchReport>(m, "SearchReport")
        .def_readonly("benchmark_name", &SearchReport::benchmark_name)
        .def("__len__", [](const SearchReport& r) { return r.entries.size(); })
        .def_property_readonly("failed", &SearchReport::failed)
        .def_property_readonly("entries",
                               [](const SearchReport& r) {
                                   py::list out;
                                   for (const auto& e : r.entries) {
                                       py::dict d = result_dict(e.result);
                                       d["config"] = e.config;
                                       d["output_dim"] = e.output_dim;
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def("best",
             [](const SearchReport& r) {
                 const auto& e = r.best();
                 py::dict d = result_dict(e.result);
                 d["config"] = e.config;
                 d["output_dim"] = e.output_dim;
                 return d;
             })
        .def("entries_tsv", &format_report_entries)
        .def("table", &format_report_table, py::arg("top") = 25);

    m.def(
        "grid_search",
        [](const EmbeddingTable& textual, const EmbeddingTable& visual, const Benchmark& bench, std::size_t dim_step,
           std::size_t dim_min, double alpha_step, double ridge, const std::optional<std::string>& motifs,
           bool normalize_concat, std::size_t workers) {
            const auto grid = make_grid(dim_step, dim_min, alpha_step, ridge, motifs, normalize_concat);
            SearchOptions opts;
            opts.workers = workers;
            py::gil_scoped_release release;
            return grid_search(textual, visual, bench, grid, opts);
        },
        py::arg("textual"), py::arg("visual"), py::arg("bench"), py::arg("dim_step") = 50, py::arg("dim_min") = 50,
        py::arg("alpha_step") = 0.1, py::arg("ridge") = kDefaultRidge, py::arg("motifs") = py::none(),
        py::arg("normalize_concat") = false, py::arg("workers") = 1);

    m.attr("DEFAULT_RIDGE") = kDefaultRidge;
}
