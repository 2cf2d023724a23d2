#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "idr/analysis.hpp"
#include "idr/corpus.hpp"
#include "idr/fieldspace.hpp"
#include "idr/impact.hpp"
#include "idr/interdisc.hpp"
#include "idr/lda.hpp"
#include "idr/pipeline.hpp"
#include "idr/synth.hpp"

namespace py = pybind11;
using namespace idr;

namespace {

Eigen::MatrixXd to_eigen(const DistanceMatrix& d) {
  Eigen::MatrixXd m(d.k(), d.k());
  for (std::size_t i = 0; i < d.k(); ++i) {
    for (std::size_t j = 0; j < d.k(); ++j) m(i, j) = d(i, j);
  }
  return m;
}

DistanceMatrix from_eigen(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error("distance matrix must be square");
  DistanceMatrix d(static_cast<std::size_t>(m.rows()), Provenance::citations);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      d.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j));
    }
  }
  d.validate();
  return d;
}

std::vector<std::pair<std::string, double>> score_rows(const ScoreSet& set) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(set.rows.size());
  for (const auto& r : set.rows) out.emplace_back(r.subject, r.rs);
  return out;
}

}  // namespace

PYBIND11_MODULE(_idr, m) {
  m.doc() = "Interdisciplinarity scoring: corpus ingest, labeled topic model, Rao-Stirling scores, OLS";

  py::register_exception<Error>(m, "IdrError", PyExc_ValueError);

  m.def(
      "rao_stirling",
      [](const std::vector<double>& p, const Eigen::MatrixXd& d) {
        return rao_stirling(FieldDistribution::normalize(p), from_eigen(d));
      },
      py::arg("p"), py::arg("distances"), "Sum over ordered field pairs of p_i p_j d_ij; p is normalized first.");

  m.def(
      "cosine_distance_matrix",
      [](const std::vector<std::vector<double>>& vectors) {
        FieldAggregate agg;
        agg.k = vectors.size();
        agg.vectors = vectors;
        agg.n_papers.assign(vectors.size(), 1.0);
        return to_eigen(field_distance_matrix(agg, Provenance::citations));
      },
      py::arg("vectors"), "1 - cosine similarity between every pair of field vectors.");

  m.def(
      "compare_distance_matrices",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return compare_distance_matrices(from_eigen(a), from_eigen(b));
      },
      py::arg("a"), py::arg("b"), "Pearson r over the upper-triangle entries.");

  py::class_<CorpusStore>(m, "Corpus")
      .def_static(
          "load",
          [](const std::string& dir, bool analysis_filter) {
            IngestOptions o;
            o.analysis_filter = analysis_filter;
            return ingest_directory(dir, o).store;
          },
          py::arg("dir"), py::arg("analysis_filter") = true)
      .def_property_readonly("k", &CorpusStore::k)
      .def_property_readonly("n_papers", [](const CorpusStore& s) { return s.papers().size(); })
      .def_property_readonly("n_core_papers", [](const CorpusStore& s) { return s.core_papers().size(); })
      .def_property_readonly("n_grants", [](const CorpusStore& s) { return s.grants().size(); })
      .def_property_readonly("n_links", [](const CorpusStore& s) { return s.links().size(); })
      .def(
          "distances",
          [](const CorpusStore& s, const std::string& basis) {
            const auto mode = vector_mode_from_string(basis);
            return to_eigen(field_distance_matrix(field_aggregates(s, mode), provenance_from_string(basis)));
          },
          py::arg("basis") = "citations")
      .def(
          "paper_scores",
          [](const CorpusStore& s, const Eigen::MatrixXd& d, const std::string& basis) {
            return score_rows(score_papers(s, from_eigen(d), vector_mode_from_string(basis)));
          },
          py::arg("distances"), py::arg("basis") = "references")
      .def(
          "impact",
          [](const CorpusStore& s, double top_fraction) {
            py::list out;
            for (const auto& r : compute_impact(s, top_fraction)) {
              py::dict row;
              row["paper_id"] = r.paper_id;
              row["year"] = r.year;
              row["c10"] = r.c10;
              row["c10_norm"] = r.c10_norm;
              row["hit"] = r.hit;
              out.append(row);
            }
            return out;
          },
          py::arg("top_fraction") = 0.05);

  py::class_<LdaModel>(m, "Model")
      .def_static(
          "train",
          [](const CorpusStore& s, int iterations, int burn_in, std::uint64_t seed, std::size_t min_words,
             std::size_t min_df) {
            TrainOptions o;
            o.iterations = iterations;
            o.burn_in = burn_in;
            o.seed = seed;
            return train(encode_training_set(build_training_set(s, min_words), min_df), s.k(), o);
          },
          py::arg("corpus"), py::arg("iterations") = 1000, py::arg("burn_in") = 500, py::arg("seed") = 1,
          py::arg("min_words") = 100, py::arg("min_df") = 5)
      .def_static("load", &LdaModel::load, py::arg("path"))
      .def("save", &LdaModel::save, py::arg("path"))
      .def_readonly("k", &LdaModel::k)
      .def_property_readonly("vocab_size", &LdaModel::v)
      .def_property_readonly("phi",
                             [](const LdaModel& model) {
                               return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                                     Eigen::RowMajor>>(
                                          model.phi.data(), static_cast<Eigen::Index>(model.k),
                                          static_cast<Eigen::Index>(model.v()))
                                   .eval();
                             })
      .def(
          "infer",
          [](const LdaModel& model, const std::string& text, int iterations, int burn_in, std::uint64_t seed) {
            InferOptions o;
            o.iterations = iterations;
            o.burn_in = burn_in;
            o.seed = seed;
            return infer_theta(model, text, o).vec();
          },
          py::arg("text"), py::arg("iterations") = 2000, py::arg("burn_in") = 1000, py::arg("seed") = 1)
      .def("field_distances", [](const LdaModel& model) { return to_eigen(lda_field_distance(model)); });

  m.def(
      "synth_citation",
      [](const std::string& out_dir, std::uint64_t seed, std::size_t n_grants) {
        CitationSynthConfig c;
        c.seed = seed;
        c.n_grants = n_grants;
        const auto corpus = gen_citation_corpus(c);
        write_synth_corpus(corpus.store, corpus.truth, out_dir);
      },
      py::arg("out_dir"), py::arg("seed") = 1, py::arg("n_grants") = 2500,
      "Writes a synthetic citation corpus with planted effects and groundtruth.json.");

  m.def(
      "synth_lda",
      [](const std::string& out_dir, std::uint64_t seed, std::size_t n_docs) {
        LdaSynthConfig c;
        c.seed = seed;
        c.n_docs = n_docs;
        const auto corpus = gen_lda_corpus(c);
        write_synth_corpus(lda_corpus_store(corpus), corpus.truth, out_dir);
      },
      py::arg("out_dir"), py::arg("seed") = 1, py::arg("n_docs") = 2000,
      "Writes a synthetic labeled-document corpus drawn from a known topic model.");

  m.def(
      "ols",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names, bool intercept) {
        Eigen::MatrixXd design = x;
        if (names.empty()) {
          for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
        }
        if (intercept) {
          design.resize(x.rows(), x.cols() + 1);
          design.col(0).setOnes();
          design.rightCols(x.cols()) = x;
          names.insert(names.begin(), "(intercept)");
        }
        const auto r = ols_matrix(design, y, names, intercept);
        py::dict out;
        out["names"] = r.names;
        out["coef"] = r.coef;
        out["se"] = r.se;
        out["t"] = r.t;
        out["p"] = r.p;
        out["r2"] = r.r2;
        out["adj_r2"] = r.adj_r2;
        out["n"] = r.n;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("names") = std::vector<std::string>{}, py::arg("intercept") = true,
      "Ordinary least squares with classical standard errors and two-sided p-values.");
}
