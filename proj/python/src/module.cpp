#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "lyra/corpus.hpp"
#include "lyra/embedding.hpp"
#include "lyra/error.hpp"
#include "lyra/experiment.hpp"
#include "lyra/manifest.hpp"
#include "lyra/metrics.hpp"
#include "lyra/prompting.hpp"
#include "lyra/report.hpp"
#include "lyra/retrieval.hpp"
#include "lyra/standardize.hpp"

namespace py = pybind11;

namespace {

std::vector<lyra::SegmentPair> to_pairs(const std::vector<std::pair<std::string, std::string>>& items) {
  std::vector<lyra::SegmentPair> out;
  out.reserve(items.size());
  for (const auto& [h, r] : items) out.push_back({h, r});
  return out;
}

py::dict score_dict(const lyra::MetricScore& s) {
  py::dict d;
  d["metric"] = std::string(lyra::to_string(s.metric));
  d["corpus_value"] = s.corpus_value;
  d["per_segment"] = s.per_segment;
  d["params"] = s.params;
  return d;
}

lyra::TextLanguage text_language(const std::string& lang) {
  if (lang == "fr") return lyra::TextLanguage::fr;
  if (lang == "mo") return lyra::TextLanguage::mo;
  throw lyra::ValidationError("standardization language must be fr or mo, got '" + lang + "'");
}

}  // namespace

PYBIND11_MODULE(_lyra, m) {
  m.doc() = "Native core of the lyra translation toolkit";

  static py::exception<lyra::Error> base(m, "LyraError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const lyra::Error& e) {
      const std::string msg = "[" + std::string(lyra::to_string(e.category())) + "] " + e.what();
      PyErr_SetString(base.ptr(), msg.c_str());
    }
  });

  m.def("tokenize", &lyra::tokenize, py::arg("text"));

  m.def(
      "score",
      [](const std::string& metric, const std::vector<std::pair<std::string, std::string>>& pairs,
         bool lowercase) {
        lyra::MetricOptions opts;
        opts.lowercase = lowercase;
        const auto segs = to_pairs(pairs);
        lyra::MetricScore s;
        {
          py::gil_scoped_release release;
          s = lyra::compute_metric(lyra::parse_metric_kind(metric), segs, opts);
        }
        return score_dict(s);
      },
      py::arg("metric"), py::arg("pairs"), py::arg("lowercase") = false,
      "Corpus score over (hypothesis, reference) pairs; METEOR is on a 0-1 scale.");

  m.def(
      "sentence_bleu",
      [](const std::string& hyp, const std::string& ref) { return lyra::bleu_sentence({hyp, ref}); },
      py::arg("hypothesis"), py::arg("reference"));

  m.def(
      "standardize_text",
      [](const std::string& text, const std::string& lang, std::optional<std::vector<std::string>> rules) {
        const auto language = text_language(lang);
        const auto cfg = rules ? lyra::RuleConfig(*rules, language) : lyra::RuleConfig::defaults(language);
        lyra::RuleHits hits;
        auto out = lyra::standardize_text(text, cfg, &hits);
        return py::make_tuple(out, hits);
      },
      py::arg("text"), py::arg("lang") = "fr", py::arg("rules") = py::none(),
      "Returns (standardized text, rule hit counts).");

  m.def("spell_number_fr", &lyra::spell_number_fr, py::arg("n"));

  m.def(
      "fallback_embed",
      [](const std::string& text, std::size_t dim) { return lyra::fallback_embed(text, dim).values; },
      py::arg("text"), py::arg("dim") = 256);

  m.def(
      "cosine_similarity",
      [](const std::vector<double>& a, const std::vector<double>& b) { return lyra::cosine_similarity(a, b); },
      py::arg("a"), py::arg("b"));

  py::class_<lyra::EmbeddingIndex>(m, "EmbeddingIndex")
      .def_static(
          "build",
          [](const std::vector<std::string>& ids, const std::vector<std::vector<float>>& vectors,
             const std::string& model, const std::string& built_at) {
            if (ids.size() != vectors.size()) {
              throw lyra::ValidationError("ids and vectors differ in length");
            }
            std::vector<lyra::EmbeddingVector> vecs;
            for (std::size_t i = 0; i < ids.size(); ++i) vecs.push_back({ids[i], vectors[i]});
            return lyra::EmbeddingIndex::build(vecs, {model, built_at});
          },
          py::arg("ids"), py::arg("vectors"), py::arg("model") = "", py::arg("built_at") = "")
      .def_static("load", &lyra::load_index, py::arg("path"))
      .def("save", [](const lyra::EmbeddingIndex& idx, const std::filesystem::path& p) { lyra::save_index(idx, p); })
      .def_property_readonly("dim", &lyra::EmbeddingIndex::dim)
      .def_property_readonly("model", [](const lyra::EmbeddingIndex& i) { return i.meta().model; })
      .def("__len__", &lyra::EmbeddingIndex::size)
      .def(
          "query",
          [](const lyra::EmbeddingIndex& idx, const std::vector<float>& q, std::size_t k) {
            std::vector<std::pair<std::string, double>> out;
            for (auto& h : lyra::query_knn(idx, q, k)) out.emplace_back(h.pair_id, h.score);
            return out;
          },
          py::arg("vector"), py::arg("k") = lyra::kDefaultRetrievalK);

  m.def(
      "load_corpus",
      [](const std::filesystem::path& path, const std::string& pair) {
        const auto d = lyra::Direction::parse(pair);
        const auto corpus = lyra::load_corpus(path, {d.source, d.target});
        py::list out;
        for (const auto& p : corpus.pairs()) {
          py::dict row;
          row["id"] = p.id;
          row[py::str(d.source)] = p.src;
          row[py::str(d.target)] = p.tgt;
          row["kind"] = std::string(lyra::to_string(p.kind));
          row["source"] = p.provenance;
          out.append(row);
        }
        return out;
      },
      py::arg("path"), py::arg("pair") = "fr-mo");

  m.def(
      "render_prompt",
      [](const std::string& query, const std::string& direction,
         const std::vector<std::pair<std::string, std::string>>& examples, const std::string& template_id) {
        lyra::FewShotPrompt prompt;
        prompt.direction = lyra::Direction::parse(direction);
        prompt.query = query;
        prompt.template_id = template_id;
        std::size_t i = 0;
        for (const auto& [src, tgt] : examples) {
          prompt.examples.push_back({"ex-" + std::to_string(++i), 0.0, src, tgt});
        }
        return lyra::render(prompt);
      },
      py::arg("query"), py::arg("direction") = "fr-mo",
      py::arg("examples") = std::vector<std::pair<std::string, std::string>>{},
      py::arg("template_id") = "plain");

  m.def(
      "training_manifest_json",
      [](const std::string& label) {
        return lyra::generate_training_manifest(lyra::parse_model_label(label)).to_json().dump();
      },
      py::arg("label"));

  m.def(
      "score_table",
      [](const std::string& cells_json, const std::string& layout) {
        const auto cells = lyra::parse_report_cells(nlohmann::json::parse(cells_json));
        const auto table = lyra::build_score_table(cells, lyra::parse_report_layout(layout));
        return py::make_tuple(table.to_text(), table.to_json().dump());
      },
      py::arg("cells_json"), py::arg("layout") = "bleu_meteor",
      "Returns (text table, JSON table).");

  m.def(
      "run_experiment_json",
      [](const std::filesystem::path& config_path, bool write) {
        const auto cfg = lyra::load_experiment_config(config_path);
        lyra::RunOptions opts;
        opts.write = write;
        lyra::RunRecord record;
        {
          py::gil_scoped_release release;
          record = lyra::run_experiment(cfg, opts);
        }
        return record.to_json().dump();
      },
      py::arg("config_path"), py::arg("write") = true);
}
