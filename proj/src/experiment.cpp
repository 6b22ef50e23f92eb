#include "lyra/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <sstream>

#include <spdlog/spdlog.h>

#include "lyra/corpus.hpp"
#include "lyra/error.hpp"
#include "lyra/http_transport.hpp"
#include "lyra/io.hpp"
#include "lyra/retrieval.hpp"

namespace lyra {

namespace fs = std::filesystem;

namespace {

std::string env_or_empty(const std::string& name) {
  const char* v = name.empty() ? nullptr : std::getenv(name.c_str());
  return v == nullptr ? std::string() : std::string(v);
}

std::shared_ptr<Embedder> make_embedder(const ExperimentConfig& config, const EmbeddingIndex& index) {
  if (config.embedder.kind == "http") {
    HttpEmbedderConfig ec;
    ec.endpoint = config.embedder.endpoint;
    ec.model = config.embedder.model;
    ec.auth_token = env_or_empty(config.embedder.auth_env);
    ec.expected_dim = index.dim();
    ec.timeout = config.backend.timeout;
    ec.retry = config.backend.retry;
    return std::make_shared<HttpEmbedder>(ec, make_http_transport());
  }
  const std::size_t dim = config.embedder.dim == 0 ? index.dim() : config.embedder.dim;
  auto embedder = std::make_shared<FallbackEmbedder>(dim);
  if (!index.meta().model.empty() && index.meta().model != embedder->model_id()) {
    throw ConfigError("index was built with '" + index.meta().model + "' but the run embeds with '" +
                      embedder->model_id() + "'");
  }
  return embedder;
}

std::map<std::string, std::string> read_mock_table(const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(path.string() + ": mock table must map query to answer");
  std::map<std::string, std::string> table;
  for (const auto& [k, v] : doc.items()) {
    if (!v.is_string()) throw ConfigError(path.string() + ": answer for '" + k + "' is not a string");
    table.emplace(k, v.get<std::string>());
  }
  return table;
}

nlohmann::ordered_json score_json(const MetricScore& s) {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  return {{"metric", to_string(s.metric)},
          {"corpus_value", s.corpus_value},
          {"per_segment", s.per_segment},
          {"params", params}};
}

}  // namespace

nlohmann::ordered_json RunRecord::to_json() const {
  nlohmann::ordered_json j;
  j["run_id"] = run_id;
  j["config"] = config;
  auto& segs = j["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : segments) {
    nlohmann::ordered_json seg{{"pair_id", s.pair_id},
                               {"source", s.source},
                               {"reference", s.reference},
                               {"hypothesis", s.hypothesis},
                               {"examples", s.example_ids},
                               {"attempts", s.attempts}};
    if (s.error) {
      seg["error"] = {{"category", to_string(s.error->category)}, {"message", s.error->message}};
    } else {
      seg["error"] = nullptr;
    }
    segs.push_back(std::move(seg));
  }
  auto& sc = j["scores"] = nlohmann::ordered_json::array();
  for (const auto& s : scores) sc.push_back(score_json(s));
  j["failed_segments"] = failed_segments;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : backend_meta) meta[k] = v;
  j["backend_meta"] = meta;
  return j;
}

const MetricScore* RunRecord::score(MetricKind kind) const {
  for (const auto& s : scores) {
    if (s.metric == kind) return &s;
  }
  return nullptr;
}

std::vector<ReportCell> RunRecord::report_cells() const {
  std::vector<ReportCell> cells;
  const std::string model = config.value("model_label", std::string("mock"));
  const std::string variant(variant_label(parse_variant(config.value("variant", std::string("base")))));
  const std::string direction = config.value("direction", std::string("fr-mo"));
  for (const auto& s : scores) {
    const double scale = s.metric == MetricKind::meteor ? 100.0 : 1.0;
    cells.push_back({model, variant, direction, s.metric, s.corpus_value * scale});
  }
  return cells;
}

RunRecord run_record_from_json(const nlohmann::ordered_json& doc) {
  RunRecord r;
  try {
    r.run_id = doc.at("run_id").get<std::string>();
    r.config = doc.at("config");
    for (const auto& s : doc.at("segments")) {
      SegmentRecord seg;
      seg.pair_id = s.at("pair_id").get<std::string>();
      seg.source = s.at("source").get<std::string>();
      seg.reference = s.at("reference").get<std::string>();
      seg.hypothesis = s.at("hypothesis").get<std::string>();
      seg.example_ids = s.at("examples").get<std::vector<std::string>>();
      seg.attempts = s.at("attempts").get<int>();
      if (!s.at("error").is_null()) {
        seg.error = TranslationFailure{ErrorCategory::internal,
                                       s.at("error").at("message").get<std::string>()};
      }
      r.segments.push_back(std::move(seg));
    }
    for (const auto& s : doc.at("scores")) {
      MetricScore score;
      score.metric = parse_metric_kind(s.at("metric").get<std::string>());
      score.corpus_value = s.at("corpus_value").get<double>();
      score.per_segment = s.at("per_segment").get<std::vector<double>>();
      for (const auto& [k, v] : s.at("params").items()) score.params[k] = v.get<std::string>();
      r.scores.push_back(std::move(score));
    }
    r.failed_segments = doc.at("failed_segments").get<std::size_t>();
    for (const auto& [k, v] : doc.at("backend_meta").items()) r.backend_meta[k] = v.get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run record: ") + e.what());
  }
  return r;
}

RunRecord load_run_record(const fs::path& dir_or_file) {
  const fs::path file = fs::is_directory(dir_or_file) ? dir_or_file / "record.json" : dir_or_file;
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(read_file(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  RunRecord r = run_record_from_json(doc);
  r.directory = file.parent_path();
  return r;
}

void write_run_directory(const RunRecord& record, const std::vector<std::string>& prompts,
                         const std::string& log, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "config.json", record.config.dump(2) + "\n");
  std::string hyps;
  for (const auto& s : record.segments) {
    std::string line = s.hypothesis;
    for (auto& c : line) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    hyps += line + "\n";
  }
  write_file(dir / "hypotheses.txt", hyps);
  std::string prompt_lines;
  for (std::size_t i = 0; i < prompts.size() && i < record.segments.size(); ++i) {
    nlohmann::ordered_json p{{"pair_id", record.segments[i].pair_id}, {"prompt", prompts[i]}};
    prompt_lines += p.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) + "\n";
  }
  write_file(dir / "prompts.jsonl", prompt_lines);
  nlohmann::ordered_json scores = nlohmann::ordered_json::array();
  for (const auto& s : record.scores) {
    scores.push_back({{"metric", to_string(s.metric)}, {"corpus_value", s.corpus_value}});
  }
  write_file(dir / "scores.json", scores.dump(2) + "\n");
  write_file(dir / "record.json", record.to_json().dump(2) + "\n");
  nlohmann::ordered_json timing{{"wall_ms", record.timing.wall_ms},
                                {"mean_latency_ms", record.timing.mean_latency_ms}};
  write_file(dir / "timing.json", timing.dump(2) + "\n");
  write_file(dir / "run.log", log);
}

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  std::ostringstream log;
  auto note = [&](const std::string& line) {
    log << line << '\n';
    spdlog::info("{}", line);
  };

  const LangPair lang_pair{"fr", config.partner_language()};
  const Corpus test = load_corpus(config.test_path, lang_pair);
  if (test.empty()) throw ConfigError("test corpus " + config.test_path.string() + " is empty");
  note("test corpus: " + std::to_string(test.size()) + " pairs from " + config.test_path.generic_string());

  const bool retrieve = config.variant != Variant::base;
  Corpus train;
  EmbeddingIndex index;
  std::shared_ptr<Embedder> embedder;
  if (retrieve) {
    train = load_corpus(config.train_path, lang_pair);
    index = load_index(*config.index_path);
    if (index.empty()) {
      throw ConfigError("index " + config.index_path->string() + " is empty; retrieval needs examples");
    }
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (!train.contains(index.id(i))) {
        throw ConfigError("index entry '" + index.id(i) + "' is not in the training corpus");
      }
    }
    embedder = options.embedder ? options.embedder : make_embedder(config, index);
    if (embedder->dim() != index.dim()) {
      throw ConfigError("embedder dimension " + std::to_string(embedder->dim()) +
                        " does not match index dimension " + std::to_string(index.dim()));
    }
    note("index: " + std::to_string(index.size()) + " vectors, dim " + std::to_string(index.dim()) +
         ", model " + index.meta().model);
  }

  const TemplateRegistry registry = config.registry();
  const PromptTemplate& tmpl = registry.get(config.template_id);
  BackendConfig backend_config = config.backend;
  if (backend_config.stop.empty()) backend_config.stop = tmpl.stop;

  const auto& pairs = test.pairs();
  std::vector<std::string> queries;
  std::vector<std::string> references;
  for (const auto& p : pairs) {
    queries.push_back(test.text(p, config.direction.source));
    references.push_back(test.text(p, config.direction.target));
  }

  std::vector<std::vector<RetrievalHit>> hits(pairs.size());
  if (retrieve) {
    std::vector<std::string> lookups;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      lookups.push_back(config.retrieval_mode == RetrievalMode::reference_side ? test.text(pairs[i], "fr")
                                                                               : queries[i]);
      ids.push_back(pairs[i].id);
    }
    const auto vectors = embed_batch(lookups, *embedder, ids);
    // One extra neighbour so that dropping the query's own pair still leaves k.
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      hits[i] = query_knn(index, vectors[i].values, config.retrieval_k + 1);
    }
  }

  std::vector<TranslationRequest> requests;
  std::vector<std::string> prompts;
  std::vector<std::vector<std::string>> example_ids;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const FewShotPrompt prompt =
        build_translation_prompt(queries[i], config.direction, hits[i], train, config.template_id,
                                 config.retrieval_k, std::string_view(pairs[i].id));
    std::vector<std::string> used;
    for (const auto& e : prompt.examples) used.push_back(e.pair_id);
    example_ids.push_back(std::move(used));
    TranslationRequest req;
    req.query_id = pairs[i].id;
    req.query_text = queries[i];
    req.prompt_text = render(prompt, registry);
    req.messages = render_messages(prompt, registry);
    prompts.push_back(req.prompt_text);
    requests.push_back(std::move(req));
  }

  std::shared_ptr<Backend> backend = options.backend;
  if (!backend) {
    if (config.backend.kind == BackendKind::http) {
      backend = std::make_shared<HttpChatBackend>(config.backend, make_http_transport());
    } else {
      std::map<std::string, std::string> table;
      if (config.mock.mode == "identity") {
        for (std::size_t i = 0; i < pairs.size(); ++i) table.emplace(queries[i], references[i]);
      } else if (config.mock.mode == "table") {
        table = read_mock_table(config.mock.table);
      }
      backend = std::make_shared<MockBackend>(std::move(table), tmpl);
    }
  }
  note("translating " + std::to_string(requests.size()) + " segments " + config.direction.to_string() +
       " (variant " + std::string(to_string(config.variant)) + ", template " + config.template_id + ")");

  const auto results = translate_batch(requests, backend_config, *backend, options.sleep);

  RunRecord record;
  record.config = config.to_json();
  record.run_id = config.name + "-" + config.content_hash();
  double latency_sum = 0.0;
  std::vector<SegmentPair> scored;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& res = results[i];
    SegmentRecord seg;
    seg.pair_id = pairs[i].id;
    seg.source = queries[i];
    seg.reference = references[i];
    seg.hypothesis = res.ok() ? res.hypothesis : std::string();
    seg.example_ids = example_ids[i];
    seg.attempts = res.attempts;
    seg.error = res.error;
    if (res.ok()) {
      ++record.backend_meta[res.backend_meta.empty() ? std::string("<none>") : res.backend_meta];
      latency_sum += res.latency_ms;
    } else {
      ++record.failed_segments;
      note("segment " + seg.pair_id + " failed [" + std::string(to_string(res.error->category)) +
           "]: " + res.error->message);
    }
    scored.push_back({seg.hypothesis, seg.reference});
    record.segments.push_back(std::move(seg));
  }

  const double failed_ratio =
      static_cast<double>(record.failed_segments) / static_cast<double>(pairs.size());
  if (failed_ratio > config.abort_failure_ratio) {
    auto first_failed = std::find_if(results.begin(), results.end(), [](const auto& r) { return !r.ok(); });
    throw Error(first_failed->error->category, "run aborted: " + std::to_string(record.failed_segments) + " of " +
                    std::to_string(pairs.size()) + " segments failed");
  }

  // Failed segments count as empty hypotheses so the score reflects them.
  MetricOptions metric_options;
  metric_options.lowercase = config.lowercase;
  for (auto kind : config.metrics) {
    record.scores.push_back(compute_metric(kind, scored, metric_options));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", record.scores.back().corpus_value);
    note(std::string(to_string(kind)) + " = " + buf);
  }

  const std::size_t ok = pairs.size() - record.failed_segments;
  record.timing.mean_latency_ms = ok == 0 ? 0.0 : latency_sum / static_cast<double>(ok);
  record.timing.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();

  if (options.write) {
    record.directory = config.output_dir / record.run_id;
    write_run_directory(record, prompts, log.str(), record.directory);
  }
  return record;
}

}  // namespace lyra
