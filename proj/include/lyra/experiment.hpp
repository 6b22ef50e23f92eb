#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lyra/backend.hpp"
#include "lyra/embedding.hpp"
#include "lyra/metrics.hpp"
#include "lyra/prompting.hpp"
#include "lyra/report.hpp"

namespace lyra {

/// rag_plus_italian is cumulative: a staged model queried with retrieval.
enum class Variant { base, rag, rag_plus_italian };

Variant parse_variant(std::string_view text);
std::string_view to_string(Variant variant) noexcept;
/// Row label used in reports: "Instruct", "+ RAG", "++ Italian corpus".
std::string_view variant_label(Variant variant) noexcept;

/// Which French text is embedded to look up neighbours. reference_side always
/// embeds the French side of the test pair, whatever the direction.
enum class RetrievalMode { reference_side, source_side };

RetrievalMode parse_retrieval_mode(std::string_view text);
std::string_view to_string(RetrievalMode mode) noexcept;

struct EmbedderSpec {
  std::string kind = "fallback";  // fallback | http
  /// 0 means "whatever the index was built with".
  std::size_t dim = 0;
  std::string endpoint;
  std::string model = kDefaultEmbeddingModel;
  std::string auth_env = "LYRA_EMBED_TOKEN";
};

struct MockSpec {
  /// identity answers each query with its reference; table reads a JSON
  /// object mapping query to answer; echo repeats the query.
  std::string mode = "identity";
  std::filesystem::path table;
};

struct ExperimentConfig {
  std::string name;
  std::string model_label = "mock";
  Direction direction{"fr", "mo"};
  Variant variant = Variant::base;
  std::size_t retrieval_k = kDefaultRetrievalK;
  RetrievalMode retrieval_mode = RetrievalMode::reference_side;
  BackendConfig backend;
  MockSpec mock;
  std::string template_id = "plain";
  std::vector<PromptTemplate> templates;
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  std::optional<std::filesystem::path> index_path;
  EmbedderSpec embedder;
  std::vector<MetricKind> metrics = {MetricKind::bleu, MetricKind::chrf_pp, MetricKind::meteor};
  bool lowercase = false;
  /// The run aborts when the failed fraction of segments exceeds this.
  double abort_failure_ratio = 0.5;
  std::filesystem::path output_dir = "runs";

  void validate() const;
  /// The non-French language of the direction, i.e. the corpus target side.
  std::string partner_language() const;
  TemplateRegistry registry() const;
  /// Canonical snapshot; paths are written as given after resolution.
  nlohmann::ordered_json to_json() const;
  /// 16 hex digits of FNV-1a over the compact snapshot.
  std::string content_hash() const;
};

/// Relative paths in the document resolve against `base_dir`. The endpoint
/// may be overridden by LYRA_BACKEND_ENDPOINT; tokens only come from the
/// environment variables named in the config.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct SegmentRecord {
  std::string pair_id;
  std::string source;
  std::string reference;
  std::string hypothesis;
  std::vector<std::string> example_ids;
  int attempts = 0;
  std::optional<TranslationFailure> error;
};

struct RunTiming {
  double wall_ms = 0.0;
  double mean_latency_ms = 0.0;
};

struct RunRecord {
  std::string run_id;
  nlohmann::ordered_json config;
  std::vector<SegmentRecord> segments;
  std::vector<MetricScore> scores;
  std::size_t failed_segments = 0;
  std::map<std::string, std::size_t> backend_meta;
  RunTiming timing;
  std::filesystem::path directory;

  /// Everything except timing, so equal inputs give equal bytes.
  nlohmann::ordered_json to_json() const;
  const MetricScore* score(MetricKind kind) const;
  std::vector<ReportCell> report_cells() const;
};

RunRecord run_record_from_json(const nlohmann::ordered_json& doc);
RunRecord load_run_record(const std::filesystem::path& dir_or_file);

struct RunOptions {
  /// Replace the configured backend or embedder, e.g. with an instrumented mock.
  std::shared_ptr<Backend> backend;
  std::shared_ptr<Embedder> embedder;
  bool write = true;
  Sleeper sleep = real_sleep;
};

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes config.json, hypotheses.txt, prompts.jsonl, scores.json,
/// record.json, timing.json and run.log into `dir`.
void write_run_directory(const RunRecord& record, const std::vector<std::string>& prompts,
                         const std::string& log, const std::filesystem::path& dir);

}  // namespace lyra
