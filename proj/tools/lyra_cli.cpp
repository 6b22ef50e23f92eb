#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyra/corpus.hpp"
#include "lyra/embedding.hpp"
#include "lyra/epoch_curve.hpp"
#include "lyra/error.hpp"
#include "lyra/experiment.hpp"
#include "lyra/http_transport.hpp"
#include "lyra/io.hpp"
#include "lyra/logging.hpp"
#include "lyra/manifest.hpp"
#include "lyra/metrics.hpp"
#include "lyra/report.hpp"
#include "lyra/retrieval.hpp"
#include "lyra/staging.hpp"
#include "lyra/standardize.hpp"

namespace fs = std::filesystem;
using namespace lyra;

namespace {

struct Globals {
  std::string verbosity = "normal";
  fs::path output_dir = ".";
  bool dry_run = false;
};

Globals g;

LangPair parse_lang_pair(const std::string& text) {
  const Direction d = Direction::parse(text);
  return {d.source, d.target};
}

TextLanguage text_language(const std::string& code) {
  return code == "fr" ? TextLanguage::fr : TextLanguage::mo;
}

fs::path out_path(const std::string& given, const std::string& fallback) {
  fs::path p = given.empty() ? fs::path(fallback) : fs::path(given);
  return p.is_absolute() ? p : g.output_dir / p;
}

void prepare_output_dir() {
  if (!g.dry_run) fs::create_directories(g.output_dir);
}

/// Dry runs print the resolved options of the active subcommand and stop.
bool dry_run_report(const CLI::App& sub, const nlohmann::ordered_json& extra = {}) {
  if (!g.dry_run) return false;
  std::cout << "# dry run: " << sub.get_name() << " (nothing written)\n";
  std::cout << "output_dir=" << g.output_dir.generic_string() << "\n";
  std::cout << "verbosity=" << g.verbosity << "\n";
  std::cout << sub.config_to_str(true, false);
  if (!extra.is_null()) std::cout << extra.dump(2) << "\n";
  return true;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string metric_label(MetricKind k) {
  switch (k) {
    case MetricKind::bleu: return "BLEU";
    case MetricKind::chrf_pp: return "chrF++";
    case MetricKind::meteor: return "METEOR";
  }
  return "";
}

// ingest ----------------------------------------------------------------------

struct IngestCmd {
  std::string input;
  std::string format = "jsonl";
  std::string pair = "fr-mo";
  std::string output;
  bool check_counts = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("ingest", "Validate a corpus file and write canonical JSONL");
    sub->add_option("--input,-i", input, "Input file")->required();
    sub->add_option("--format", format, "jsonl or opus-books")
        ->check(CLI::IsMember({"jsonl", "opus-books"}))
        ->capture_default_str();
    sub->add_option("--pair", pair, "Language pair of a jsonl input")->capture_default_str();
    sub->add_option("--output,-o", output, "Output corpus (default corpus.jsonl)");
    sub->add_flag("--check-counts", check_counts, "Compare kind counts with the published totals");
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    if (dry_run_report(sub)) return;
    prepare_output_dir();
    const Corpus corpus =
        format == "opus-books" ? ingest_opus_books(input) : load_corpus(input, parse_lang_pair(pair));
    const fs::path dest = out_path(output, "corpus.jsonl");
    export_corpus(corpus, dest);
    std::cout << "ingested " << corpus.size() << " pairs (" << corpus.lang_pair().source << "/"
              << corpus.lang_pair().target << ") -> " << dest.generic_string() << "\n";
    if (check_counts) {
      const auto report = validate_counts(corpus, published_counts());
      for (const auto& c : report.checks) {
        std::cout << "count " << c.key << ": expected " << c.expected << ", actual " << c.actual
                  << ", delta " << c.delta() << (c.pass() ? "" : "  MISMATCH") << "\n";
      }
    }
  }
};

// split -----------------------------------------------------------------------

struct SplitCmd {
  std::string input;
  std::string pair = "fr-mo";
  std::string test_ids;
  std::uint64_t seed = 0;
  double fraction = 0.0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("split", "Split a corpus into train.jsonl and test.jsonl");
    sub->add_option("--input,-i", input, "Corpus file")->required();
    sub->add_option("--pair", pair, "Language pair")->capture_default_str();
    auto* ids = sub->add_option("--test-ids", test_ids, "File with one test id per line");
    auto* s = sub->add_option("--seed", seed, "Seed for a random split");
    sub->add_option("--test-fraction", fraction, "Fraction of pairs held out")->needs(s);
    ids->excludes(s);
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    if (dry_run_report(sub)) return;
    prepare_output_dir();
    const Corpus corpus = load_corpus(input, parse_lang_pair(pair));
    SplitSpec spec;
    if (!test_ids.empty()) {
      spec = SplitSpec::explicit_set(read_lines(test_ids));
    } else if (sub.count("--seed") > 0) {
      spec = SplitSpec::random(seed, fraction);
    } else {
      throw CLI::ValidationError("split", "give --test-ids or --seed with --test-fraction");
    }
    const auto split = split_train_test(corpus, spec);
    export_corpus(split.train, out_path("train.jsonl", ""));
    export_corpus(split.test, out_path("test.jsonl", ""));
    std::cout << "train " << split.train.size() << ", test " << split.test.size() << "\n";
  }
};

// standardize -----------------------------------------------------------------

struct StandardizeCmd {
  std::string input;
  std::string pair = "fr-mo";
  std::string rules;
  std::vector<std::string> disable;
  std::string output;
  std::string report;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("standardize", "Apply the standardization rules to a corpus");
    sub->add_option("--input,-i", input, "Corpus file")->required();
    sub->add_option("--pair", pair, "Language pair")->capture_default_str();
    sub->add_option("--rules", rules, "Comma-separated rule list (default: built-in order)");
    sub->add_option("--disable", disable, "Rule to switch off (repeatable)");
    sub->add_option("--output,-o", output, "Output corpus (default standardized.jsonl)");
    sub->add_option("--report", report, "Report file (default standardize_report.txt)");
    sub->callback([this, sub] { run(*sub); });
  }

  RuleConfig config_for(const std::string& lang) const {
    RuleConfig cfg = rules.empty() ? RuleConfig::defaults(text_language(lang))
                                   : RuleConfig(split_list(rules), text_language(lang));
    for (const auto& d : disable) cfg = cfg.without(d);
    return cfg;
  }

  void run(const CLI::App& sub) {
    const LangPair lp = parse_lang_pair(pair);
    const RuleConfig src = config_for(lp.source);
    const RuleConfig tgt = config_for(lp.target);
    nlohmann::ordered_json resolved{{"source_rules", src.enabled_rules()},
                                    {"target_rules", tgt.enabled_rules()}};
    if (dry_run_report(sub, resolved)) return;
    prepare_output_dir();
    const Corpus corpus = load_corpus(input, lp);
    const auto result = standardize_corpus(corpus, src, tgt);
    const fs::path dest = out_path(output, "standardized.jsonl");
    export_corpus(result.corpus, dest);
    const std::string text = result.report.to_text();
    write_file(out_path(report, "standardize_report.txt"), text);
    std::cout << text;
  }
};

// embed / index ---------------------------------------------------------------

struct EmbedOptions {
  std::string embedder = "fallback";
  std::size_t dim = 256;
  std::string endpoint;
  std::string model = kDefaultEmbeddingModel;
  std::string auth_env = "LYRA_EMBED_TOKEN";

  void add(CLI::App* sub) {
    sub->add_option("--embedder", embedder, "fallback or http")
        ->check(CLI::IsMember({"fallback", "http"}))
        ->capture_default_str();
    sub->add_option("--dim", dim, "Embedding dimension")->capture_default_str();
    sub->add_option("--endpoint", endpoint, "Embedding service URL");
    sub->add_option("--model", model, "Embedding model identifier")->capture_default_str();
    sub->add_option("--auth-env", auth_env, "Environment variable holding the bearer token")
        ->capture_default_str();
  }

  std::unique_ptr<Embedder> make() const {
    if (embedder == "http") {
      HttpEmbedderConfig cfg;
      cfg.endpoint = endpoint;
      cfg.model = model;
      cfg.expected_dim = dim;
      if (const char* t = std::getenv(auth_env.c_str())) cfg.auth_token = t;
      if (endpoint.empty()) throw ConfigError("--endpoint is required for the http embedder");
      return std::make_unique<HttpEmbedder>(cfg, make_http_transport());
    }
    return std::make_unique<FallbackEmbedder>(dim);
  }
};

std::vector<EmbeddingVector> embed_corpus_side(const std::string& input, const std::string& pair,
                                               const std::string& lang, Embedder& embedder) {
  const Corpus corpus = load_corpus(input, parse_lang_pair(pair));
  std::vector<std::string> texts;
  std::vector<std::string> ids;
  for (const auto& p : corpus.pairs()) {
    texts.push_back(corpus.text(p, lang));
    ids.push_back(p.id);
  }
  return embed_batch(texts, embedder, ids);
}

struct EmbedCmd {
  std::string input;
  std::string pair = "fr-mo";
  std::string lang = "fr";
  std::string output;
  EmbedOptions opts;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("embed", "Embed one side of a corpus into a JSONL vector file");
    sub->add_option("--input,-i", input, "Corpus file")->required();
    sub->add_option("--pair", pair, "Language pair")->capture_default_str();
    sub->add_option("--lang", lang, "Side to embed")->capture_default_str();
    sub->add_option("--output,-o", output, "Vector file (default vectors.jsonl)");
    opts.add(sub);
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    if (dry_run_report(sub)) return;
    prepare_output_dir();
    auto embedder = opts.make();
    const auto vectors = embed_corpus_side(input, pair, lang, *embedder);
    std::string out;
    for (const auto& v : vectors) {
      nlohmann::ordered_json rec{{"id", v.pair_id}, {"model", embedder->model_id()}, {"vector", v.values}};
      out += rec.dump(-1, ' ', false) + "\n";
    }
    const fs::path dest = out_path(output, "vectors.jsonl");
    write_file(dest, out);
    std::cout << "embedded " << vectors.size() << " texts -> " << dest.generic_string() << "\n";
  }
};

struct IndexCmd {
  std::string corpus;
  std::string vectors;
  std::string pair = "fr-mo";
  std::string lang = "fr";
  std::string output;
  std::string built_at = "unspecified";
  EmbedOptions opts;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("index", "Build a retrieval index from a corpus or vector file");
    auto* c = sub->add_option("--corpus", corpus, "Corpus to embed and index");
    auto* v = sub->add_option("--vectors", vectors, "JSONL vectors from `lyra embed`");
    c->excludes(v);
    sub->add_option("--pair", pair, "Language pair")->capture_default_str();
    sub->add_option("--lang", lang, "Side to embed")->capture_default_str();
    sub->add_option("--output,-o", output, "Index file (default index.lyra)");
    sub->add_option("--built-at", built_at, "Build label stored in the index header")
        ->capture_default_str();
    opts.add(sub);
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    if (corpus.empty() && vectors.empty()) {
      throw CLI::ValidationError("index", "give --corpus or --vectors");
    }
    if (dry_run_report(sub)) return;
    prepare_output_dir();
    std::vector<EmbeddingVector> vecs;
    std::string model;
    if (!corpus.empty()) {
      auto embedder = opts.make();
      vecs = embed_corpus_side(corpus, pair, lang, *embedder);
      model = embedder->model_id();
    } else {
      std::size_t line_no = 0;
      for (const auto& line : read_lines(vectors)) {
        ++line_no;
        if (line.empty()) continue;
        try {
          const auto rec = nlohmann::json::parse(line);
          vecs.push_back({rec.at("id").get<std::string>(), rec.at("vector").get<std::vector<float>>()});
          if (model.empty()) model = rec.value("model", std::string());
        } catch (const nlohmann::json::exception& e) {
          throw ParseError(vectors + ":" + std::to_string(line_no) + ": " + e.what());
        }
      }
    }
    const auto index = EmbeddingIndex::build(vecs, {model, built_at});
    const fs::path dest = out_path(output, "index.lyra");
    save_index(index, dest);
    std::cout << "indexed " << index.size() << " vectors (dim " << index.dim() << ") -> "
              << dest.generic_string() << "\n";
  }
};

// translate / run -------------------------------------------------------------

struct ExperimentFlags {
  std::string experiment;
  std::string test;
  std::string train;
  std::string index;
  std::string direction;
  std::string variant;
  std::string mock;
  std::string endpoint;
  std::string model;
  std::string template_id;
  std::string model_label;
  std::string name;
  std::optional<std::size_t> k;
  std::optional<int> max_inflight;

  void add(CLI::App* sub) {
    sub->add_option("--experiment,-e", experiment, "Experiment config (JSON)");
    sub->add_option("--test", test, "Test corpus");
    sub->add_option("--train", train, "Training corpus used for retrieval");
    sub->add_option("--index", index, "Retrieval index");
    sub->add_option("--direction", direction, "e.g. fr-mo");
    sub->add_option("--variant", variant, "base, rag or rag_plus_italian");
    sub->add_option("--mock", mock, "Use the offline mock backend: identity, echo or a table file");
    sub->add_option("--endpoint", endpoint, "Chat completion endpoint");
    sub->add_option("--model", model, "Backend model identifier");
    sub->add_option("--template", template_id, "Prompt template id");
    sub->add_option("--model-label", model_label, "Model label shown in reports");
    sub->add_option("--name", name, "Run name");
    sub->add_option("-k", k, "Number of retrieved examples");
    sub->add_option("--max-inflight", max_inflight, "Concurrent backend requests");
  }

  ExperimentConfig resolve() const {
    nlohmann::json doc = nlohmann::json::object();
    fs::path base;
    if (!experiment.empty()) {
      try {
        doc = nlohmann::json::parse(read_file(experiment));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(experiment + ": " + e.what());
      }
      base = fs::path(experiment).parent_path();
    }
    // Flag values are relative to the working directory, not the config file.
    auto abs = [](const std::string& p) { return fs::absolute(p).lexically_normal().generic_string(); };
    if (!name.empty()) doc["name"] = name;
    if (!doc.contains("name")) doc["name"] = "run";
    if (!model_label.empty()) doc["model_label"] = model_label;
    if (!direction.empty()) doc["direction"] = direction;
    if (!variant.empty()) doc["variant"] = variant;
    if (!template_id.empty()) doc["template_id"] = template_id;
    if (!test.empty()) doc["corpus"]["test"] = abs(test);
    if (!train.empty()) doc["corpus"]["train"] = abs(train);
    if (!index.empty()) doc["retrieval"]["index"] = abs(index);
    if (k) doc["retrieval"]["k"] = *k;
    if (!mock.empty()) {
      doc["backend"]["kind"] = "mock";
      if (mock == "identity" || mock == "echo") {
        doc["mock"]["mode"] = mock;
      } else {
        doc["mock"]["mode"] = "table";
        doc["mock"]["table"] = abs(mock);
      }
    }
    if (!endpoint.empty()) {
      doc["backend"]["kind"] = "http";
      doc["backend"]["endpoint"] = endpoint;
    }
    if (!model.empty()) doc["backend"]["model"] = model;
    if (max_inflight) doc["backend"]["max_inflight"] = *max_inflight;
    if (!doc.contains("output_dir")) doc["output_dir"] = g.output_dir.generic_string();
    return parse_experiment_config(doc, base);
  }
};

struct TranslateCmd {
  ExperimentFlags flags;
  std::string output;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("translate", "Translate a test corpus and write hypotheses");
    flags.add(sub);
    sub->add_option("--output,-o", output, "Hypothesis file (default hypotheses.txt)");
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    const ExperimentConfig cfg = flags.resolve();
    if (dry_run_report(sub, cfg.to_json())) return;
    prepare_output_dir();
    RunOptions opts;
    opts.write = false;
    const RunRecord record = run_experiment(cfg, opts);
    std::string text;
    for (const auto& s : record.segments) text += s.hypothesis + "\n";
    const fs::path dest = out_path(output, "hypotheses.txt");
    write_file(dest, text);
    std::cout << "translated " << record.segments.size() << " segments (" << record.failed_segments
              << " failed) -> " << dest.generic_string() << "\n";
  }
};

struct RunCmd {
  ExperimentFlags flags;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("run", "Run an experiment end to end and record it");
    flags.add(sub);
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    const ExperimentConfig cfg = flags.resolve();
    if (dry_run_report(sub, cfg.to_json())) return;
    prepare_output_dir();
    const RunRecord record = run_experiment(cfg);
    std::cout << "run " << record.run_id << ": " << record.segments.size() << " segments, "
              << record.failed_segments << " failed\n";
    for (const auto& s : record.scores) {
      const double scale = s.metric == MetricKind::meteor ? 100.0 : 1.0;
      std::cout << metric_label(s.metric) << " " << fixed(s.corpus_value * scale, 2) << "\n";
    }
    std::cout << "record -> " << record.directory.generic_string() << "\n";
  }
};

// score -----------------------------------------------------------------------

struct ScoreCmd {
  std::string hyp;
  std::string ref;
  std::string metrics = "bleu,chrf++,meteor";
  bool lowercase = false;
  std::string json;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("score", "Score line-aligned hypothesis and reference files");
    sub->add_option("--hyp", hyp, "Hypothesis file")->required();
    sub->add_option("--ref", ref, "Reference file")->required();
    sub->add_option("--metrics", metrics, "Comma-separated metrics")->capture_default_str();
    sub->add_flag("--lowercase", lowercase, "Lowercase both sides before scoring");
    sub->add_option("--json", json, "Also write the scores as JSON");
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    std::vector<MetricKind> kinds;
    for (const auto& m : split_list(metrics)) kinds.push_back(parse_metric_kind(m));
    if (dry_run_report(sub)) return;
    const auto hyps = read_lines(hyp);
    const auto refs = read_lines(ref);
    if (hyps.size() != refs.size()) {
      throw ValidationError(hyp + " has " + std::to_string(hyps.size()) + " lines but " + ref + " has " +
                            std::to_string(refs.size()));
    }
    std::vector<SegmentPair> pairs;
    for (std::size_t i = 0; i < hyps.size(); ++i) pairs.push_back({hyps[i], refs[i]});
    MetricOptions opts;
    opts.lowercase = lowercase;
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (auto k : kinds) {
      const auto s = compute_metric(k, pairs, opts);
      const double scale = k == MetricKind::meteor ? 100.0 : 1.0;
      std::cout << metric_label(k) << " " << fixed(s.corpus_value * scale, 2) << "\n";
      out.push_back({{"metric", to_string(k)}, {"corpus_value", s.corpus_value}, {"per_segment", s.per_segment}});
    }
    if (!json.empty()) {
      prepare_output_dir();
      write_file(out_path(json, ""), out.dump(2) + "\n");
    }
  }
};

// report ----------------------------------------------------------------------

struct ReportCmd {
  std::vector<std::string> inputs;
  std::string layout = "bleu_meteor";
  std::string output;
  std::string json;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("report", "Render a score table from run records or cell files");
    sub->add_option("inputs", inputs, "Run directories, record.json files or cell JSON files")->required();
    sub->add_option("--layout", layout, "bleu_meteor or chrfpp")->capture_default_str();
    sub->add_option("--output,-o", output, "Also write the text table here");
    sub->add_option("--json", json, "Also write the machine-readable table here");
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    const ReportLayout lay = parse_report_layout(layout);
    if (dry_run_report(sub)) return;
    std::vector<ReportCell> cells;
    for (const auto& in : inputs) {
      const fs::path p(in);
      if (fs::is_directory(p) || p.filename() == "record.json") {
        auto more = load_run_record(p).report_cells();
        cells.insert(cells.end(), more.begin(), more.end());
        continue;
      }
      nlohmann::ordered_json doc;
      try {
        doc = nlohmann::ordered_json::parse(read_file(p));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(in + ": " + e.what());
      }
      if (doc.is_object() && doc.contains("run_id")) {
        auto more = run_record_from_json(doc).report_cells();
        cells.insert(cells.end(), more.begin(), more.end());
      } else {
        auto more = parse_report_cells(nlohmann::json(doc));
        cells.insert(cells.end(), more.begin(), more.end());
      }
    }
    const ScoreTable table = build_score_table(cells, lay);
    const std::string text = table.to_text();
    std::cout << text;
    if (!output.empty() || !json.empty()) prepare_output_dir();
    if (!output.empty()) write_file(out_path(output, ""), text);
    if (!json.empty()) write_file(out_path(json, ""), table.to_json().dump(2) + "\n");
  }
};

// stage -----------------------------------------------------------------------

struct StageCmd {
  std::string fr_it;
  std::string fr_mo;
  std::string direction = "fr-mo";
  std::string template_id = "plain";

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("stage", "Write the two-phase fr/it then fr/mo training bundles");
    sub->add_option("--fr-it", fr_it, "French/Italian corpus")->required();
    sub->add_option("--fr-mo", fr_mo, "French/Monégasque corpus")->required();
    sub->add_option("--direction", direction, "fr-mo or mo-fr")->capture_default_str();
    sub->add_option("--template", template_id, "Prompt template id")->capture_default_str();
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    if (dry_run_report(sub)) return;
    prepare_output_dir();
    const Corpus it = load_corpus(fr_it, {"fr", "it"});
    const Corpus mo = load_corpus(fr_mo, {"fr", "mo"});
    const auto bundle = stage_italian_phase(it, mo, g.output_dir, Direction::parse(direction),
                                            TemplateRegistry::builtin(), template_id);
    std::cout << "phase 1: " << bundle.phase1_records << " records -> " << bundle.phase1.generic_string()
              << "\nphase 2: " << bundle.phase2_records << " records -> " << bundle.phase2.generic_string()
              << "\nmanifest -> " << bundle.manifest.generic_string() << "\n";
  }
};

// manifest --------------------------------------------------------------------

struct ManifestCmd {
  std::string label;
  std::string output;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("manifest", "Emit the fine-tuning recipe for a model label");
    sub->add_option("--label", label, "LYRA-L, LYRA-G, LYRA-M or NLLB")->required();
    sub->add_option("--output,-o", output, "Write the manifest here instead of stdout");
    sub->callback([this, sub] { run(*sub); });
  }

  void run(const CLI::App& sub) {
    const auto m = generate_training_manifest(parse_model_label(label));
    if (dry_run_report(sub)) return;
    const std::string text = m.to_json().dump(2) + "\n";
    if (output.empty()) {
      std::cout << text;
      return;
    }
    prepare_output_dir();
    write_file(out_path(output, ""), text);
  }
};

// curve -----------------------------------------------------------------------

struct CurveCmd {
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  std::string output;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("curve", "BLEU per epoch as CSV");
    sub->add_option("--hyp", hyps, "EPOCH:DIRECTION:FILE (repeatable)")->required();
    sub->add_option("--ref", refs, "DIRECTION:FILE (repeatable)")->required();
    sub->add_option("--output,-o", output, "Write the CSV here instead of stdout");
    sub->callback([this, sub] { run(*sub); });
  }

  static std::vector<std::string> fields(const std::string& spec, std::size_t n) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (out.size() + 1 < n) {
      const auto colon = spec.find(':', start);
      if (colon == std::string::npos) break;
      out.push_back(spec.substr(start, colon - start));
      start = colon + 1;
    }
    out.push_back(spec.substr(start));
    if (out.size() != n) throw ValidationError("malformed curve argument '" + spec + "'");
    return out;
  }

  void run(const CLI::App& sub) {
    if (dry_run_report(sub)) return;
    std::map<std::string, std::vector<std::string>> references;
    for (const auto& r : refs) {
      const auto f = fields(r, 2);
      references[Direction::parse(f[0]).to_string()] = read_lines(f[1]);
    }
    std::vector<EpochHypotheses> epochs;
    for (const auto& h : hyps) {
      const auto f = fields(h, 3);
      int epoch = 0;
      try {
        epoch = std::stoi(f[0]);
      } catch (const std::exception&) {
        throw ValidationError("epoch '" + f[0] + "' is not an integer");
      }
      epochs.push_back({epoch, Direction::parse(f[1]).to_string(), read_lines(f[2])});
    }
    const auto points = epoch_curve(epochs, references);
    const std::string csv = curve_csv(points);
    if (output.empty()) {
      std::cout << csv;
      return;
    }
    prepare_output_dir();
    write_file(out_path(output, ""), csv);
  }
};

void print_error(std::string_view category, std::string_view message) {
  std::cerr << "error[" << category << "]: " << message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"French/Monégasque translation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with per-subcommand defaults; flags win");
  app.add_option("--verbosity,-v", g.verbosity, "quiet, normal or debug")
      ->check(CLI::IsMember({"quiet", "normal", "debug"}))
      ->capture_default_str();
  app.add_option("--output-dir", g.output_dir, "Where outputs go (created if absent)")->capture_default_str();
  app.add_flag("--dry-run", g.dry_run, "Print the resolved configuration and write nothing");

  IngestCmd ingest;
  SplitCmd split;
  StandardizeCmd standardize;
  EmbedCmd embed;
  IndexCmd index;
  TranslateCmd translate;
  ScoreCmd score;
  ReportCmd report;
  StageCmd stage;
  ManifestCmd manifest;
  CurveCmd curve;
  RunCmd run;
  ingest.add(app);
  split.add(app);
  standardize.add(app);
  embed.add(app);
  index.add(app);
  translate.add(app);
  score.add(app);
  report.add(app);
  stage.add(app);
  manifest.add(app);
  curve.add(app);
  run.add(app);
  for (auto* sub : app.get_subcommands({})) {
    sub->add_flag("--dry-run", g.dry_run, "Print the resolved configuration and write nothing");
  }
  app.parse_complete_callback([] { set_verbosity(parse_verbosity(g.verbosity)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const Error& e) {
    print_error(to_string(e.category()), e.what());
    return exit_code_for(e.category());
  } catch (const fs::filesystem_error& e) {
    print_error("io", e.what());
    return exit_code_for(ErrorCategory::io);
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 5;
  }
  return 0;
}
