#include <cstdint>
#include <cstdio>
#include <cstdlib>

#include "lyra/error.hpp"
#include "lyra/experiment.hpp"
#include "lyra/io.hpp"

namespace lyra {

namespace fs = std::filesystem;

Variant parse_variant(std::string_view text) {
  if (text == "base") return Variant::base;
  if (text == "rag") return Variant::rag;
  if (text == "rag_plus_italian") return Variant::rag_plus_italian;
  throw ConfigError("unknown variant '" + std::string(text) +
                    "' (expected base, rag or rag_plus_italian)");
}

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::base: return "base";
    case Variant::rag: return "rag";
    case Variant::rag_plus_italian: return "rag_plus_italian";
  }
  return "base";
}

std::string_view variant_label(Variant variant) noexcept {
  switch (variant) {
    case Variant::base: return "Instruct";
    case Variant::rag: return "+ RAG";
    case Variant::rag_plus_italian: return "++ Italian corpus";
  }
  return "Instruct";
}

RetrievalMode parse_retrieval_mode(std::string_view text) {
  if (text == "reference_side") return RetrievalMode::reference_side;
  if (text == "source_side") return RetrievalMode::source_side;
  throw ConfigError("unknown retrieval mode '" + std::string(text) +
                    "' (expected reference_side or source_side)");
}

std::string_view to_string(RetrievalMode mode) noexcept {
  return mode == RetrievalMode::source_side ? "source_side" : "reference_side";
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("experiment needs a name");
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) throw ConfigError("experiment name '" + name + "' may only use [A-Za-z0-9._-]");
  }
  try {
    direction.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  if (direction.source != "fr" && direction.target != "fr") {
    throw ConfigError("direction " + direction.to_string() + " must have French on one side");
  }
  if (retrieval_k == 0) throw ConfigError("retrieval_k must be positive");
  if (variant == Variant::base && index_path) {
    throw ConfigError("variant base takes no index (got " + index_path->string() + ")");
  }
  if (variant != Variant::base && !index_path) {
    throw ConfigError("variant " + std::string(to_string(variant)) + " requires an index path");
  }
  if (test_path.empty()) throw ConfigError("corpus.test is required");
  if (variant != Variant::base && train_path.empty()) {
    throw ConfigError("corpus.train is required when retrieving examples");
  }
  if (metrics.empty()) throw ConfigError("at least one metric is required");
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t j = i + 1; j < metrics.size(); ++j) {
      if (metrics[i] == metrics[j]) {
        throw ConfigError("metric " + std::string(to_string(metrics[i])) + " listed twice");
      }
    }
  }
  if (!(abort_failure_ratio >= 0.0 && abort_failure_ratio <= 1.0)) {
    throw ConfigError("abort_failure_ratio must lie in [0, 1]");
  }
  if (embedder.kind != "fallback" && embedder.kind != "http") {
    throw ConfigError("embedder.kind must be fallback or http");
  }
  if (embedder.kind == "http" && embedder.endpoint.empty()) {
    throw ConfigError("http embedder needs an endpoint");
  }
  if (mock.mode != "identity" && mock.mode != "echo" && mock.mode != "table") {
    throw ConfigError("mock.mode must be identity, echo or table");
  }
  if (backend.kind == BackendKind::mock && mock.mode == "table" && mock.table.empty()) {
    throw ConfigError("mock.mode table needs mock.table");
  }
  backend.validate();
  registry().get(template_id);
}

std::string ExperimentConfig::partner_language() const {
  return direction.source == "fr" ? direction.target : direction.source;
}

TemplateRegistry ExperimentConfig::registry() const {
  auto reg = TemplateRegistry::builtin();
  for (const auto& t : templates) {
    try {
      reg.add(t);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  }
  return reg;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["model_label"] = model_label;
  j["direction"] = direction.to_string();
  j["variant"] = to_string(variant);
  j["retrieval"] = {{"k", retrieval_k},
                    {"mode", to_string(retrieval_mode)},
                    {"index", index_path ? nlohmann::ordered_json(index_path->generic_string())
                                         : nlohmann::ordered_json(nullptr)}};
  j["embedder"] = {{"kind", embedder.kind},
                   {"dim", embedder.dim},
                   {"endpoint", embedder.endpoint},
                   {"model", embedder.model},
                   {"auth_env", embedder.auth_env}};
  nlohmann::ordered_json delays = nlohmann::ordered_json::array();
  for (auto d : backend.retry.delays) delays.push_back(d.count());
  j["backend"] = {{"kind", backend.kind == BackendKind::http ? "http" : "mock"},
                  {"endpoint", backend.endpoint},
                  {"model", backend.model},
                  {"auth_env", backend.auth_env},
                  {"timeout_ms", backend.timeout.count()},
                  {"max_inflight", backend.max_inflight},
                  {"decoding", backend.decoding},
                  {"max_attempts", backend.retry.max_attempts},
                  {"backoff_ms", delays},
                  {"stop", backend.stop},
                  {"max_tokens", backend.max_tokens ? nlohmann::ordered_json(*backend.max_tokens)
                                                    : nlohmann::ordered_json(nullptr)}};
  j["mock"] = {{"mode", mock.mode}, {"table", mock.table.generic_string()}};
  j["template_id"] = template_id;
  auto& tmpls = j["templates"] = nlohmann::ordered_json::object();
  for (const auto& t : templates) {
    tmpls[t.id] = {{"instruction", t.instruction}, {"example", t.example},
                   {"query", t.query},             {"separator", t.separator},
                   {"system_role", t.system_role}, {"stop", t.stop}};
  }
  j["corpus"] = {{"train", train_path.generic_string()}, {"test", test_path.generic_string()}};
  nlohmann::ordered_json ms = nlohmann::ordered_json::array();
  for (auto m : metrics) ms.push_back(to_string(m));
  j["metrics"] = ms;
  j["lowercase"] = lowercase;
  j["abort_failure_ratio"] = abort_failure_ratio;
  j["output_dir"] = output_dir.generic_string();
  return j;
}

std::string ExperimentConfig::content_hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

template <typename T>
T get_or(const nlohmann::json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  return obj.at(key).get<T>();
}

const nlohmann::json& section(const nlohmann::json& doc, const char* key) {
  static const nlohmann::json empty = nlohmann::json::object();
  if (!doc.contains(key) || doc.at(key).is_null()) return empty;
  if (!doc.at(key).is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return doc.at(key);
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known,
                    std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    bool found = false;
    for (auto k : known) found = found || k == key;
    if (!found) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c;
  try {
    reject_unknown(doc,
                   {"name", "model_label", "direction", "variant", "retrieval", "embedder",
                    "backend", "mock", "template_id", "templates", "corpus", "metrics",
                    "lowercase", "abort_failure_ratio", "output_dir"},
                   "config");
    c.name = get_or<std::string>(doc, "name", "");
    c.model_label = get_or<std::string>(doc, "model_label", c.model_label);
    try {
      c.direction = Direction::parse(get_or<std::string>(doc, "direction", "fr-mo"));
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
    c.variant = parse_variant(get_or<std::string>(doc, "variant", "base"));

    const auto& retrieval = section(doc, "retrieval");
    reject_unknown(retrieval, {"k", "mode", "index"}, "retrieval");
    const auto k = get_or<long long>(retrieval, "k", static_cast<long long>(kDefaultRetrievalK));
    if (k <= 0) throw ConfigError("retrieval.k must be positive");
    c.retrieval_k = static_cast<std::size_t>(k);
    c.retrieval_mode = parse_retrieval_mode(get_or<std::string>(retrieval, "mode", "reference_side"));
    if (auto idx = get_or<std::string>(retrieval, "index", ""); !idx.empty()) {
      c.index_path = resolve(base_dir, idx);
    }

    const auto& emb = section(doc, "embedder");
    reject_unknown(emb, {"kind", "dim", "endpoint", "model", "auth_env"}, "embedder");
    c.embedder.kind = get_or<std::string>(emb, "kind", c.embedder.kind);
    c.embedder.dim = get_or<std::size_t>(emb, "dim", 0);
    c.embedder.endpoint = get_or<std::string>(emb, "endpoint", "");
    c.embedder.model = get_or<std::string>(emb, "model", c.embedder.model);
    c.embedder.auth_env = get_or<std::string>(emb, "auth_env", c.embedder.auth_env);

    const auto& be = section(doc, "backend");
    reject_unknown(be,
                   {"kind", "endpoint", "model", "auth_env", "timeout_ms", "max_inflight",
                    "decoding", "max_attempts", "backoff_ms", "stop", "max_tokens"},
                   "backend");
    const auto kind = get_or<std::string>(be, "kind", "mock");
    if (kind == "http") {
      c.backend.kind = BackendKind::http;
    } else if (kind == "mock") {
      c.backend.kind = BackendKind::mock;
    } else {
      throw ConfigError("backend.kind must be http or mock");
    }
    c.backend.endpoint = get_or<std::string>(be, "endpoint", "");
    if (const char* env = std::getenv("LYRA_BACKEND_ENDPOINT"); env != nullptr && *env != '\0') {
      c.backend.endpoint = env;
    }
    c.backend.model = get_or<std::string>(be, "model", "");
    c.backend.auth_env = get_or<std::string>(be, "auth_env", c.backend.auth_env);
    c.backend.timeout = std::chrono::milliseconds(get_or<long long>(be, "timeout_ms", 60000));
    c.backend.max_inflight = get_or<int>(be, "max_inflight", 4);
    c.backend.decoding = get_or<std::string>(be, "decoding", "greedy");
    c.backend.retry.max_attempts = get_or<int>(be, "max_attempts", 3);
    if (be.contains("backoff_ms")) {
      c.backend.retry.delays.clear();
      for (const auto& d : be.at("backoff_ms")) {
        c.backend.retry.delays.emplace_back(d.get<long long>());
      }
    }
    c.backend.stop = get_or<std::vector<std::string>>(be, "stop", {});
    if (be.contains("max_tokens") && !be.at("max_tokens").is_null()) {
      c.backend.max_tokens = be.at("max_tokens").get<int>();
    }

    const auto& mock = section(doc, "mock");
    reject_unknown(mock, {"mode", "table"}, "mock");
    c.mock.mode = get_or<std::string>(mock, "mode", c.mock.mode);
    c.mock.table = resolve(base_dir, get_or<std::string>(mock, "table", ""));

    c.template_id = get_or<std::string>(doc, "template_id", "plain");
    for (const auto& [id, t] : section(doc, "templates").items()) {
      reject_unknown(t, {"instruction", "example", "query", "separator", "system_role", "stop"},
                     "templates." + id);
      PromptTemplate tmpl;
      tmpl.id = id;
      tmpl.instruction = get_or<std::string>(t, "instruction", tmpl.instruction);
      tmpl.example = get_or<std::string>(t, "example", tmpl.example);
      tmpl.query = get_or<std::string>(t, "query", tmpl.query);
      tmpl.separator = get_or<std::string>(t, "separator", tmpl.separator);
      tmpl.system_role = get_or<bool>(t, "system_role", false);
      tmpl.stop = get_or<std::vector<std::string>>(t, "stop", tmpl.stop);
      c.templates.push_back(std::move(tmpl));
    }

    const auto& corpus = section(doc, "corpus");
    reject_unknown(corpus, {"train", "test"}, "corpus");
    c.train_path = resolve(base_dir, get_or<std::string>(corpus, "train", ""));
    c.test_path = resolve(base_dir, get_or<std::string>(corpus, "test", ""));

    if (doc.contains("metrics")) {
      c.metrics.clear();
      for (const auto& m : doc.at("metrics")) {
        try {
          c.metrics.push_back(parse_metric_kind(m.get<std::string>()));
        } catch (const ValidationError& e) {
          throw ConfigError(e.what());
        }
      }
    }
    c.lowercase = get_or<bool>(doc, "lowercase", false);
    c.abort_failure_ratio = get_or<double>(doc, "abort_failure_ratio", 0.5);
    c.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "runs"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

}  // namespace lyra
