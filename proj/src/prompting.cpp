#include "lyra/prompting.hpp"

#include <algorithm>

#include "lyra/error.hpp"

namespace lyra {

namespace {

struct Slots {
  std::string_view source_lang;
  std::string_view target_lang;
  std::string_view source;
  std::string_view target;
};

// Single pass so that placeholder-looking text inside values stays literal.
std::string fill(std::string_view tmpl, const Slots& slots) {
  std::string out;
  out.reserve(tmpl.size() + slots.source.size() + slots.target.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const auto name = tmpl.substr(i + 1, close - i - 1);
        const std::string_view* value = nullptr;
        if (name == "source_lang") value = &slots.source_lang;
        else if (name == "target_lang") value = &slots.target_lang;
        else if (name == "source") value = &slots.source;
        else if (name == "target") value = &slots.target;
        if (value != nullptr) {
          out.append(*value);
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

std::size_t count(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

const std::vector<std::string>& supported_languages() {
  static const std::vector<std::string> langs = {"fr", "mo", "it"};
  return langs;
}

std::string_view language_name(std::string_view code) {
  if (code == "fr") return "French";
  if (code == "mo") return "Monégasque";
  if (code == "it") return "Italian";
  throw ValidationError("unsupported language '" + std::string(code) + "'");
}

void Direction::validate() const {
  language_name(source);
  language_name(target);
  if (source == target) throw ValidationError("direction must change language (" + source + ")");
}

Direction Direction::parse(std::string_view text) {
  for (std::string_view sep : {std::string_view("->"), std::string_view("→"), std::string_view("-")}) {
    const auto pos = text.find(sep);
    if (pos != std::string_view::npos) {
      Direction d{std::string(text.substr(0, pos)), std::string(text.substr(pos + sep.size()))};
      d.validate();
      return d;
    }
  }
  throw ValidationError("cannot parse direction '" + std::string(text) + "' (expected e.g. fr-mo)");
}

FewShotPrompt build_translation_prompt(std::string_view query, const Direction& direction,
                                       std::span<const RetrievalHit> hits, const Corpus& corpus,
                                       std::string_view template_id, std::optional<std::size_t> k,
                                       std::optional<std::string_view> exclude_pair_id) {
  direction.validate();
  FewShotPrompt prompt;
  prompt.direction = direction;
  prompt.query = std::string(query);
  prompt.template_id = std::string(template_id);

  std::vector<RetrievalHit> ordered(hits.begin(), hits.end());
  std::stable_sort(ordered.begin(), ordered.end(), hit_before);

  const std::size_t limit = k.value_or(ordered.size());
  for (const auto& hit : ordered) {
    const ParallelPair* pair = corpus.find(hit.pair_id);
    if (pair == nullptr) throw ValidationError("retrieved pair '" + hit.pair_id + "' is not in the corpus");
    if (exclude_pair_id && hit.pair_id == *exclude_pair_id) continue;
    if (prompt.examples.size() >= limit) continue;
    prompt.examples.push_back({hit.pair_id, hit.score, corpus.text(*pair, direction.source),
                               corpus.text(*pair, direction.target)});
  }
  return prompt;
}

void PromptTemplate::validate() const {
  if (id.empty()) throw ConfigError("prompt template has no id");
  if (count(example, "{source}") != 1 || count(example, "{target}") != 1) {
    throw ConfigError("template '" + id + "': example must contain {source} and {target} once");
  }
  if (count(query, "{source}") != 1 || count(query, "{target}") != 0) {
    throw ConfigError("template '" + id + "': query must contain {source} once and no {target}");
  }
  const auto after = query.substr(query.find("{source}") + 8);
  if (after.find('\n') == std::string::npos) {
    throw ConfigError("template '" + id + "': query must end the source line with a newline");
  }
  if (separator.empty()) throw ConfigError("template '" + id + "': empty separator");
}

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry registry;
  PromptTemplate plain;
  plain.id = "plain";
  registry.add(plain);
  PromptTemplate chat;
  chat.id = "chat";
  chat.system_role = true;
  registry.add(chat);
  return registry;
}

void TemplateRegistry::add(PromptTemplate tmpl) {
  tmpl.validate();
  auto id = tmpl.id;
  templates_.insert_or_assign(std::move(id), std::move(tmpl));
}

bool TemplateRegistry::contains(std::string_view id) const { return templates_.find(id) != templates_.end(); }

const PromptTemplate& TemplateRegistry::get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ConfigError("prompt template '" + std::string(id) + "' is not registered");
  return it->second;
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

std::string escape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      const char next = text[i + 1];
      if (next == 'n') { out.push_back('\n'); ++i; continue; }
      if (next == 'r') { out.push_back('\r'); ++i; continue; }
      if (next == '\\') { out.push_back('\\'); ++i; continue; }
    }
    out.push_back(text[i]);
  }
  return out;
}

namespace {

struct RenderedParts {
  std::string instruction;
  std::string body;
};

RenderedParts render_parts(const FewShotPrompt& prompt, const PromptTemplate& tmpl) {
  const auto src_name = language_name(prompt.direction.source);
  const auto tgt_name = language_name(prompt.direction.target);
  RenderedParts parts;
  parts.instruction = fill(tmpl.instruction, {src_name, tgt_name, {}, {}});
  for (const auto& ex : prompt.examples) {
    const auto s = escape_field(ex.source);
    const auto t = escape_field(ex.target);
    parts.body += fill(tmpl.example, {src_name, tgt_name, s, t});
    parts.body += tmpl.separator;
  }
  const auto q = escape_field(prompt.query);
  parts.body += fill(tmpl.query, {src_name, tgt_name, q, {}});
  return parts;
}

}  // namespace

std::string render(const FewShotPrompt& prompt, const TemplateRegistry& registry) {
  const auto& tmpl = registry.get(prompt.template_id);
  auto parts = render_parts(prompt, tmpl);
  return parts.instruction + tmpl.separator + parts.body;
}

std::vector<ChatMessage> render_messages(const FewShotPrompt& prompt, const TemplateRegistry& registry) {
  const auto& tmpl = registry.get(prompt.template_id);
  auto parts = render_parts(prompt, tmpl);
  if (tmpl.system_role) {
    return {{"system", std::move(parts.instruction)}, {"user", std::move(parts.body)}};
  }
  return {{"user", parts.instruction + tmpl.separator + parts.body}};
}

std::optional<std::string> extract_query(std::string_view rendered, const PromptTemplate& tmpl,
                                         const Direction& direction) {
  const auto src_name = language_name(direction.source);
  const auto tgt_name = language_name(direction.target);
  const auto at = tmpl.query.find("{source}");
  if (at == std::string::npos) return std::nullopt;
  const std::string prefix = fill(std::string_view(tmpl.query).substr(0, at), {src_name, tgt_name, {}, {}});
  const std::string suffix = fill(std::string_view(tmpl.query).substr(at + 8), {src_name, tgt_name, {}, {}});
  if (rendered.size() < suffix.size() || rendered.substr(rendered.size() - suffix.size()) != suffix) {
    return std::nullopt;
  }
  const auto body = rendered.substr(0, rendered.size() - suffix.size());
  const auto line_start = body.rfind('\n');
  const auto last_line = line_start == std::string_view::npos ? body : body.substr(line_start + 1);
  const auto nl = prefix.rfind('\n');
  const std::string_view line_prefix =
      nl == std::string::npos ? std::string_view(prefix) : std::string_view(prefix).substr(nl + 1);
  if (last_line.substr(0, line_prefix.size()) != line_prefix) return std::nullopt;
  return unescape_field(last_line.substr(line_prefix.size()));
}

}  // namespace lyra
