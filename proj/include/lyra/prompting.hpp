#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyra/corpus.hpp"
#include "lyra/retrieval.hpp"

namespace lyra {

/// Languages the prompts know how to name.
const std::vector<std::string>& supported_languages();
/// "French", "Monégasque", "Italian". Throws ValidationError otherwise.
std::string_view language_name(std::string_view code);

struct Direction {
  std::string source;
  std::string target;

  /// Throws ValidationError unless both codes are supported and distinct.
  void validate() const;
  /// "fr-mo" form, also accepts "fr->mo" and "fr→mo".
  static Direction parse(std::string_view text);
  std::string to_string() const { return source + "-" + target; }

  friend bool operator==(const Direction&, const Direction&) = default;
};

struct PromptExample {
  std::string pair_id;
  double score = 0.0;
  std::string source;
  std::string target;
};

struct FewShotPrompt {
  Direction direction;
  std::vector<PromptExample> examples;
  std::string query;
  std::string template_id = "plain";
};

/// Orients retrieved pairs to `direction`, drops the hit whose id equals
/// `exclude_pair_id`, then keeps at most `k` examples in hit order
/// (score descending, id ascending). `k` defaults to all hits. Throws
/// ValidationError for a hit id missing from `corpus`, or when there are hits
/// and the corpus cannot serve `direction`.
FewShotPrompt build_translation_prompt(std::string_view query, const Direction& direction,
                                       std::span<const RetrievalHit> hits, const Corpus& corpus,
                                       std::string_view template_id = "plain",
                                       std::optional<std::size_t> k = std::nullopt,
                                       std::optional<std::string_view> exclude_pair_id = std::nullopt);

struct ChatMessage {
  std::string role;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Text template with {source_lang}, {target_lang}, {source} and {target}
/// placeholders. The rendered prompt is
///
///   instruction + separator + (example + separator)* + query
///
/// Field values are escaped (backslash, newline, carriage return) so every
/// value occupies exactly one line. A template with `system_role` set is
/// sent as a system message holding the instruction plus a user message
/// holding the rest.
struct PromptTemplate {
  std::string id;
  std::string instruction = "Translate from {source_lang} to {target_lang}.";
  std::string example = "{source_lang}: {source}\n{target_lang}: {target}";
  std::string query = "{source_lang}: {source}\n{target_lang}:";
  std::string separator = "\n\n";
  bool system_role = false;
  /// Where a completion should be cut.
  std::vector<std::string> stop = {"\n"};

  /// Throws ConfigError when a required placeholder is missing or the query
  /// part does not end with the completion slot.
  void validate() const;
};

class TemplateRegistry {
 public:
  /// Registry holding "plain" and "chat".
  static TemplateRegistry builtin();

  void add(PromptTemplate tmpl);
  bool contains(std::string_view id) const;
  /// Throws ConfigError for an unregistered id.
  const PromptTemplate& get(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);

/// Deterministic rendering; throws ConfigError for an unregistered template.
std::string render(const FewShotPrompt& prompt,
                   const TemplateRegistry& registry = TemplateRegistry::builtin());

/// Message list for chat-style endpoints.
std::vector<ChatMessage> render_messages(const FewShotPrompt& prompt,
                                         const TemplateRegistry& registry = TemplateRegistry::builtin());

/// Recovers the (unescaped) query text from a rendered prompt, or nullopt
/// when the text does not end with the template's completion slot.
std::optional<std::string> extract_query(std::string_view rendered, const PromptTemplate& tmpl,
                                         const Direction& direction);

}  // namespace lyra
