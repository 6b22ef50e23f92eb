#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "lyra/corpus.hpp"
#include "lyra/prompting.hpp"

namespace lyra {

struct StagedBundle {
  std::filesystem::path phase1;
  std::filesystem::path phase2;
  std::filesystem::path manifest;
  std::size_t phase1_records = 0;
  std::size_t phase2_records = 0;
  std::vector<std::string> warnings;
};

/// Zero-shot prompt/completion records for training on completions only.
/// The prompt ends at the target label; the completion is " " + target text.
std::string staging_record(const ParallelPair& pair, const Corpus& corpus, const Direction& direction,
                           const TemplateRegistry& registry, std::string_view template_id);

/// Phase 1 trains French/Italian in the orientation matching `direction`
/// (French source when `direction` starts from French), phase 2 trains the
/// Monégasque pair. Writes phase1_fr_it.jsonl, phase2_fr_mo.jsonl and
/// manifest.json into `out_dir`.
StagedBundle stage_italian_phase(const Corpus& fr_it, const Corpus& fr_mo,
                                 const std::filesystem::path& out_dir,
                                 const Direction& direction = {"fr", "mo"},
                                 const TemplateRegistry& registry = TemplateRegistry::builtin(),
                                 std::string_view template_id = "plain", bool write = true);

}  // namespace lyra
