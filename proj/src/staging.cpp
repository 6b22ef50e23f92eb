#include "lyra/staging.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lyra/error.hpp"
#include "lyra/io.hpp"

namespace lyra {

std::string staging_record(const ParallelPair& pair, const Corpus& corpus, const Direction& direction,
                           const TemplateRegistry& registry, std::string_view template_id) {
  FewShotPrompt prompt;
  prompt.direction = direction;
  prompt.query = corpus.text(pair, direction.source);
  prompt.template_id = std::string(template_id);
  nlohmann::ordered_json rec{{"id", pair.id},
                             {"prompt", render(prompt, registry)},
                             {"completion", " " + corpus.text(pair, direction.target)}};
  return rec.dump(-1, ' ', false) + "\n";
}

StagedBundle stage_italian_phase(const Corpus& fr_it, const Corpus& fr_mo,
                                 const std::filesystem::path& out_dir, const Direction& direction,
                                 const TemplateRegistry& registry, std::string_view template_id,
                                 bool write) {
  if (!(fr_it.lang_pair() == LangPair{"fr", "it"})) {
    throw ValidationError("phase-1 corpus must be fr/it, got " + fr_it.lang_pair().source + "/" +
                          fr_it.lang_pair().target);
  }
  if (!(fr_mo.lang_pair() == LangPair{"fr", "mo"})) {
    throw ValidationError("phase-2 corpus must be fr/mo, got " + fr_mo.lang_pair().source + "/" +
                          fr_mo.lang_pair().target);
  }
  direction.validate();
  if (!((direction.source == "fr" && direction.target == "mo") ||
        (direction.source == "mo" && direction.target == "fr"))) {
    throw ValidationError("staging direction must be fr-mo or mo-fr, got " + direction.to_string());
  }
  registry.get(template_id);

  const bool from_french = direction.source == "fr";
  const Direction phase1_dir = from_french ? Direction{"fr", "it"} : Direction{"it", "fr"};

  StagedBundle bundle;
  bundle.phase1 = out_dir / "phase1_fr_it.jsonl";
  bundle.phase2 = out_dir / "phase2_fr_mo.jsonl";
  bundle.manifest = out_dir / "manifest.json";

  std::string phase1;
  for (const auto& p : fr_it.pairs()) phase1 += staging_record(p, fr_it, phase1_dir, registry, template_id);
  std::string phase2;
  for (const auto& p : fr_mo.pairs()) phase2 += staging_record(p, fr_mo, direction, registry, template_id);
  bundle.phase1_records = fr_it.size();
  bundle.phase2_records = fr_mo.size();

  if (fr_it.empty()) bundle.warnings.push_back("fr/it corpus is empty; phase 1 bundle has no records");
  if (fr_mo.empty()) bundle.warnings.push_back("fr/mo corpus is empty; phase 2 bundle has no records");
  for (const auto& w : bundle.warnings) spdlog::warn("{}", w);

  if (write) {
    nlohmann::ordered_json manifest{
        {"direction", direction.to_string()},
        {"template_id", template_id},
        {"format", "prompt/completion JSONL, loss on completion only"},
        {"phases",
         {{{"order", 1},
           {"file", bundle.phase1.filename().string()},
           {"direction", phase1_dir.to_string()},
           {"records", bundle.phase1_records}},
          {{"order", 2},
           {"file", bundle.phase2.filename().string()},
           {"direction", direction.to_string()},
           {"records", bundle.phase2_records}}}},
        {"warnings", bundle.warnings}};
    write_file(bundle.phase1, phase1);
    write_file(bundle.phase2, phase2);
    write_file(bundle.manifest, manifest.dump(2) + "\n");
  }
  return bundle;
}

}  // namespace lyra
