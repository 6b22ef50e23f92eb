#include "lyra/manifest.hpp"

#include <algorithm>
#include <cctype>

#include "lyra/error.hpp"

namespace lyra {

ModelLabel parse_model_label(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "LYRA-L") return ModelLabel::lyra_l;
  if (upper == "LYRA-G") return ModelLabel::lyra_g;
  if (upper == "LYRA-M") return ModelLabel::lyra_m;
  if (upper == "NLLB") return ModelLabel::nllb;
  throw ValidationError("unknown model label '" + std::string(text) +
                        "' (expected LYRA-L, LYRA-G, LYRA-M or NLLB)");
}

std::string_view to_string(ModelLabel label) noexcept {
  switch (label) {
    case ModelLabel::lyra_l: return "LYRA-L";
    case ModelLabel::lyra_g: return "LYRA-G";
    case ModelLabel::lyra_m: return "LYRA-M";
    case ModelLabel::nllb: return "NLLB";
  }
  return "NLLB";
}

TrainingManifest generate_training_manifest(ModelLabel label) {
  TrainingManifest m;
  m.label = std::string(to_string(label));
  if (label == ModelLabel::nllb) {
    m.base_model = "nllb-200-distilled-1.3B";
    m.quantization = "none";
    m.learning_rate = 1e-5;
    m.batch_size = 32;
    return m;
  }

  switch (label) {
    case ModelLabel::lyra_l:
      m.base_model = "Llama-3.1-8B";
      m.learning_rate = 1e-5;
      break;
    case ModelLabel::lyra_g:
      m.base_model = "gemma-2-9b";
      m.learning_rate = 3e-5;
      break;
    case ModelLabel::lyra_m:
      m.base_model = "Mistral-Nemo-Instruct-2407";
      m.learning_rate = 1e-5;
      break;
    case ModelLabel::nllb:
      break;
  }
  m.quantization = "4bit";
  m.lora = LoraSettings{};
  m.batch_size = 48;
  m.warmup_steps = 100;
  m.weight_decay = 0.01;
  m.lr_scheduler = "cosine";
  m.max_seq_length = 2048;
  m.optimizer = "adamw_8bit";
  m.packing = false;
  m.completion_only = true;
  return m;
}

namespace {

template <typename T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json TrainingManifest::to_json() const {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["base_model"] = base_model;
  j["quantization"] = quantization;
  if (lora) {
    j["lora"] = {{"r", lora->rank},
                 {"lora_alpha", lora->alpha},
                 {"lora_dropout", lora->dropout},
                 {"bias", lora->bias},
                 {"target_modules", lora->target_modules},
                 {"use_rslora", lora->rank_stabilized},
                 {"loftq_config", opt(lora->loftq_config)}};
  } else {
    j["lora"] = nullptr;
  }
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["warmup_steps"] = opt(warmup_steps);
  j["weight_decay"] = opt(weight_decay);
  j["lr_scheduler_type"] = opt(lr_scheduler);
  j["max_seq_length"] = opt(max_seq_length);
  j["optim"] = opt(optimizer);
  j["packing"] = opt(packing);
  j["epochs"] = epochs;
  j["early_stopping"] = early_stopping;
  j["completion_only"] = completion_only;
  j["hardware"] = hardware;
  j["required_inputs"] = required_inputs;
  return j;
}

}  // namespace lyra
