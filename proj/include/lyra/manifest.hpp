#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lyra {

enum class ModelLabel { lyra_l, lyra_g, lyra_m, nllb };

/// "LYRA-L", "LYRA-G", "LYRA-M", "NLLB" (case-insensitive).
ModelLabel parse_model_label(std::string_view text);
std::string_view to_string(ModelLabel label) noexcept;

struct LoraSettings {
  int rank = 16;
  int alpha = 16;
  double dropout = 0.0;
  std::string bias = "none";
  std::vector<std::string> target_modules = {"q_proj",    "k_proj",  "v_proj",   "o_proj",
                                             "gate_proj", "up_proj", "down_proj"};
  bool rank_stabilized = true;
  /// LoftQ initialization is not used.
  std::optional<std::string> loftq_config;
};

/// Fine-tuning recipe handed to external training tooling. Fields the
/// recipe does not pin stay empty and serialize as null.
struct TrainingManifest {
  std::string label;
  std::string base_model;
  std::string quantization;
  std::optional<LoraSettings> lora;
  double learning_rate = 0.0;
  int batch_size = 0;
  std::optional<int> warmup_steps;
  std::optional<double> weight_decay;
  std::optional<std::string> lr_scheduler;
  std::optional<int> max_seq_length;
  std::optional<std::string> optimizer;
  std::optional<bool> packing;
  int epochs = 10;
  std::string early_stopping = "validation_loss";
  bool completion_only = false;
  std::string hardware = "1x NVIDIA A100 40GB";
  /// Inputs the trainer must be given; the validation split is not derived
  /// by this toolkit.
  std::vector<std::string> required_inputs = {"train_dataset", "validation_dataset"};

  nlohmann::ordered_json to_json() const;
};

TrainingManifest generate_training_manifest(ModelLabel label);

}  // namespace lyra
