#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lyra/metrics.hpp"

namespace lyra {

enum class ReportLayout { bleu_meteor, chrfpp };

ReportLayout parse_report_layout(std::string_view text);
std::string_view to_string(ReportLayout layout) noexcept;

/// One published or measured number. Values are on the display scale, so
/// METEOR is multiplied by 100 like BLEU and chrF++.
struct ReportCell {
  std::string model;
  std::string variant;
  std::string direction;
  MetricKind metric = MetricKind::bleu;
  double value = 0.0;
};

struct ReportColumn {
  std::string direction;
  MetricKind metric = MetricKind::bleu;
};

struct ReportRow {
  std::string model;
  std::string variant;
  std::vector<double> values;
  std::vector<bool> bold;
  std::vector<bool> underline;
};

/// Rows keep first-appearance order; consecutive rows sharing a model form a block.
struct ScoreTable {
  ReportLayout layout = ReportLayout::bleu_meteor;
  std::vector<ReportColumn> columns;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;

  /// Bold is `**v**`, underline `_v_`, both `**_v_**`.
  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
};

ScoreTable build_score_table(std::span<const ReportCell> cells, ReportLayout layout);

std::vector<ReportCell> parse_report_cells(const nlohmann::json& doc);

}  // namespace lyra
