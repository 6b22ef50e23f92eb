#include "lyra/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <tuple>

#include "lyra/error.hpp"
#include "lyra/utf8.hpp"

namespace lyra {

ReportLayout parse_report_layout(std::string_view text) {
  if (text == "bleu_meteor") return ReportLayout::bleu_meteor;
  if (text == "chrfpp" || text == "chrf++") return ReportLayout::chrfpp;
  throw ValidationError("unknown report layout '" + std::string(text) +
                        "' (expected bleu_meteor or chrfpp)");
}

std::string_view to_string(ReportLayout layout) noexcept {
  return layout == ReportLayout::chrfpp ? "chrfpp" : "bleu_meteor";
}

namespace {

std::vector<MetricKind> layout_metrics(ReportLayout layout) {
  if (layout == ReportLayout::chrfpp) return {MetricKind::chrf_pp};
  return {MetricKind::bleu, MetricKind::meteor};
}

std::string_view metric_header(MetricKind kind) {
  switch (kind) {
    case MetricKind::bleu: return "BLEU";
    case MetricKind::chrf_pp: return "chrF++";
    case MetricKind::meteor: return "METEOR";
  }
  return "";
}

/// Emphasis compares what the reader sees.
std::int64_t shown(double v) { return std::llround(v * 100.0); }

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string direction_label(const std::string& d) {
  auto dash = d.find('-');
  if (dash == std::string::npos) return d;
  return d.substr(0, dash) + "\xe2\x86\x92" + d.substr(dash + 1);
}

std::size_t width(std::string_view s) { return utf8::decode(s).size(); }

std::string pad(std::string s, std::size_t w) {
  auto n = width(s);
  if (n < w) s.append(w - n, ' ');
  return s;
}

/// Marks every row whose shown value equals the maximum among `rows`.
void mark_max(const std::vector<std::size_t>& rows, std::size_t col, std::vector<ReportRow>& table,
              std::vector<bool> ReportRow::*flag, std::vector<std::string>& warnings,
              const std::string& what) {
  std::int64_t best = shown(table[rows.front()].values[col]);
  for (auto r : rows) best = std::max(best, shown(table[r].values[col]));
  std::size_t marked = 0;
  for (auto r : rows) {
    if (shown(table[r].values[col]) == best) {
      (table[r].*flag)[col] = true;
      ++marked;
    }
  }
  if (marked > 1) {
    warnings.push_back("tie: " + std::to_string(marked) + " cells share the maximum " +
                       fixed2(static_cast<double>(best) / 100.0) + " in " + what);
  }
}

}  // namespace

ScoreTable build_score_table(std::span<const ReportCell> cells, ReportLayout layout) {
  if (cells.empty()) throw ValidationError("report: no cells to render");
  ScoreTable table;
  table.layout = layout;
  auto metrics = layout_metrics(layout);

  std::vector<std::string> directions;
  std::vector<std::pair<std::string, std::string>> row_keys;
  std::map<std::tuple<std::string, std::string, std::string, MetricKind>, double> grid;
  for (const auto& c : cells) {
    if (std::find(metrics.begin(), metrics.end(), c.metric) == metrics.end()) continue;
    if (!std::isfinite(c.value)) {
      throw ValidationError("report: non-finite value for " + c.model + " / " + c.variant);
    }
    if (std::find(directions.begin(), directions.end(), c.direction) == directions.end()) {
      directions.push_back(c.direction);
    }
    std::pair<std::string, std::string> key{c.model, c.variant};
    if (std::find(row_keys.begin(), row_keys.end(), key) == row_keys.end()) row_keys.push_back(key);
    auto [it, inserted] = grid.emplace(std::tuple{c.model, c.variant, c.direction, c.metric}, c.value);
    if (!inserted) {
      throw ValidationError("report: duplicate cell (" + c.model + " / " + c.variant + ", " +
                            c.direction + ", " + std::string(to_string(c.metric)) + ")");
    }
  }
  if (row_keys.empty()) {
    throw ValidationError("report: no cells for layout " + std::string(to_string(layout)));
  }

  // Keep a model's rows together even if its records arrived interleaved.
  std::vector<std::pair<std::string, std::string>> grouped;
  for (const auto& key : row_keys) {
    if (std::any_of(grouped.begin(), grouped.end(), [&](const auto& g) { return g == key; })) continue;
    for (const auto& other : row_keys) {
      if (other.first == key.first &&
          std::none_of(grouped.begin(), grouped.end(), [&](const auto& g) { return g == other; })) {
        grouped.push_back(other);
      }
    }
  }

  for (auto m : metrics) {
    for (const auto& d : directions) table.columns.push_back({d, m});
  }

  std::vector<std::string> missing;
  for (const auto& [model, variant] : grouped) {
    ReportRow row{model, variant, {}, {}, {}};
    for (const auto& col : table.columns) {
      auto it = grid.find({model, variant, col.direction, col.metric});
      if (it == grid.end()) {
        missing.push_back("(" + model + " / " + variant + ", " + col.direction + ", " +
                          std::string(to_string(col.metric)) + ")");
        row.values.push_back(0.0);
      } else {
        row.values.push_back(it->second);
      }
    }
    row.bold.assign(table.columns.size(), false);
    row.underline.assign(table.columns.size(), false);
    table.rows.push_back(std::move(row));
  }
  if (!missing.empty()) {
    std::string msg = "report: inconsistent grid, missing cells:";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }

  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r == 0 || table.rows[r].model != table.rows[r - 1].model) blocks.emplace_back();
    blocks.back().push_back(r);
  }
  std::vector<std::size_t> all(table.rows.size());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;

  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    std::string col_name = std::string(metric_header(table.columns[c].metric)) + " " +
                           table.columns[c].direction;
    mark_max(all, c, table.rows, &ReportRow::bold, table.warnings, col_name);
    for (const auto& block : blocks) {
      // A one-row block has nothing to compare against, unless it is the whole table.
      if (block.size() < 2 && blocks.size() > 1) continue;
      mark_max(block, c, table.rows, &ReportRow::underline, table.warnings,
               col_name + " within " + table.rows[block.front()].model);
    }
  }
  return table;
}

std::string ScoreTable::to_text() const {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Model", "Variant"};
  for (const auto& c : columns) {
    header.push_back(std::string(metric_header(c.metric)) + " " + direction_label(c.direction));
  }
  grid.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line{r.model, r.variant};
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::string v = fixed2(r.values[c]);
      if (r.underline[c]) v = "_" + v + "_";
      if (r.bold[c]) v = "**" + v + "**";
      line.push_back(v);
    }
    grid.push_back(line);
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], width(line[i]));
  }
  std::ostringstream out;
  for (std::size_t l = 0; l < grid.size(); ++l) {
    std::string text;
    for (std::size_t i = 0; i < grid[l].size(); ++i) {
      if (i > 0) text += " | ";
      text += pad(grid[l][i], widths[i]);
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
    if (l == 0) {
      std::string rule;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i > 0) rule += "-+-";
        rule.append(widths[i], '-');
      }
      out << rule << '\n';
    }
  }
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

nlohmann::ordered_json ScoreTable::to_json() const {
  nlohmann::ordered_json j;
  j["layout"] = to_string(layout);
  auto& cols = j["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : columns) {
    cols.push_back({{"direction", c.direction}, {"metric", to_string(c.metric)}});
  }
  auto& out_rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      cells.push_back({{"value", std::stod(fixed2(r.values[c]))},
                       {"bold", static_cast<bool>(r.bold[c])},
                       {"underline", static_cast<bool>(r.underline[c])}});
    }
    out_rows.push_back({{"model", r.model}, {"variant", r.variant}, {"cells", cells}});
  }
  j["warnings"] = warnings;
  return j;
}

std::vector<ReportCell> parse_report_cells(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object() && doc.contains("cells")) list = &doc.at("cells");
  if (!list->is_array()) throw ParseError("report cells: expected an array or {\"cells\": [...]}");
  std::vector<ReportCell> cells;
  std::size_t i = 0;
  for (const auto& item : *list) {
    ++i;
    try {
      ReportCell c;
      c.model = item.at("model").get<std::string>();
      c.variant = item.at("variant").get<std::string>();
      c.direction = item.at("direction").get<std::string>();
      c.metric = parse_metric_kind(item.at("metric").get<std::string>());
      c.value = item.at("value").get<double>();
      cells.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("report cells: entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return cells;
}

}  // namespace lyra
