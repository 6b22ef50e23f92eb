#include "lyra/epoch_curve.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <utility>

#include "lyra/error.hpp"
#include "lyra/metrics.hpp"

namespace lyra {

std::vector<CurvePoint> epoch_curve(std::span<const EpochHypotheses> epochs,
                                    const std::map<std::string, std::vector<std::string>>& references) {
  std::set<std::pair<int, std::string>> seen;
  std::vector<CurvePoint> points;
  for (const auto& e : epochs) {
    if (!seen.emplace(e.epoch, e.direction).second) {
      throw ValidationError("epoch " + std::to_string(e.epoch) + " given twice for " + e.direction);
    }
    auto ref = references.find(e.direction);
    if (ref == references.end()) {
      throw ValidationError("no references for direction " + e.direction);
    }
    if (ref->second.size() != e.hypotheses.size()) {
      throw ValidationError("epoch " + std::to_string(e.epoch) + " " + e.direction + ": " +
                            std::to_string(e.hypotheses.size()) + " hypotheses for " +
                            std::to_string(ref->second.size()) + " references");
    }
    std::vector<SegmentPair> pairs;
    pairs.reserve(e.hypotheses.size());
    for (std::size_t i = 0; i < e.hypotheses.size(); ++i) pairs.push_back({e.hypotheses[i], ref->second[i]});
    points.push_back({e.epoch, e.direction, bleu_corpus(pairs).corpus_value});
  }
  std::sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.epoch != b.epoch ? a.epoch < b.epoch : a.direction < b.direction;
  });
  return points;
}

std::string curve_csv(std::span<const CurvePoint> points) {
  std::string out = "epoch,direction,bleu\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.4f", p.bleu);
    out += std::to_string(p.epoch) + "," + p.direction + "," + buf + "\n";
  }
  return out;
}

}  // namespace lyra
