#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lyra {

struct EpochHypotheses {
  int epoch = 0;
  std::string direction;
  std::vector<std::string> hypotheses;
};

struct CurvePoint {
  int epoch = 0;
  std::string direction;
  double bleu = 0.0;
};

/// One point per (epoch, direction), sorted by epoch then direction.
/// `references` maps each direction to its line-aligned reference lines.
std::vector<CurvePoint> epoch_curve(std::span<const EpochHypotheses> epochs,
                                    const std::map<std::string, std::vector<std::string>>& references);

/// Header "epoch,direction,bleu"; BLEU printed with 4 decimals.
std::string curve_csv(std::span<const CurvePoint> points);

}  // namespace lyra
