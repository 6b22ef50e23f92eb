#include <array>
#include <stdexcept>
#include <string>

#include "lyra/standardize.hpp"

namespace lyra {

namespace {

constexpr std::array<const char*, 17> kUnits = {
    "zéro", "un",   "deux",   "trois",    "quatre", "cinq",  "six",   "sept",  "huit",
    "neuf", "dix",  "onze",   "douze",    "treize", "quatorze", "quinze", "seize"};

constexpr std::array<const char*, 7> kTens = {
    "", "", "vingt", "trente", "quarante", "cinquante", "soixante"};

// `final` marks the last group of the whole number: "quatre vingts" and
// "deux cents" only take their plural s there.
std::string below_hundred(int n, bool final) {
  if (n < 17) return kUnits[n];
  if (n < 20) return std::string("dix-") + kUnits[n - 10];
  if (n < 70) {
    const int unit = n % 10;
    std::string tens = kTens[n / 10];
    if (unit == 0) return tens;
    if (unit == 1) return tens + " et un";
    return tens + "-" + kUnits[unit];
  }
  if (n < 80) {
    if (n == 71) return "soixante et onze";
    return "soixante-" + below_hundred(n - 60, final);
  }
  const int rest = n - 80;
  if (rest == 0) return final ? "quatre vingts" : "quatre vingt";
  return "quatre vingt " + below_hundred(rest, final);
}

std::string below_thousand(int n, bool final) {
  const int hundreds = n / 100;
  const int rest = n % 100;
  if (hundreds == 0) return below_hundred(rest, final);
  std::string out = hundreds == 1 ? "cent" : std::string(kUnits[hundreds]) + " cent";
  if (rest != 0) return out + " " + below_hundred(rest, final);
  if (hundreds > 1 && final) out += "s";
  return out;
}

}  // namespace

std::string spell_number_fr(std::int64_t n) {
  if (n < 0 || n >= 1'000'000) {
    throw std::out_of_range("spell_number_fr: " + std::to_string(n) +
                            " outside [0, 1000000)");
  }
  const int value = static_cast<int>(n);
  if (value < 1000) return below_thousand(value, true);
  const int thousands = value / 1000;
  const int rest = value % 1000;
  std::string out = thousands == 1 ? "mille" : below_thousand(thousands, false) + " mille";
  if (rest != 0) out += " " + below_thousand(rest, true);
  return out;
}

}  // namespace lyra
