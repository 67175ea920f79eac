#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "epigrowth/segment.hpp"

namespace epigrowth {

enum class RateSource { data, simulation };

// One log-linear growth rate per period (1/day). Empty entries are periods that could
// not be fitted; `diagnostics` says why.
struct GrowthRates {
  std::array<std::optional<double>, period_count> k{};
  std::array<std::size_t, period_count> samples{};
  RateSource source = RateSource::data;
  std::vector<std::string> diagnostics;

  bool complete() const {
    for (const auto& v : k)
      if (!v) return false;
    return true;
  }
};

}  // namespace epigrowth
