#pragma once

#include <string>
#include <vector>

#include "sbandit/harness.hpp"

namespace sbandit {

struct PlotSeries {
  std::string label;
  std::vector<long> rounds;
  std::vector<double> mean;
  std::vector<double> std_dev;
};

PlotSeries regret_series(const AggregateResult& result, const std::string& label);

// mean curve with a one-sigma band per series, static SVG
void write_regret_svg(const std::vector<PlotSeries>& series, const std::string& title,
                      const std::string& path);

// long-format companion: policy,round,mean_regret,std_regret
void write_tidy_csv(const std::vector<PlotSeries>& series, const std::string& path);

}  // namespace sbandit
