#include "sbandit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sbandit {

DiscountSequence DiscountSequence::ones(long T) {
  DiscountSequence d;
  d.gammas.assign(static_cast<std::size_t>(T), 1.0);
  return d;
}

DiscountSequence DiscountSequence::inverse_t(long T) {
  DiscountSequence d;
  d.gammas.resize(static_cast<std::size_t>(T));
  for (long t = 1; t <= T; ++t)
    d.gammas[static_cast<std::size_t>(t - 1)] = 1.0 / static_cast<double>(t);
  return d;
}

void DiscountSequence::validate(int n_agents) const {
  long positive = 0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0.0) throw ConfigError("discount sequence has a negative entry");
    if (i > 0 && gammas[i] > gammas[i - 1])
      throw ConfigError("discount sequence must be non-increasing");
    if (gammas[i] > 0.0) ++positive;
  }
  if (positive < n_agents)
    throw ConfigError("discount sequence needs at least n non-zero entries");
}

UtilityFunction UtilityFunction::power(double exponent) {
  if (exponent <= 0.0) throw ConfigError("utility power exponent must be positive");
  UtilityFunction u;
  u.shape = Shape::Power;
  u.p = exponent;
  return u;
}

UtilityFunction UtilityFunction::user_table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ConfigError("utility table needs at least two points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first <= points[i - 1].first)
      throw ConfigError("utility table x values must be strictly increasing");
    if (points[i].second < points[i - 1].second)
      throw ConfigError("utility table must be non-decreasing");
  }
  UtilityFunction u;
  u.shape = Shape::Table;
  u.table = std::move(points);
  return u;
}

double UtilityFunction::operator()(double v) const {
  switch (shape) {
    case Shape::Identity: return v;
    case Shape::Power: return std::pow(v, p);
    case Shape::Table: {
      if (v <= table.front().first) return table.front().second;
      if (v >= table.back().first) return table.back().second;
      auto it = std::upper_bound(table.begin(), table.end(), v,
                                 [](double x, const auto& pt) { return x < pt.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      double w = (v - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  return v;
}

std::vector<double> cumulative_regret(const History& history, const GapSummary& gaps) {
  std::vector<double> series;
  series.reserve(history.records.size());
  double acc = 0.0;
  for (const auto& rec : history.records) {
    if (rec.arm_id < 0 || static_cast<std::size_t>(rec.arm_id) >= gaps.per_arm_gap.size())
      throw UnknownArmError("cumulative_regret: arm " + std::to_string(rec.arm_id) +
                            " not in gap summary");
    acc += gaps.per_arm_gap[static_cast<std::size_t>(rec.arm_id)];
    series.push_back(acc);
  }
  return series;
}

double agent_revenue(const History& history, int agent_id, const DiscountSequence& gamma) {
  if (gamma.gammas.size() < history.records.size())
    throw ConfigError("agent_revenue: discount sequence shorter than history");
  double v = 0.0;
  for (const auto& rec : history.records)
    if (rec.agent_id == agent_id)
      v += gamma.gammas[static_cast<std::size_t>(rec.t - 1)] * rec.reward;
  return v;
}

UtilityEstimate expected_utility(const std::vector<double>& revenues,
                                 const UtilityFunction& U) {
  if (revenues.size() < 2)
    throw ConfigError("expected_utility needs at least 2 repetitions for a CI");
  double sum = 0.0, sumsq = 0.0;
  for (double v : revenues) {
    double u = U(v);
    sum += u;
    sumsq += u * u;
  }
  auto R = static_cast<double>(revenues.size());
  double mean = sum / R;
  double var = std::max(0.0, (sumsq - R * mean * mean) / (R - 1.0));
  UtilityEstimate est;
  est.mean = mean;
  est.ci_half_width = 1.959963984540054 * std::sqrt(var / R);
  return est;
}

UtilityEstimate expected_utility(const std::vector<RunResult>& results, int agent_id,
                                 const UtilityFunction& U) {
  std::vector<double> revenues;
  revenues.reserve(results.size());
  for (const auto& r : results) revenues.push_back(r.final_revenue(agent_id));
  return expected_utility(revenues, U);
}

double hucb_bound(const GapSummary& gaps, long T) {
  double log_term = 0.0, gap_sum = 0.0;
  for (double d : gaps.per_agent_gap) {
    gap_sum += d;
    if (d > 0.0) log_term += 8.0 / d;
  }
  double pi = std::numbers::pi;
  return log_term * std::log(static_cast<double>(T)) + (1.0 + pi * pi / 3.0) * gap_sum;
}

RhucbBound rhucb_bound(const GapSummary& gaps, long T, double L) {
  RhucbBound out;
  out.precondition_ok =
      gaps.best_fraction > 0.0 && L >= 1.0 / gaps.best_fraction - 1e-12;

  // agent owning the globally optimal arm (first one if tied; ties only
  // shrink the true bound)
  std::size_t star = 0;
  for (std::size_t i = 0; i < gaps.per_agent_gap.size(); ++i)
    if (gaps.per_agent_gap[i] == 0.0) {
      star = i;
      break;
    }
  double star_sum = 0.0;
  for (double d : gaps.internal_gap[star])
    if (d > 0.0) star_sum += 50.0 * L / d;

  double total = 0.0;
  for (std::size_t i = 0; i < gaps.per_agent_gap.size(); ++i) {
    double per_agent = 1.0 + star_sum;
    double Di = gaps.per_agent_gap[i];
    if (Di > 0.0) per_agent += 4.0 / (Di * Di);
    for (double d : gaps.internal_gap[i])
      if (d > 0.0) per_agent += 114.0 * L / d;
    total += per_agent;
  }
  double Td = static_cast<double>(T);
  out.leading = std::sqrt(Td) * std::log(Td) * total;
  return out;
}

}  // namespace sbandit
