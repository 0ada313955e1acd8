#pragma once

#include "jmls/gibbs.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace jmls {

struct TraceStats {
  std::string name;
  double mean = 0.0;
  double variance = 0.0;
  std::array<double, 3> autocorrelation{};  // lags 1, 10, 100 (0 when undefined)
  double ess = 0.0;
  bool zero_variance = false;
};

inline constexpr std::array<std::size_t, 3> kDiagnosticLags{1, 10, 100};

/// Mean, variance, autocorrelations and effective sample size (Geyer's
/// initial monotone sequence estimator) of one scalar trace.
TraceStats trace_diagnostics(std::span<const double> trace, std::string name = {});

double autocorrelation(std::span<const double> trace, std::size_t lag);

/// Named scalar traces of every entry of T and every model matrix.
std::vector<std::pair<std::string, std::vector<double>>> scalar_traces(
    const std::vector<JmlsParams>& samples);

std::vector<TraceStats> chain_diagnostics(const Chain& chain);

}  // namespace jmls
