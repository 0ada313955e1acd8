#include "jmls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace jmls {

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Biased autocovariance at `lag`.
double autocovariance(std::span<const double> x, double mean, std::size_t lag) {
  const std::size_t n = x.size();
  if (lag >= n) return 0.0;
  double acc = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) acc += (x[t] - mean) * (x[t + lag] - mean);
  return acc / static_cast<double>(n);
}

}  // namespace

double autocorrelation(std::span<const double> trace, std::size_t lag) {
  if (trace.size() < 2) return 0.0;
  const double mean = mean_of(trace);
  const double var = autocovariance(trace, mean, 0);
  if (!(var > 0.0)) return 0.0;
  return autocovariance(trace, mean, lag) / var;
}

TraceStats trace_diagnostics(std::span<const double> trace, std::string name) {
  TraceStats s;
  s.name = std::move(name);
  const std::size_t n = trace.size();
  if (n == 0) return s;
  s.mean = mean_of(trace);
  const double gamma0 = autocovariance(trace, s.mean, 0);
  s.variance = n > 1 ? gamma0 * static_cast<double>(n) / static_cast<double>(n - 1) : 0.0;
  // Rounding in the mean leaves a residue of order eps^2 * mean^2 for constant traces.
  const double eps = std::numeric_limits<double>::epsilon();
  if (!(gamma0 > 16.0 * eps * eps * s.mean * s.mean)) {
    s.variance = 0.0;
    s.zero_variance = true;
    s.ess = static_cast<double>(n);
    return s;
  }
  for (std::size_t i = 0; i < kDiagnosticLags.size(); ++i) {
    s.autocorrelation[i] = autocovariance(trace, s.mean, kDiagnosticLags[i]) / gamma0;
  }

  // Initial monotone sequence: sum pairs Gamma_m = gamma_{2m} + gamma_{2m+1}
  // while positive, forcing them to be non-increasing.
  double tau = -gamma0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = autocovariance(trace, s.mean, 2 * m) + autocovariance(trace, s.mean, 2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, previous);
    previous = pair;
    tau += 2.0 * pair;
  }
  s.ess = tau > 0.0 ? static_cast<double>(n) * gamma0 / tau : static_cast<double>(n);
  return s;
}

std::vector<std::pair<std::string, std::vector<double>>> scalar_traces(
    const std::vector<JmlsParams>& samples) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  if (samples.empty()) return out;
  const JmlsParams& first = samples.front();
  auto add = [&](const std::string& name, auto&& get) {
    std::vector<double> trace;
    trace.reserve(samples.size());
    for (const auto& s : samples) trace.push_back(get(s));
    out.emplace_back(name, std::move(trace));
  };
  const Index m = first.num_models();
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      add("T[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]",
          [=](const JmlsParams& p) { return p.T(i, j); });
    }
  }
  const std::pair<const char*, Matrix ModelMatrices::*> fields[] = {
      {"A", &ModelMatrices::A}, {"B", &ModelMatrices::B}, {"C", &ModelMatrices::C},
      {"D", &ModelMatrices::D}, {"Q", &ModelMatrices::Q}, {"R", &ModelMatrices::R},
      {"S", &ModelMatrices::S}};
  for (Index z = 0; z < m; ++z) {
    for (const auto& [label, member] : fields) {
      const Matrix& ref = first.models[static_cast<std::size_t>(z)].*member;
      for (Index r = 0; r < ref.rows(); ++r) {
        for (Index c = 0; c < ref.cols(); ++c) {
          add(std::string(label) + std::to_string(z + 1) + "[" + std::to_string(r + 1) + "," +
                  std::to_string(c + 1) + "]",
              [=](const JmlsParams& p) { return (p.models[static_cast<std::size_t>(z)].*member)(r, c); });
        }
      }
    }
  }
  return out;
}

std::vector<TraceStats> chain_diagnostics(const Chain& chain) {
  std::vector<TraceStats> out;
  for (auto& [name, trace] : scalar_traces(chain.samples)) {
    out.push_back(trace_diagnostics(trace, name));
  }
  return out;
}

}  // namespace jmls
