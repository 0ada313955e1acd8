#pragma once

#include "jmls/model.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace jmls {

/// 64 logarithmically spaced normalized frequencies in (1e-3 pi, pi].
std::vector<double> default_frequency_grid(std::size_t points = 64);

/// H(e^{jw}) = C (e^{jw} I - A)^{-1} B + D on a grid. Channel (o, i) is stored
/// at o * n_u + i.
struct FrequencyResponse {
  std::vector<double> frequencies;
  Index n_outputs = 0;
  Index n_inputs = 0;
  std::vector<std::vector<std::complex<double>>> values;  // [channel][point]
  std::vector<bool> singular;                             // per point

  double magnitude(std::size_t channel, std::size_t point) const;
  double phase(std::size_t channel, std::size_t point) const;
};

FrequencyResponse frequency_response(const ModelMatrices& model,
                                     const std::vector<double>& frequencies);

/// Squared L2 distance between log-magnitudes over all channels and
/// non-singular points.
double log_magnitude_distance(const FrequencyResponse& a, const FrequencyResponse& b);

/// perm[r] is the sampled mode assigned to reference mode r. Exhaustive over
/// all permutations for m <= 6 (first minimum in lexicographic order wins),
/// greedy beyond.
std::vector<int> relabel_sample(const JmlsParams& theta,
                                const std::vector<FrequencyResponse>& reference);

/// models'[r] = models[perm[r]], T'(r, s) = T(perm[r], perm[s]).
JmlsParams apply_permutation(const JmlsParams& theta, const std::vector<int>& perm);

struct Histogram {
  std::vector<double> edges;    // bins + 1
  std::vector<double> density;  // bins
};

/// Freedman-Diaconis bins when `bins` is 0. Degenerate samples give one bin.
Histogram make_histogram(std::vector<double> values, std::size_t bins = 0);

/// Linear-interpolation quantile (type 7) of unsorted data.
double quantile(std::vector<double> values, double p);

struct ScalarSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double lo95 = 0.0, hi95 = 0.0;
  double lo99 = 0.0, hi99 = 0.0;
  Histogram histogram;
};

ScalarSummary summarize_scalar(const std::string& name, const std::vector<double>& values,
                               std::size_t bins = 0);

struct BodeEnvelope {
  int model = 0;
  std::size_t channel = 0;
  std::vector<double> frequencies;
  std::vector<double> mean;
  std::vector<double> lo3sd;
  std::vector<double> hi3sd;
};

struct PosteriorSummary {
  std::vector<ScalarSummary> transition;  // T(i, j), column-major order
  std::vector<ScalarSummary> scalars;     // A, D, R per mode when n_x = n_u = n_y = 1
  std::vector<BodeEnvelope> bode;
  std::vector<std::vector<int>> permutations;  // per sample, empty when not relabeled
};

struct SummarizeOptions {
  bool relabel = true;
  std::optional<JmlsParams> truth;  // relabel reference; otherwise posterior mean responses
  std::size_t bins = 0;
  std::vector<double> frequencies = default_frequency_grid();
};

PosteriorSummary summarize(const std::vector<JmlsParams>& samples, const SummarizeOptions& options);

/// Magnitude responses of every mode of every sample: [sample][mode].
std::vector<std::vector<FrequencyResponse>> chain_responses(const std::vector<JmlsParams>& samples,
                                                            const std::vector<double>& frequencies);

namespace reference {
std::vector<std::vector<FrequencyResponse>> chain_responses(const std::vector<JmlsParams>& samples,
                                                            const std::vector<double>& frequencies);
}  // namespace reference

}  // namespace jmls
