#include "jmls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace jmls {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_log(double v) { return std::log(std::max(v, 1e-300)); }

std::vector<double> permutation_costs(const std::vector<FrequencyResponse>& sample,
                                      const std::vector<FrequencyResponse>& reference) {
  const std::size_t m = reference.size();
  std::vector<double> cost(m * m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = 0; s < m; ++s) cost[r * m + s] = log_magnitude_distance(reference[r], sample[s]);
  }
  return cost;
}

std::vector<int> assign(const std::vector<FrequencyResponse>& sample,
                        const std::vector<FrequencyResponse>& reference) {
  const std::size_t m = reference.size();
  if (sample.size() != m) throw std::invalid_argument("relabel: model count mismatch");
  for (const auto& r : reference) {
    if (r.frequencies != sample.front().frequencies) {
      throw std::invalid_argument("relabel: frequency grid mismatch");
    }
  }
  const auto cost = permutation_costs(sample, reference);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);

  if (m <= 6) {
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t r = 0; r < m; ++r) c += cost[r * m + static_cast<std::size_t>(perm[r])];
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  std::vector<bool> row_used(m, false), col_used(m, false);
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t br = 0, bs = 0;
    double bc = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      if (row_used[r]) continue;
      for (std::size_t s = 0; s < m; ++s) {
        if (col_used[s]) continue;
        if (cost[r * m + s] < bc) {
          bc = cost[r * m + s];
          br = r;
          bs = s;
        }
      }
    }
    row_used[br] = col_used[bs] = true;
    perm[br] = static_cast<int>(bs);
  }
  return perm;
}

std::vector<FrequencyResponse> model_responses(const JmlsParams& theta,
                                               const std::vector<double>& frequencies) {
  std::vector<FrequencyResponse> out;
  out.reserve(theta.models.size());
  for (const auto& m : theta.models) out.push_back(frequency_response(m, frequencies));
  return out;
}

}  // namespace

std::vector<double> default_frequency_grid(std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double e = -3.0 + 3.0 * static_cast<double>(i + 1) / static_cast<double>(points);
    grid[i] = std::numbers::pi * std::pow(10.0, e);
  }
  grid.back() = std::numbers::pi;
  return grid;
}

double FrequencyResponse::magnitude(std::size_t channel, std::size_t point) const {
  return std::abs(values[channel][point]);
}

double FrequencyResponse::phase(std::size_t channel, std::size_t point) const {
  return std::arg(values[channel][point]);
}

FrequencyResponse frequency_response(const ModelMatrices& model,
                                     const std::vector<double>& frequencies) {
  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;
  const Index nx = model.n_x(), nu = model.n_u(), ny = model.n_y();
  FrequencyResponse fr;
  fr.frequencies = frequencies;
  fr.n_outputs = ny;
  fr.n_inputs = nu;
  fr.values.assign(static_cast<std::size_t>(ny * nu),
                   std::vector<Complex>(frequencies.size(), Complex(kNaN, kNaN)));
  fr.singular.assign(frequencies.size(), false);

  const CMatrix A = model.A.cast<Complex>();
  const CMatrix B = model.B.cast<Complex>();
  const CMatrix C = model.C.cast<Complex>();
  const CMatrix D = model.D.cast<Complex>();
  for (std::size_t p = 0; p < frequencies.size(); ++p) {
    CMatrix H = D;
    if (nx > 0) {
      const Complex zc = std::polar(1.0, frequencies[p]);
      const CMatrix resolvent = zc * CMatrix::Identity(nx, nx) - A;
      const Eigen::PartialPivLU<CMatrix> lu(resolvent);
      if (!(lu.rcond() > 1e-14)) {
        fr.singular[p] = true;
        continue;
      }
      H += C * lu.solve(B);
    }
    for (Index o = 0; o < ny; ++o) {
      for (Index i = 0; i < nu; ++i) fr.values[static_cast<std::size_t>(o * nu + i)][p] = H(o, i);
    }
  }
  return fr;
}

double log_magnitude_distance(const FrequencyResponse& a, const FrequencyResponse& b) {
  if (a.frequencies != b.frequencies || a.values.size() != b.values.size()) {
    throw std::invalid_argument("frequency responses are not on the same grid");
  }
  double acc = 0.0;
  for (std::size_t ch = 0; ch < a.values.size(); ++ch) {
    for (std::size_t p = 0; p < a.frequencies.size(); ++p) {
      if (a.singular[p] || b.singular[p]) continue;
      const double d = safe_log(a.magnitude(ch, p)) - safe_log(b.magnitude(ch, p));
      acc += d * d;
    }
  }
  return acc;
}

std::vector<int> relabel_sample(const JmlsParams& theta,
                                const std::vector<FrequencyResponse>& reference) {
  if (reference.size() != theta.models.size()) {
    throw std::invalid_argument("relabel: reference must have one response per model");
  }
  if (reference.empty()) return {};
  return assign(model_responses(theta, reference.front().frequencies), reference);
}

JmlsParams apply_permutation(const JmlsParams& theta, const std::vector<int>& perm) {
  const Index m = theta.num_models();
  if (static_cast<Index>(perm.size()) != m) throw std::invalid_argument("permutation size mismatch");
  JmlsParams out;
  out.T.resize(m, m);
  for (Index r = 0; r < m; ++r) {
    out.models.push_back(theta.models[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])]);
    for (Index s = 0; s < m; ++s) {
      out.T(r, s) = theta.T(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(s)]);
    }
  }
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty data");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Histogram make_histogram(std::vector<double> values, std::size_t bins) {
  Histogram h;
  if (values.empty()) return h;
  std::sort(values.begin(), values.end());
  const double lo = values.front(), hi = values.back();
  const double n = static_cast<double>(values.size());
  if (values.size() == 1 || !(hi > lo)) {
    h.edges = {lo - 0.5, lo + 0.5};
    h.density = {1.0};
    return h;
  }
  if (bins == 0) {
    const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    const double width = 2.0 * iqr / std::cbrt(n);
    bins = width > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / width))
                       : static_cast<std::size_t>(std::ceil(std::sqrt(n)));
    bins = std::clamp<std::size_t>(bins, 1, 1000);
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(idx, bins - 1)] += 1.0;
  }
  h.density.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) h.density[i] = counts[i] / (n * width);
  return h;
}

ScalarSummary summarize_scalar(const std::string& name, const std::vector<double>& values,
                               std::size_t bins) {
  ScalarSummary s;
  s.name = name;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.median = quantile(values, 0.5);
  s.lo95 = quantile(values, 0.025);
  s.hi95 = quantile(values, 0.975);
  s.lo99 = quantile(values, 0.005);
  s.hi99 = quantile(values, 0.995);
  s.histogram = make_histogram(values, bins);
  return s;
}

std::vector<std::vector<FrequencyResponse>> chain_responses(const std::vector<JmlsParams>& samples,
                                                            const std::vector<double>& frequencies) {
  std::vector<std::vector<FrequencyResponse>> out(samples.size());
  const auto n = static_cast<long long>(samples.size());
#pragma omp parallel for schedule(dynamic, 16) if (samples.size() >= 64)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] = model_responses(samples[idx], frequencies);
  }
  return out;
}

namespace reference {
std::vector<std::vector<FrequencyResponse>> chain_responses(const std::vector<JmlsParams>& samples,
                                                            const std::vector<double>& frequencies) {
  std::vector<std::vector<FrequencyResponse>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(model_responses(s, frequencies));
  return out;
}
}  // namespace reference

namespace {

// Mean magnitude per mode and channel, as a zero-phase response.
std::vector<FrequencyResponse> mean_responses(
    const std::vector<std::vector<FrequencyResponse>>& responses,
    const std::vector<std::vector<int>>& perms) {
  const auto& proto = responses.front();
  std::vector<FrequencyResponse> out = proto;
  for (std::size_t r = 0; r < out.size(); ++r) {
    for (std::size_t ch = 0; ch < out[r].values.size(); ++ch) {
      for (std::size_t p = 0; p < out[r].frequencies.size(); ++p) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t s = 0; s < responses.size(); ++s) {
          const auto& resp = responses[s][static_cast<std::size_t>(perms[s][r])];
          if (resp.singular[p]) continue;
          acc += resp.magnitude(ch, p);
          ++count;
        }
        out[r].singular[p] = count == 0;
        out[r].values[ch][p] = count ? std::complex<double>(acc / static_cast<double>(count), 0.0)
                                     : std::complex<double>(kNaN, kNaN);
      }
    }
  }
  return out;
}

}  // namespace

PosteriorSummary summarize(const std::vector<JmlsParams>& samples, const SummarizeOptions& options) {
  PosteriorSummary out;
  if (samples.empty()) return out;
  const Dimensions dims = samples.front().dims();
  const auto m = static_cast<std::size_t>(dims.m);
  const auto responses = chain_responses(samples, options.frequencies);

  std::vector<int> identity(m);
  std::iota(identity.begin(), identity.end(), 0);
  std::vector<std::vector<int>> perms(samples.size(), identity);
  if (options.relabel) {
    if (options.truth) {
      std::vector<FrequencyResponse> ref;
      for (const auto& mod : options.truth->models) ref.push_back(frequency_response(mod, options.frequencies));
      for (std::size_t s = 0; s < samples.size(); ++s) perms[s] = assign(responses[s], ref);
    } else {
      // Start from the first sample and refine against the posterior-mean responses.
      std::vector<FrequencyResponse> ref = responses.front();
      for (int pass = 0; pass < 3; ++pass) {
        for (std::size_t s = 0; s < samples.size(); ++s) perms[s] = assign(responses[s], ref);
        ref = mean_responses(responses, perms);
      }
    }
    out.permutations = perms;
  }

  std::vector<JmlsParams> relabeled;
  relabeled.reserve(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) relabeled.push_back(apply_permutation(samples[s], perms[s]));

  for (Index j = 0; j < dims.m; ++j) {
    for (Index i = 0; i < dims.m; ++i) {
      std::vector<double> v;
      v.reserve(relabeled.size());
      for (const auto& p : relabeled) v.push_back(p.T(i, j));
      out.transition.push_back(summarize_scalar(
          "T" + std::to_string(i + 1) + std::to_string(j + 1), v, options.bins));
    }
  }

  if (dims.n_x == 1 && dims.n_u == 1 && dims.n_y == 1) {
    for (std::size_t z = 0; z < m; ++z) {
      const std::pair<const char*, Matrix ModelMatrices::*> fields[] = {
          {"A", &ModelMatrices::A}, {"D", &ModelMatrices::D}, {"R", &ModelMatrices::R}};
      for (const auto& [label, member] : fields) {
        std::vector<double> v;
        v.reserve(relabeled.size());
        for (const auto& p : relabeled) v.push_back((p.models[z].*member)(0, 0));
        out.scalars.push_back(summarize_scalar(label + std::to_string(z + 1), v, options.bins));
      }
    }
  }

  const std::size_t channels = static_cast<std::size_t>(dims.n_y * dims.n_u);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t ch = 0; ch < channels; ++ch) {
      BodeEnvelope env;
      env.model = static_cast<int>(r);
      env.channel = ch;
      env.frequencies = options.frequencies;
      for (std::size_t p = 0; p < options.frequencies.size(); ++p) {
        double sum = 0.0, sum_sq = 0.0;
        std::size_t count = 0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
          const auto& resp = responses[s][static_cast<std::size_t>(perms[s][r])];
          if (resp.singular[p]) continue;
          const double mag = resp.magnitude(ch, p);
          sum += mag;
          sum_sq += mag * mag;
          ++count;
        }
        const double mean = count ? sum / static_cast<double>(count) : kNaN;
        const double var = count > 1 ? std::max(0.0, (sum_sq - static_cast<double>(count) * mean * mean) /
                                                         static_cast<double>(count - 1))
                                     : 0.0;
        const double sd = std::sqrt(var);
        env.mean.push_back(mean);
        env.lo3sd.push_back(mean - 3.0 * sd);
        env.hi3sd.push_back(mean + 3.0 * sd);
      }
      out.bode.push_back(std::move(env));
    }
  }
  return out;
}

}  // namespace jmls
