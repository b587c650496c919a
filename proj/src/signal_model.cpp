#include "resonant/signal_model.hpp"

#include <cmath>
#include <stdexcept>

namespace resonant {

TimeSeries synth_signal(const std::vector<Complex>& freqs,
                        const std::vector<Complex>& residues, int T) {
  if (freqs.empty()) throw std::invalid_argument("synth_signal: no modes");
  if (freqs.size() != residues.size())
    throw std::invalid_argument("synth_signal: freqs/residues length mismatch");
  if (T < 1) throw std::invalid_argument("synth_signal: T must be >= 1");
  for (Complex z : freqs)
    if (!is_finite(z)) throw std::invalid_argument("synth_signal: non-finite frequency");
  for (Complex a : residues)
    if (!is_finite(a)) throw std::invalid_argument("synth_signal: non-finite residue");

  const std::size_t n = freqs.size();
  std::vector<Complex> power(freqs);  // z_i^t, starting at t = 1
  TimeSeries x(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) s += residues[i] * power[i];
    x[t] = s;
    if (t + 1 < T)
      for (std::size_t i = 0; i < n; ++i) power[i] *= freqs[i];
  }
  return x;
}

TimeSeries add_noise(const TimeSeries& x, double snr_db, Rng& rng) {
  require_finite(x, "add_noise");
  if (x.empty()) throw std::invalid_argument("add_noise: empty series");
  if (std::isinf(snr_db) && snr_db > 0) return x;  // noise disabled
  const double mean_power = energy(x) / static_cast<double>(x.size());
  if (mean_power <= 0.0) throw std::invalid_argument("add_noise: zero-energy input");
  const double noise_var = mean_power / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(noise_var);
  TimeSeries y(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) y[t] = x[t] + sigma * rng.complex_normal();
  return y;
}

TimeSeries add_noise(const TimeSeries& x, double snr_db, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return add_noise(x, snr_db, rng);
}

TimeSeries sample_family(const FamilySpec& spec, int T, Rng& rng) {
  if (spec.nominal_freqs.empty()) throw std::invalid_argument("sample_family: empty family");
  if (spec.residue_std < 0 || spec.freq_perturb_std < 0)
    throw std::invalid_argument("sample_family: negative std");
  if (T < 1) throw std::invalid_argument("sample_family: T must be >= 1");

  const std::size_t n = spec.nominal_freqs.size();
  std::vector<Complex> residues(n);
  for (std::size_t i = 0; i < n; ++i)
    residues[i] = spec.residue_mean + spec.residue_std * rng.complex_normal();
  std::vector<Complex> freqs(spec.nominal_freqs);
  if (spec.freq_perturb_std > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      freqs[i] += Complex(spec.freq_perturb_std * rng.normal(),
                          spec.freq_perturb_std * rng.normal());
    }
  }
  return synth_signal(freqs, residues, T);
}

TimeSeries sample_family(const FamilySpec& spec, int T, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_family(spec, T, rng);
}

const std::vector<Complex>& family1_freqs() {
  static const std::vector<Complex> z1 = {
      {0.1275, -0.9075}, {0.44, -0.16}, {0.97, 0.02}, {0.57, 0.79}, {-0.19, 0.94}};
  return z1;
}

const std::vector<Complex>& family2_freqs() {
  static const std::vector<Complex> z2 = {{0.13, -0.92}, {0.44, -0.88}, {0.95, -0.17},
                                          {0.93, 0.02},  {0.53, 0.78},  {-0.19, 0.91}};
  return z2;
}

ScenarioConfig scenario_config(int scenario, double sweep_value) {
  switch (scenario) {
    case 1:
      return {1.0, 0.0, sweep_value};
    case 2:
      return {sweep_value, 0.0, 10.0};
    case 3:
      return {1.0, sweep_value, 10.0};
    default:
      throw std::invalid_argument("scenario must be 1, 2 or 3");
  }
}

ScenarioData generate_scenario(int scenario, double sweep_value, int n_train_per_class,
                               int n_test_per_class, std::uint64_t rng_seed) {
  const ScenarioConfig cfg = scenario_config(scenario, sweep_value);
  if (n_train_per_class < 1 || n_test_per_class < 1)
    throw std::invalid_argument("generate_scenario: nonpositive per-class count");

  const std::vector<FamilySpec> families = {
      {family1_freqs(), Complex(0.5, 0.0), cfg.residue_std, cfg.freq_perturb_std},
      {family2_freqs(), Complex(0.5, 0.0), cfg.residue_std, cfg.freq_perturb_std}};

  Rng rng(rng_seed);
  auto fill = [&](Dataset& ds, int per_class) {
    ds.num_classes = static_cast<int>(families.size());
    for (int label = 1; label <= ds.num_classes; ++label) {
      const FamilySpec& fam = families[static_cast<std::size_t>(label - 1)];
      for (int l = 0; l < per_class; ++l) {
        TimeSeries x = sample_family(fam, kScenarioLength, rng);
        ds.observations.push_back({add_noise(x, cfg.snr_db, rng), label});
      }
    }
  };

  ScenarioData data;
  fill(data.train, n_train_per_class);
  fill(data.test, n_test_per_class);
  return data;
}

}  // namespace resonant
