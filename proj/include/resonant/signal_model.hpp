#ifndef RESONANT_SIGNAL_MODEL_HPP
#define RESONANT_SIGNAL_MODEL_HPP

#include <vector>

#include "resonant/common.hpp"

namespace resonant {

/// One family of sums of complex exponentials. Members are drawn by sampling
/// residues around residue_mean and perturbing each nominal frequency.
struct FamilySpec {
  std::vector<Complex> nominal_freqs;
  Complex residue_mean{0.5, 0.0};
  double residue_std = 1.0;       // total complex std of the residue draw
  double freq_perturb_std = 0.0;  // per-component std of the frequency perturbation
};

struct LabeledObservation {
  TimeSeries series;
  int label = 0;  // 1..P
};

struct Dataset {
  std::vector<LabeledObservation> observations;
  int num_classes = 0;

  int common_length() const {
    return observations.empty() ? 0 : static_cast<int>(observations.front().series.size());
  }
};

/// x(t) = sum_i residues[i] * freqs[i]^t for t = 1..T.
TimeSeries synth_signal(const std::vector<Complex>& freqs,
                        const std::vector<Complex>& residues, int T);

/// Adds circularly symmetric complex white noise at the requested SNR, the
/// noise variance being measured against the mean power of x. An infinite
/// snr_db disables the noise entirely.
TimeSeries add_noise(const TimeSeries& x, double snr_db, Rng& rng);
TimeSeries add_noise(const TimeSeries& x, double snr_db, std::uint64_t rng_seed);

/// Draws one noiseless member of the family: residues from a complex Gaussian
/// around residue_mean (total variance residue_std^2, split evenly between
/// components), nominal frequencies perturbed componentwise by
/// N(0, freq_perturb_std^2).
TimeSeries sample_family(const FamilySpec& spec, int T, Rng& rng);
TimeSeries sample_family(const FamilySpec& spec, int T, std::uint64_t rng_seed);

/// Nominal frequencies of the two built-in synthetic families.
const std::vector<Complex>& family1_freqs();  // N = 5
const std::vector<Complex>& family2_freqs();  // N = 6

struct ScenarioConfig {
  double residue_std = 1.0;
  double freq_perturb_std = 0.0;
  double snr_db = 10.0;
};

/// Maps a scenario id and its swept value onto the generator knobs:
/// scenario 1 sweeps SNR (sigma_alpha = 1), scenario 2 sweeps sigma_alpha at
/// 10 dB, scenario 3 sweeps sigma_z at 10 dB with sigma_alpha = 1.
ScenarioConfig scenario_config(int scenario, double sweep_value);

struct ScenarioData {
  Dataset train;
  Dataset test;
};

/// Labeled two-class datasets over the built-in families, T = 180.
ScenarioData generate_scenario(int scenario, double sweep_value, int n_train_per_class,
                               int n_test_per_class, std::uint64_t rng_seed);

inline constexpr int kScenarioLength = 180;

}  // namespace resonant

#endif  // RESONANT_SIGNAL_MODEL_HPP
