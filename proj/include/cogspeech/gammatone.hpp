#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cogspeech/audio.hpp"

namespace cogspeech {

// Time-frequency representation from an auditory-model filterbank.
// values holds log(1+x)-compressed per-frame energies, channels x frames.
struct Cochleagram {
  Eigen::MatrixXd values;
  std::vector<double> center_freqs_hz;  // strictly increasing
  double frame_len_s = 0.0;
  double hop_s = 0.0;
};

// n channels spaced uniformly on the ERB-rate scale over [lo_hz, hi_hz].
std::vector<double> erb_center_freqs(int n, double lo_hz, double hi_hz);

// Equivalent rectangular bandwidth at a center frequency (Glasberg-Moore).
double erb_bandwidth_hz(double fc_hz);

// 4th-order gammatone response for one channel, via a cascade of four
// complex one-pole sections normalized to unit gain at the center frequency.
std::vector<double> gammatone_filter_channel(const std::vector<double> &x,
                                             int sample_rate, double fc_hz);

// Gammatone filterbank + framed energies + log(1+x) compression.
// Frame count = floor((len - frame_len)/hop) + 1.
Cochleagram gammatone_cochleagram(const AudioSignal &signal,
                                  int n_channels = 64,
                                  double frame_len_s = 0.020,
                                  double hop_s = 0.010);

}  // namespace cogspeech
