#include "cogspeech/gammatone.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "cogspeech/error.hpp"

namespace cogspeech {

namespace {

double erb_rate(double f_hz) { return 21.4 * std::log10(1.0 + 0.00437 * f_hz); }

double erb_rate_inverse(double e) {
  return (std::pow(10.0, e / 21.4) - 1.0) / 0.00437;
}

}  // namespace

double erb_bandwidth_hz(double fc_hz) { return 24.7 * (1.0 + 0.00437 * fc_hz); }

std::vector<double> erb_center_freqs(int n, double lo_hz, double hi_hz) {
  if (n < 1 || lo_hz <= 0.0 || hi_hz <= lo_hz)
    throw ValidationError("erb_center_freqs: bad channel layout");
  std::vector<double> freqs(static_cast<size_t>(n));
  const double e_lo = erb_rate(lo_hz), e_hi = erb_rate(hi_hz);
  for (int i = 0; i < n; ++i) {
    const double e = n == 1 ? e_lo : e_lo + (e_hi - e_lo) * i / (n - 1);
    freqs[static_cast<size_t>(i)] = erb_rate_inverse(e);
  }
  return freqs;
}

std::vector<double> gammatone_filter_channel(const std::vector<double> &x,
                                             int sample_rate, double fc_hz) {
  const double bw = 1.019 * erb_bandwidth_hz(fc_hz);
  const double r = std::exp(-2.0 * std::numbers::pi * bw / sample_rate);
  const double theta = 2.0 * std::numbers::pi * fc_hz / sample_rate;
  const std::complex<double> pole = std::polar(r, theta);
  // Unit gain at fc: each section contributes |1 - r| there.
  const double gain = std::pow(1.0 - r, 4.0);

  std::vector<double> y(x.size());
  std::complex<double> s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    s1 = x[i] + pole * s1;
    s2 = s1 + pole * s2;
    s3 = s2 + pole * s3;
    s4 = s3 + pole * s4;
    y[i] = gain * s4.real();
  }
  return y;
}

Cochleagram gammatone_cochleagram(const AudioSignal &signal, int n_channels,
                                  double frame_len_s, double hop_s) {
  if (signal.sample_rate <= 0)
    throw ValidationError("cochleagram: sample rate must be positive");
  const long n = static_cast<long>(signal.samples.size());
  const long L = std::lround(frame_len_s * signal.sample_rate);
  const long H = std::lround(hop_s * signal.sample_rate);
  if (L <= 0 || H <= 0)
    throw ValidationError("cochleagram: frame and hop must be positive");
  if (n < L)
    throw ValidationError("cochleagram: signal shorter than one frame");

  const double hi_hz = 8000.0;
  if (2.0 * hi_hz > signal.sample_rate + 1e-9)
    throw ValidationError("cochleagram: sample rate below 16 kHz pipeline rate");

  const long T = (n - L) / H + 1;
  Cochleagram cg;
  cg.center_freqs_hz = erb_center_freqs(n_channels, 50.0, hi_hz);
  cg.frame_len_s = frame_len_s;
  cg.hop_s = hop_s;
  cg.values.resize(n_channels, T);

  std::vector<double> cum(static_cast<size_t>(n) + 1);
  for (int c = 0; c < n_channels; ++c) {
    const std::vector<double> y = gammatone_filter_channel(
        signal.samples, signal.sample_rate, cg.center_freqs_hz[static_cast<size_t>(c)]);
    cum[0] = 0.0;
    for (long i = 0; i < n; ++i)
      cum[static_cast<size_t>(i + 1)] =
          cum[static_cast<size_t>(i)] +
          y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    for (long t = 0; t < T; ++t) {
      const long a = t * H, b = a + L;
      const double energy =
          (cum[static_cast<size_t>(b)] - cum[static_cast<size_t>(a)]) / L;
      cg.values(c, t) = std::log1p(energy);
    }
  }
  return cg;
}

}  // namespace cogspeech
