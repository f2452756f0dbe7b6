#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "cogspeech/audio.hpp"
#include "cogspeech/dsp.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

AudioSignal normalize_volume(const AudioSignal &signal, double target_dbfs) {
  double peak = 0.0;
  for (double s : signal.samples) peak = std::max(peak, std::abs(s));
  if (peak == 0.0)
    throw ValidationError("normalize_volume: all-zero signal has no peak");
  const double target = std::pow(10.0, target_dbfs / 20.0);
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(signal.samples.size());
  const double scale = target / peak;
  for (size_t i = 0; i < signal.samples.size(); ++i)
    out.samples[i] = signal.samples[i] * scale;
  return out;
}

AudioSignal denoise_stationary(const AudioSignal &signal,
                               const DenoiseOptions &options) {
  const int N = options.frame_size;
  const int H = options.hop;
  const long n = static_cast<long>(signal.samples.size());
  if (n < N)
    throw ValidationError("denoise: signal shorter than one analysis frame (" +
                          std::to_string(N) + " samples)");

  // sqrt-Hann on both analysis and synthesis; at 50% overlap the products
  // sum to one, so an unmodified spectrum reconstructs the input exactly.
  std::vector<double> window = hann_periodic(N);
  for (auto &w : window) w = std::sqrt(w);

  const long padded_n = n + N;  // N/2 zeros on each side
  const long n_frames = (padded_n - N) / H + 1;
  auto padded_at = [&](long idx) -> double {
    const long k = idx - N / 2;
    return (k >= 0 && k < n) ? signal.samples[static_cast<size_t>(k)] : 0.0;
  };

  // Analysis pass: spectra plus per-frame energy for the noise profile.
  std::vector<std::vector<std::complex<double>>> spectra(
      static_cast<size_t>(n_frames));
  std::vector<double> frame_energy(static_cast<size_t>(n_frames));
  for (long t = 0; t < n_frames; ++t) {
    std::vector<std::complex<double>> frame(static_cast<size_t>(N));
    double energy = 0.0;
    for (int i = 0; i < N; ++i) {
      const double v = padded_at(t * H + i) * window[static_cast<size_t>(i)];
      frame[static_cast<size_t>(i)] = v;
      energy += v * v;
    }
    fft_radix2(frame, false);
    spectra[static_cast<size_t>(t)] = std::move(frame);
    frame_energy[static_cast<size_t>(t)] = energy;
  }

  // Noise profile: mean magnitude over the lowest-energy decile of frames.
  std::vector<long> order(static_cast<size_t>(n_frames));
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
    return frame_energy[static_cast<size_t>(a)] <
           frame_energy[static_cast<size_t>(b)];
  });
  const long n_noise = std::max<long>(
      1, static_cast<long>(std::ceil(options.noise_quantile * n_frames)));
  std::vector<double> noise_mag(static_cast<size_t>(N), 0.0);
  for (long i = 0; i < n_noise; ++i) {
    const auto &spec = spectra[static_cast<size_t>(order[static_cast<size_t>(i)])];
    for (int k = 0; k < N; ++k)
      noise_mag[static_cast<size_t>(k)] += std::abs(spec[static_cast<size_t>(k)]);
  }
  for (auto &m : noise_mag) m /= static_cast<double>(n_noise);

  // Subtract and overlap-add.
  std::vector<double> acc(static_cast<size_t>(padded_n), 0.0);
  for (long t = 0; t < n_frames; ++t) {
    auto &spec = spectra[static_cast<size_t>(t)];
    for (int k = 0; k < N; ++k) {
      const double mag = std::abs(spec[static_cast<size_t>(k)]);
      const double target = std::max(
          mag - options.oversubtraction * noise_mag[static_cast<size_t>(k)],
          options.floor * mag);
      if (mag > 0.0) spec[static_cast<size_t>(k)] *= target / mag;
    }
    fft_radix2(spec, true);
    for (int i = 0; i < N; ++i)
      acc[static_cast<size_t>(t * H + i)] +=
          spec[static_cast<size_t>(i)].real() * window[static_cast<size_t>(i)];
  }

  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i)
    out.samples[static_cast<size_t>(i)] =
        std::clamp(acc[static_cast<size_t>(i + N / 2)], -1.0, 1.0);
  return out;
}

namespace {

// Frame mean-square energies on the standard 25 ms / 10 ms grid.
std::vector<double> frame_log_energies_db(const AudioSignal &signal,
                                          const VadOptions &options) {
  const long n = static_cast<long>(signal.samples.size());
  const long L = std::max<long>(1, std::lround(options.frame_len_s * signal.sample_rate));
  const long H = std::max<long>(1, std::lround(options.hop_s * signal.sample_rate));
  const long T = n < L ? 1 : (n - L) / H + 1;
  std::vector<double> db(static_cast<size_t>(T));
  for (long t = 0; t < T; ++t) {
    const long a = t * H;
    const long b = std::min(n, a + L);
    double ms = 0.0;
    for (long i = a; i < b; ++i)
      ms += signal.samples[static_cast<size_t>(i)] *
            signal.samples[static_cast<size_t>(i)];
    ms /= static_cast<double>(b - a);
    db[static_cast<size_t>(t)] = 10.0 * std::log10(std::max(ms, 1e-30) / 1e-10);
  }
  return db;
}

}  // namespace

std::vector<SegmentSpan> vad_segment(const AudioSignal &signal,
                                     const VadOptions &options) {
  if (signal.samples.empty())
    throw ValidationError("vad_segment: empty signal");
  if (signal.sample_rate <= 0)
    throw ValidationError("vad_segment: sample rate must be positive");

  const std::vector<double> db = frame_log_energies_db(signal, options);
  double threshold = options.threshold_db;
  if (options.relative_peak)
    threshold = *std::max_element(db.begin(), db.end()) - options.peak_margin_db;

  const double L = options.frame_len_s;
  const double H = options.hop_s;

  // Voiced frame runs -> raw spans.
  std::vector<SegmentSpan> spans;
  long run_start = -1;
  for (long t = 0; t <= static_cast<long>(db.size()); ++t) {
    const bool voiced =
        t < static_cast<long>(db.size()) && db[static_cast<size_t>(t)] >= threshold;
    if (voiced && run_start < 0) run_start = t;
    if (!voiced && run_start >= 0) {
      spans.push_back({run_start * H, (t - 1) * H + L});
      run_start = -1;
    }
  }

  // Bridge sub-threshold gaps shorter than the limit.
  std::vector<SegmentSpan> merged;
  for (const auto &s : spans) {
    if (!merged.empty() && s.start_s - merged.back().end_s < options.bridge_gap_s)
      merged.back().end_s = s.end_s;
    else
      merged.push_back(s);
  }

  // Split long runs into consecutive spans capped at max_span_s, then drop
  // anything shorter than the minimum.
  std::vector<SegmentSpan> out;
  for (const auto &s : merged) {
    double start = s.start_s;
    while (s.end_s - start > options.max_span_s) {
      out.push_back({start, start + options.max_span_s});
      start += options.max_span_s;
    }
    if (s.end_s - start >= options.min_span_s) out.push_back({start, s.end_s});
  }
  return out;
}

}  // namespace cogspeech
