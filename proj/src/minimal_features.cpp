#include "cogspeech/minimal_features.hpp"

#include <algorithm>
#include <cmath>

#include "cogspeech/dsp.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

namespace {

struct FiveStats {
  double mean = 0, sd = 0, median = 0, min = 0, max = 0;
};

// Single-element lists report sd = 0; empty lists report all zeros.
FiveStats five_stats(std::vector<double> values) {
  FiveStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.min = values.front();
  s.max = values.back();
  return s;
}

// Syllable-scale peaks of the detrended RMS envelope inside voiced spans.
int count_envelope_peaks(const std::vector<SegmentSpan> &spans,
                         const AudioSignal &signal,
                         const MinimalOptions &options) {
  const long n = static_cast<long>(signal.samples.size());
  const long L = std::max<long>(1, std::lround(options.env_frame_s * signal.sample_rate));
  const long H = std::max<long>(1, std::lround(options.env_hop_s * signal.sample_rate));
  if (n < L) return 0;
  const long T = (n - L) / H + 1;

  std::vector<double> env(static_cast<size_t>(T));
  for (long t = 0; t < T; ++t) {
    double ms = 0;
    for (long i = t * H; i < t * H + L; ++i)
      ms += signal.samples[static_cast<size_t>(i)] *
            signal.samples[static_cast<size_t>(i)];
    env[static_cast<size_t>(t)] = std::sqrt(ms / static_cast<double>(L));
  }

  // Band-limit by moving-average differencing: the fast average keeps the
  // syllable humps, the slow one removes the utterance-level baseline.
  const std::vector<double> fast = moving_average(env, options.fast_ma_frames);
  const std::vector<double> slow = moving_average(env, options.slow_ma_frames);
  std::vector<double> detrended(static_cast<size_t>(T));
  double peak = 0;
  for (long t = 0; t < T; ++t) {
    detrended[static_cast<size_t>(t)] =
        fast[static_cast<size_t>(t)] - slow[static_cast<size_t>(t)];
    peak = std::max(peak, detrended[static_cast<size_t>(t)]);
  }
  if (peak <= 0) return 0;
  const double threshold = options.peak_threshold * peak;

  auto frame_in_spans = [&](long t) {
    const double center = (t * H + L / 2) / static_cast<double>(signal.sample_rate);
    for (const auto &s : spans)
      if (center >= s.start_s && center < s.end_s) return true;
    return false;
  };

  const long min_sep = std::max<long>(
      1, std::lround(options.min_peak_sep_s / options.env_hop_s));
  int peaks = 0;
  long last_peak = -min_sep - 1;
  for (long t = 1; t + 1 < T; ++t) {
    const double v = detrended[static_cast<size_t>(t)];
    if (v < threshold) continue;
    if (v < detrended[static_cast<size_t>(t - 1)] ||
        v <= detrended[static_cast<size_t>(t + 1)])
      continue;
    if (t - last_peak < min_sep) continue;
    if (!frame_in_spans(t)) continue;
    ++peaks;
    last_peak = t;
  }
  return peaks;
}

}  // namespace

VocalisationProfile vocalisation_profile(const std::vector<SegmentSpan> &spans,
                                         const AudioSignal &signal,
                                         const MinimalOptions &options) {
  if (spans.empty())
    throw ValidationError("vocalisation_profile: empty span list");
  for (size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].duration_s() <= 0)
      throw ValidationError("vocalisation_profile: non-positive span duration");
    if (i > 0 && spans[i].start_s < spans[i - 1].end_s)
      throw ValidationError("vocalisation_profile: spans must be sorted and disjoint");
  }

  VocalisationProfile p;
  for (const auto &s : spans) {
    p.vocalisation_durations_s.push_back(s.duration_s());
    p.total_speech_s += s.duration_s();
  }
  for (size_t i = 1; i < spans.size(); ++i)
    p.pause_durations_s.push_back(spans[i].start_s - spans[i - 1].end_s);
  p.syllable_count = count_envelope_peaks(spans, signal, options);
  return p;
}

const std::vector<std::string> &minimal_feature_names() {
  static const std::vector<std::string> names = {
      "voc_dur_mean", "voc_dur_sd",     "voc_dur_median", "voc_dur_min",
      "voc_dur_max",  "pause_dur_mean", "pause_dur_sd",   "pause_dur_median",
      "pause_dur_min", "pause_dur_max", "speech_rate",    "voc_count",
      "total_dur"};
  return names;
}

NamedVector minimal_vector(const std::vector<SegmentSpan> &spans,
                           const AudioSignal &signal,
                           const MinimalOptions &options) {
  const VocalisationProfile p = vocalisation_profile(spans, signal, options);
  const FiveStats voc = five_stats(p.vocalisation_durations_s);
  const FiveStats pause = five_stats(p.pause_durations_s);

  NamedVector out;
  out.names = minimal_feature_names();
  out.values.resize(13);
  out.values << voc.mean, voc.sd, voc.median, voc.min, voc.max, pause.mean,
      pause.sd, pause.median, pause.min, pause.max,
      p.total_speech_s > 0 ? p.syllable_count / p.total_speech_s : 0.0,
      static_cast<double>(p.vocalisation_durations_s.size()),
      signal.duration_s();
  return out;
}

}  // namespace cogspeech
