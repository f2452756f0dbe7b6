#pragma once

#include <vector>

#include "cogspeech/audio.hpp"
#include "cogspeech/named_vector.hpp"

namespace cogspeech {

// Vocalisation/pause timing summary for one recording.
struct VocalisationProfile {
  std::vector<double> vocalisation_durations_s;
  std::vector<double> pause_durations_s;  // gaps between consecutive spans
  double total_speech_s = 0.0;
  int syllable_count = 0;
};

struct MinimalOptions {
  double env_frame_s = 0.025;     // RMS envelope framing
  double env_hop_s = 0.010;
  int fast_ma_frames = 7;         // ~8 Hz smoothing on the 100 Hz envelope
  int slow_ma_frames = 51;        // detrend baseline
  double peak_threshold = 0.10;   // share of the detrended envelope peak
  double min_peak_sep_s = 0.100;  // refractory gap between counted peaks
};

VocalisationProfile vocalisation_profile(const std::vector<SegmentSpan> &spans,
                                         const AudioSignal &signal,
                                         const MinimalOptions &options = {});

const std::vector<std::string> &minimal_feature_names();  // 13 names

// The 13-entry timing feature vector: five statistics each of vocalisation
// and pause durations, speech rate from envelope peak counting, the
// vocalisation count, and the total recording duration.
NamedVector minimal_vector(const std::vector<SegmentSpan> &spans,
                           const AudioSignal &signal,
                           const MinimalOptions &options = {});

}  // namespace cogspeech
