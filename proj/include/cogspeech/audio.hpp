#pragma once

#include <filesystem>
#include <vector>

namespace cogspeech {

// Everything downstream of ingestion runs at this rate; the gammatone bank
// tops out at 8 kHz.
constexpr int kPipelineRate = 16000;

struct AudioSignal {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// A voiced region produced by VAD; duration never exceeds the 10 s cap.
struct SegmentSpan {
  double start_s = 0.0;
  double end_s = 0.0;
  double duration_s() const { return end_s - start_s; }
};

// Reads a PCM/float wav file, averages channels to mono, scales to [-1,1]
// and resamples to the pipeline rate when the file rate differs.
AudioSignal read_audio(const std::filesystem::path &path);

// 16-bit PCM writer, mono.
void write_wav(const std::filesystem::path &path, const AudioSignal &signal);

// Multi-channel 16-bit PCM writer (one vector per channel), for fixtures.
void write_wav_channels(const std::filesystem::path &path,
                        const std::vector<std::vector<double>> &channels,
                        int sample_rate);

// Rescales so the peak sits at target_dbfs (default -3 dBFS). Shape is
// preserved up to a positive scalar. Throws on an all-zero signal.
AudioSignal normalize_volume(const AudioSignal &signal,
                             double target_dbfs = -3.0);

struct DenoiseOptions {
  int frame_size = 512;           // samples; power of two
  int hop = 256;
  double noise_quantile = 0.10;   // lowest-energy share of frames
  double oversubtraction = 2.0;
  double floor = 0.05;            // spectral floor as share of noisy magnitude
};

// Magnitude spectral subtraction with the noise profile estimated from the
// lowest-energy frames. Output length equals input length.
AudioSignal denoise_stationary(const AudioSignal &signal,
                               const DenoiseOptions &options = {});

struct VadOptions {
  double threshold_db = 65.0;   // log energy, dB re 1e-10 frame mean-square
  double max_span_s = 10.0;
  double frame_len_s = 0.025;
  double hop_s = 0.010;
  double bridge_gap_s = 0.300;  // gaps shorter than this are bridged
  double min_span_s = 0.100;    // shorter spans are discarded
  bool relative_peak = false;   // threshold at (peak frame dB - margin)
  double peak_margin_db = 30.0;
};

// Frame log-energy thresholding. A full-scale frame sits near 100 dB under
// the default reference. Silence yields an empty list.
std::vector<SegmentSpan> vad_segment(const AudioSignal &signal,
                                     const VadOptions &options = {});

// Extracts the samples covered by a span.
AudioSignal slice(const AudioSignal &signal, const SegmentSpan &span);

}  // namespace cogspeech
