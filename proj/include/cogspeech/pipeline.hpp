#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cogspeech/audio.hpp"
#include "cogspeech/dataset.hpp"
#include "cogspeech/feature_matrix.hpp"
#include "cogspeech/minimal_features.hpp"
#include "cogspeech/mrcg.hpp"

namespace cogspeech {

// Enhancement + VAD settings applied identically at segmentation and
// extraction time. Enhancement runs before VAD.
struct AudioPrepOptions {
  bool denoise = true;
  bool normalize = true;
  double target_dbfs = -3.0;
  VadOptions vad;
};

struct SegmentTableRow {
  std::string subject_id;
  int segment_index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
};
using SegmentTable = std::vector<SegmentTableRow>;

void save_segment_table(const std::filesystem::path &path, const SegmentTable &table);
SegmentTable load_segment_table(const std::filesystem::path &path);

// Resolves a manifest-relative audio/transcript path.
std::filesystem::path resolve_path(const std::filesystem::path &base_dir,
                                   const std::string &path);

// Reads, enhances and prepares one recording.
AudioSignal prepare_audio(const std::filesystem::path &audio_path,
                          const AudioPrepOptions &options);

// VAD over every manifest recording; spans are listed in manifest order.
SegmentTable segment_manifest(const DatasetManifest &manifest,
                              const std::filesystem::path &base_dir,
                              const AudioPrepOptions &options, int jobs = 1);

// Cochleagram-stack functionals per segment; one row per (subject, segment).
FeatureMatrix extract_mrcg_features(const DatasetManifest &manifest,
                                    const std::filesystem::path &base_dir,
                                    const SegmentTable &segments,
                                    const AudioPrepOptions &prep,
                                    const MrcgOptions &mrcg_options = {},
                                    int jobs = 1);

// Timing features per recording; one subject-level row per subject.
FeatureMatrix extract_minimal_features(const DatasetManifest &manifest,
                                       const std::filesystem::path &base_dir,
                                       const SegmentTable &segments,
                                       const AudioPrepOptions &prep,
                                       const MinimalOptions &options = {},
                                       int jobs = 1);

// Transcript measures per subject; requires every record to carry a
// transcript path.
FeatureMatrix extract_linguistic_features(const DatasetManifest &manifest,
                                          const std::filesystem::path &base_dir,
                                          const std::string &speaker = "PAR");

}  // namespace cogspeech
