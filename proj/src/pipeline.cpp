#include "cogspeech/pipeline.hpp"

#include <functional>
#include <mutex>
#include <thread>

#include "cogspeech/chat.hpp"
#include "cogspeech/csv.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

namespace {

void parallel_indices(size_t count, int jobs, const std::function<void(size_t)> &fn) {
  if (jobs <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int n_workers = std::min<int>(jobs, static_cast<int>(count));
  std::vector<std::thread> workers;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      for (size_t i = static_cast<size_t>(w); i < count;
           i += static_cast<size_t>(n_workers)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto &t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

void save_segment_table(const std::filesystem::path &path, const SegmentTable &table) {
  CsvTable csv;
  csv.header = {"subject_id", "segment_index", "start_s", "end_s"};
  for (const auto &row : table)
    csv.rows.push_back({row.subject_id, std::to_string(row.segment_index),
                        format_double(row.start_s), format_double(row.end_s)});
  write_csv(path, csv);
}

SegmentTable load_segment_table(const std::filesystem::path &path) {
  const CsvTable csv = read_csv(path);
  if (csv.header != std::vector<std::string>{"subject_id", "segment_index",
                                             "start_s", "end_s"})
    throw ParseError("segment table " + path.string() + ": bad header");
  SegmentTable table;
  for (size_t i = 0; i < csv.rows.size(); ++i) {
    const auto &row = csv.rows[i];
    const std::string ctx = "segment table row " + std::to_string(i + 1);
    table.push_back({row[0], static_cast<int>(parse_long(row[1], ctx)),
                     parse_double(row[2], ctx), parse_double(row[3], ctx)});
  }
  return table;
}

std::filesystem::path resolve_path(const std::filesystem::path &base_dir,
                                   const std::string &path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

AudioSignal prepare_audio(const std::filesystem::path &audio_path,
                          const AudioPrepOptions &options) {
  AudioSignal signal = read_audio(audio_path);
  if (options.denoise) signal = denoise_stationary(signal);
  if (options.normalize) {
    bool silent = true;
    for (double s : signal.samples)
      if (s != 0.0) {
        silent = false;
        break;
      }
    if (!silent) signal = normalize_volume(signal, options.target_dbfs);
  }
  return signal;
}

SegmentTable segment_manifest(const DatasetManifest &manifest,
                              const std::filesystem::path &base_dir,
                              const AudioPrepOptions &options, int jobs) {
  std::vector<std::vector<SegmentTableRow>> per_subject(manifest.records.size());
  parallel_indices(manifest.records.size(), jobs, [&](size_t i) {
    const SubjectRecord &record = manifest.records[i];
    const AudioSignal signal =
        prepare_audio(resolve_path(base_dir, record.audio_path), options);
    const std::vector<SegmentSpan> spans = vad_segment(signal, options.vad);
    for (size_t s = 0; s < spans.size(); ++s)
      per_subject[i].push_back({record.subject_id, static_cast<int>(s),
                                spans[s].start_s, spans[s].end_s});
  });

  SegmentTable table;
  for (const auto &rows : per_subject)
    table.insert(table.end(), rows.begin(), rows.end());
  return table;
}

namespace {

std::vector<SegmentSpan> spans_for_subject(const SegmentTable &segments,
                                           const std::string &subject_id) {
  std::vector<SegmentSpan> spans;
  for (const auto &row : segments)
    if (row.subject_id == subject_id) spans.push_back({row.start_s, row.end_s});
  return spans;
}

}  // namespace

FeatureMatrix extract_mrcg_features(const DatasetManifest &manifest,
                                    const std::filesystem::path &base_dir,
                                    const SegmentTable &segments,
                                    const AudioPrepOptions &prep,
                                    const MrcgOptions &mrcg_options, int jobs) {
  struct Row {
    FeatureRowKey key;
    Eigen::VectorXd values;
  };
  std::vector<std::vector<Row>> per_subject(manifest.records.size());

  // Feature names are input-independent; derive them once from a probe.
  AudioSignal probe;
  probe.sample_rate = kPipelineRate;
  probe.samples.assign(static_cast<size_t>(kPipelineRate / 2), 0.0);
  const std::vector<std::string> names =
      mrcg_segment_features(probe, mrcg_options).names;

  parallel_indices(manifest.records.size(), jobs, [&](size_t i) {
    const SubjectRecord &record = manifest.records[i];
    const std::vector<SegmentSpan> spans =
        spans_for_subject(segments, record.subject_id);
    if (spans.empty()) return;
    const AudioSignal signal =
        prepare_audio(resolve_path(base_dir, record.audio_path), prep);
    for (size_t s = 0; s < spans.size(); ++s) {
      const NamedVector features =
          mrcg_segment_features(slice(signal, spans[s]), mrcg_options);
      per_subject[i].push_back(
          {{record.subject_id, static_cast<int>(s), spans[s].duration_s()},
           features.values});
    }
  });

  FeatureMatrixBuilder builder(names);
  for (const auto &rows : per_subject)
    for (const auto &row : rows) builder.add_row(row.key, row.values);
  return builder.build();
}

FeatureMatrix extract_minimal_features(const DatasetManifest &manifest,
                                       const std::filesystem::path &base_dir,
                                       const SegmentTable &segments,
                                       const AudioPrepOptions &prep,
                                       const MinimalOptions &options, int jobs) {
  struct Row {
    FeatureRowKey key;
    Eigen::VectorXd values;
    bool present = false;
  };
  std::vector<Row> rows(manifest.records.size());
  parallel_indices(manifest.records.size(), jobs, [&](size_t i) {
    const SubjectRecord &record = manifest.records[i];
    const std::vector<SegmentSpan> spans =
        spans_for_subject(segments, record.subject_id);
    if (spans.empty()) return;
    const AudioSignal signal =
        prepare_audio(resolve_path(base_dir, record.audio_path), prep);
    const NamedVector features = minimal_vector(spans, signal, options);
    rows[i] = {{record.subject_id, 0, signal.duration_s()}, features.values, true};
  });

  FeatureMatrixBuilder builder(minimal_feature_names());
  for (const auto &row : rows)
    if (row.present) builder.add_row(row.key, row.values);
  return builder.build();
}

FeatureMatrix extract_linguistic_features(const DatasetManifest &manifest,
                                          const std::filesystem::path &base_dir,
                                          const std::string &speaker) {
  FeatureMatrixBuilder builder(linguistic_measure_names());
  for (const auto &record : manifest.records) {
    if (record.transcript_path.empty())
      throw ValidationError("linguistic features: subject '" + record.subject_id +
                            "' has no transcript path");
    const Transcript transcript = parse_chat_file(
        resolve_path(base_dir, record.transcript_path), ChatParseMode::kTolerant);
    const NamedVector measures = linguistic_measures(transcript, speaker);
    builder.add_row({record.subject_id, 0, measures.values[0]}, measures);
  }
  return builder.build();
}

}  // namespace cogspeech
