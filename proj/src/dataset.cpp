#include "cogspeech/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "cogspeech/csv.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

std::string group_to_string(Group g) { return g == Group::kAd ? "AD" : "nonAD"; }

Group group_from_string(const std::string &s) {
  if (s == "AD") return Group::kAd;
  if (s == "nonAD") return Group::kNonAd;
  throw ParseError("unknown group '" + s + "' (expected AD or nonAD)");
}

std::string gender_to_string(Gender g) { return g == Gender::kMale ? "M" : "F"; }

Gender gender_from_string(const std::string &s) {
  if (s == "M") return Gender::kMale;
  if (s == "F") return Gender::kFemale;
  throw ParseError("unknown gender '" + s + "' (expected M or F)");
}

std::string AgeBand::to_string() const {
  return "[" + std::to_string(low) + "," + std::to_string(high) + ")";
}

const SubjectRecord *DatasetManifest::find(const std::string &subject_id) const {
  for (const auto &r : records)
    if (r.subject_id == subject_id) return &r;
  return nullptr;
}

static const char *kManifestHeader =
    "subject_id,group,mmse,age_low,age_high,gender,audio_path,transcript_path";

void validate_manifest(const DatasetManifest &manifest) {
  std::set<std::string> ids, audio_paths;
  for (const auto &r : manifest.records) {
    const std::string ctx = "subject '" + r.subject_id + "'";
    if (r.subject_id.empty()) throw ValidationError("empty subject_id");
    if (!ids.insert(r.subject_id).second)
      throw ValidationError("duplicate subject_id '" + r.subject_id + "'");
    if (r.mmse < 0 || r.mmse > 30)
      throw ValidationError(ctx + ": mmse " + std::to_string(r.mmse) +
                            " outside [0,30]");
    if (r.age_band.low >= r.age_band.high)
      throw ValidationError(ctx + ": age band lower bound must be < upper");
    if (r.age_band.low < 50 || r.age_band.low > 75 || r.age_band.low % 5 != 0 ||
        r.age_band.high != r.age_band.low + 5)
      throw ValidationError(ctx + ": age band " + r.age_band.to_string() +
                            " not on the 5-year grid [50,55)..[75,80)");
    if (!r.audio_path.empty() && !audio_paths.insert(r.audio_path).second)
      throw ValidationError(ctx + ": audio_path '" + r.audio_path +
                            "' duplicates another record");
  }
}

DatasetManifest load_manifest(const std::filesystem::path &path, Split split) {
  if (!std::filesystem::exists(path))
    throw IoError("manifest not found: " + path.string());
  CsvTable table = read_csv(path);
  if (format_csv({table.header, {}}) != std::string(kManifestHeader) + "\n")
    throw ParseError("manifest " + path.string() + ": bad header, expected '" +
                     kManifestHeader + "'");

  DatasetManifest manifest;
  manifest.split = split;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto &row = table.rows[i];
    const std::string ctx = "manifest row " + std::to_string(i + 1);
    SubjectRecord r;
    r.subject_id = row[0];
    r.group = group_from_string(row[1]);
    r.mmse = static_cast<int>(parse_long(row[2], ctx + " mmse"));
    r.age_band.low = static_cast<int>(parse_long(row[3], ctx + " age_low"));
    r.age_band.high = static_cast<int>(parse_long(row[4], ctx + " age_high"));
    r.gender = gender_from_string(row[5]);
    r.audio_path = row[6];
    r.transcript_path = row[7];
    manifest.records.push_back(std::move(r));
  }
  validate_manifest(manifest);
  return manifest;
}

void save_manifest(const std::filesystem::path &path,
                   const DatasetManifest &manifest) {
  validate_manifest(manifest);
  CsvTable table;
  table.header = {"subject_id", "group",  "mmse",       "age_low",
                  "age_high",   "gender", "audio_path", "transcript_path"};
  for (const auto &r : manifest.records) {
    table.rows.push_back({r.subject_id, group_to_string(r.group),
                          std::to_string(r.mmse), std::to_string(r.age_band.low),
                          std::to_string(r.age_band.high),
                          gender_to_string(r.gender), r.audio_path,
                          r.transcript_path});
  }
  write_csv(path, table);
}

namespace {

struct MmseAccum {
  std::vector<int> values;
  void add(int v) { values.push_back(v); }
  std::optional<double> mean() const {
    if (values.empty()) return std::nullopt;
    double s = 0;
    for (int v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  std::optional<double> sd() const {
    if (values.size() < 2) return std::nullopt;  // reported as n/a
    const double m = *mean();
    double ss = 0;
    for (int v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
};

}  // namespace

BalanceReport balance_report(const DatasetManifest &manifest) {
  std::map<std::pair<int, int>, std::vector<const SubjectRecord *>> by_band;
  for (const auto &r : manifest.records)
    by_band[{r.age_band.low, r.age_band.high}].push_back(&r);

  BalanceReport report;
  MmseAccum total_mmse[2];
  auto fill = [](GroupCell &cell, MmseAccum &acc,
                 const std::vector<const SubjectRecord *> &records, Group g) {
    MmseAccum band_acc;
    for (const auto *r : records) {
      if (r->group != g) continue;
      (r->gender == Gender::kMale ? cell.male : cell.female) += 1;
      band_acc.add(r->mmse);
      acc.add(r->mmse);
    }
    cell.mmse_mean = band_acc.mean();
    cell.mmse_sd = band_acc.sd();
  };

  for (const auto &[band, records] : by_band) {
    BalanceRow row;
    row.band = {band.first, band.second};
    fill(row.ad, total_mmse[0], records, Group::kAd);
    fill(row.non_ad, total_mmse[1], records, Group::kNonAd);
    report.bands.push_back(std::move(row));
  }

  for (const auto &row : report.bands) {
    report.totals.ad.male += row.ad.male;
    report.totals.ad.female += row.ad.female;
    report.totals.non_ad.male += row.non_ad.male;
    report.totals.non_ad.female += row.non_ad.female;
  }
  report.totals.ad.mmse_mean = total_mmse[0].mean();
  report.totals.ad.mmse_sd = total_mmse[0].sd();
  report.totals.non_ad.mmse_mean = total_mmse[1].mean();
  report.totals.non_ad.mmse_sd = total_mmse[1].sd();
  return report;
}

static std::string fmt1(const std::optional<double> &v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *v);
  return buf;
}

std::string BalanceReport::to_csv() const {
  CsvTable table;
  table.header = {"age_band",   "ad_m",     "ad_f",   "ad_mmse_mean",
                  "ad_mmse_sd", "nonad_m",  "nonad_f", "nonad_mmse_mean",
                  "nonad_mmse_sd"};
  auto push = [&table](const std::string &label, const BalanceRow &row) {
    table.rows.push_back({label, std::to_string(row.ad.male),
                          std::to_string(row.ad.female), fmt1(row.ad.mmse_mean),
                          fmt1(row.ad.mmse_sd), std::to_string(row.non_ad.male),
                          std::to_string(row.non_ad.female),
                          fmt1(row.non_ad.mmse_mean), fmt1(row.non_ad.mmse_sd)});
  };
  for (const auto &row : bands) push(row.band.to_string(), row);
  push("Total", totals);
  return format_csv(table);
}

}  // namespace cogspeech
