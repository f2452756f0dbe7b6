#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cogspeech {

enum class Group { kAd, kNonAd };
enum class Gender { kMale, kFemale };
enum class Split { kTrain, kTest };

std::string group_to_string(Group g);        // "AD" / "nonAD"
Group group_from_string(const std::string &s);
std::string gender_to_string(Gender g);      // "M" / "F"
Gender gender_from_string(const std::string &s);

// Half-open age interval in years, on the 5-year grid [50,55) .. [75,80).
struct AgeBand {
  int low = 0;
  int high = 0;
  std::string to_string() const;  // "[50,55)"
};

struct SubjectRecord {
  std::string subject_id;
  Group group = Group::kNonAd;
  int mmse = 0;                   // integer score in [0,30]
  AgeBand age_band;
  Gender gender = Gender::kMale;
  std::string audio_path;
  std::string transcript_path;    // may be empty
};

// Ordered subject table; the unit of LOSO folding. Read-only after load.
struct DatasetManifest {
  Split split = Split::kTrain;
  std::vector<SubjectRecord> records;

  const SubjectRecord *find(const std::string &subject_id) const;
};

DatasetManifest load_manifest(const std::filesystem::path &path,
                              Split split = Split::kTrain);
void save_manifest(const std::filesystem::path &path,
                   const DatasetManifest &manifest);

// Validates all manifest invariants; throws ValidationError on violation.
void validate_manifest(const DatasetManifest &manifest);

// One group's column block in the balance table.
struct GroupCell {
  int male = 0;
  int female = 0;
  std::optional<double> mmse_mean;  // absent for empty groups
  std::optional<double> mmse_sd;    // absent (reported n/a) for n <= 1
  int count() const { return male + female; }
};

struct BalanceRow {
  AgeBand band;
  GroupCell ad;
  GroupCell non_ad;
};

// Per-band counts plus per-group MMSE mean and sample (n-1) sd, with a
// totals row; mirrors the demographic tables the dataset ships with.
struct BalanceReport {
  std::vector<BalanceRow> bands;  // sorted by band
  BalanceRow totals;              // totals.band unused

  std::string to_csv() const;
};

BalanceReport balance_report(const DatasetManifest &manifest);

}  // namespace cogspeech
