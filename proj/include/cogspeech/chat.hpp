#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cogspeech/named_vector.hpp"

namespace cogspeech {

// One item of a %mor dependent tier, e.g. "v|be&3S" or "det:art|the".
struct MorItem {
  std::string raw;
  std::string pos;        // full tag before '|', e.g. "det:art"
  std::string base_pos;   // tag with subcategories stripped, e.g. "det"
  std::string lemma;      // after '|', before any affix/clitic marker
  int morphemes = 1;      // 1 plus one per '-', '&', '~' marker
  bool punctuation = false;
};

struct ChatToken {
  std::string text;
  bool excluded_retrace = false;  // covered by a following [//]
  bool excluded_repeat = false;   // covered by a following [/]
  bool unintelligible = false;    // the xxx marker
};

struct Utterance {
  std::string speaker;  // 3-letter code, e.g. PAR, INV
  std::vector<ChatToken> tokens;
  std::string terminator;  // ".", "?", "!" when present
  std::vector<MorItem> mor_items;
  bool has_mor = false;
  std::optional<std::pair<long, long>> time_span_ms;
  std::map<std::string, std::string> other_tiers;  // raw dependent tiers
};

struct Transcript {
  std::vector<std::pair<std::string, std::string>> headers;  // @Key lines
  std::vector<Utterance> utterances;
  std::vector<std::string> warnings;  // tolerant-mode recoverable issues
};

enum class ChatParseMode { kStrict, kTolerant };

// Parses CHAT text. Strict mode throws ParseError on structural problems
// (missing @Begin/@End, orphan dependent tier, unknown tier prefix, %mor
// misalignment); tolerant mode always returns a Transcript and collects
// the same issues as warnings.
Transcript parse_chat(std::string_view text,
                      ChatParseMode mode = ChatParseMode::kTolerant);
Transcript parse_chat_file(const std::filesystem::path &path,
                           ChatParseMode mode = ChatParseMode::kTolerant);

// Tokens dropped from analysis because of retracing/repetition markers.
int disfluency_count(const Transcript &t, const std::string &speaker = "PAR");

const std::vector<std::string> &linguistic_measure_names();  // 15 names

// Language outcome measures for one speaker: duration, utterance count,
// MLU, TTR, open/closed ratio and the distribution over nine POS classes
// plus an "other" bucket. Measures that need an absent %mor tier are NaN.
NamedVector linguistic_measures(const Transcript &t,
                                const std::string &speaker = "PAR");

}  // namespace cogspeech
