#include "cogspeech/chat.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cogspeech/csv.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

namespace {

constexpr char kBullet = '\x15';  // delimits time-alignment marks

struct LogicalLine {
  std::string text;
  size_t line_no = 0;  // first physical line
};

// Physical lines starting with a tab continue the previous tier line.
std::vector<LogicalLine> logical_lines(std::string_view text) {
  std::vector<LogicalLine> out;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (!line.empty() && line[0] == '\t' && !out.empty()) {
      out.back().text += ' ';
      out.back().text += line.substr(1);
    } else if (!line.empty()) {
      out.push_back({line, line_no});
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  return out;
}

bool is_terminator(const std::string &s) {
  return s == "." || s == "?" || s == "!" || s == "+..." || s == "+/.";
}

struct Parser {
  ChatParseMode mode;
  Transcript result;

  void issue(const std::string &message, size_t line_no) {
    const std::string full =
        "chat line " + std::to_string(line_no) + ": " + message;
    if (mode == ChatParseMode::kStrict) throw ParseError(full);
    result.warnings.push_back(full);
  }

  // Extracts bullets, expands <...> groups and applies [/] and [//] scopes.
  void parse_main_tier(Utterance &utt, const std::string &body, size_t line_no) {
    std::string clean;
    clean.reserve(body.size());
    for (size_t i = 0; i < body.size();) {
      if (body[i] == kBullet) {
        const size_t end = body.find(kBullet, i + 1);
        if (end == std::string::npos) {
          issue("unterminated time-alignment bullet", line_no);
          break;
        }
        const std::string mark = body.substr(i + 1, end - i - 1);
        const size_t sep = mark.find('_');
        if (sep != std::string::npos) {
          try {
            const long a = std::stol(mark.substr(0, sep));
            const long b = std::stol(mark.substr(sep + 1));
            utt.time_span_ms = {a, b};
          } catch (const std::exception &) {
            issue("bad time-alignment mark '" + mark + "'", line_no);
          }
        }
        i = end + 1;
        continue;
      }
      clean += body[i++];
    }

    std::istringstream words(clean);
    std::string word;
    std::vector<int> current_group;  // token indices inside an open <...>
    std::vector<int> last_scope;     // most recent group or single token
    bool in_group = false;

    while (words >> word) {
      if (word == "[//]" || word == "[/]") {
        const bool retrace = word == "[//]";
        if (last_scope.empty()) {
          issue("retracing marker with nothing to its left", line_no);
          continue;
        }
        for (int idx : last_scope) {
          auto &tok = utt.tokens[static_cast<size_t>(idx)];
          (retrace ? tok.excluded_retrace : tok.excluded_repeat) = true;
        }
        continue;
      }
      if (word.starts_with("[") || word.ends_with("]")) continue;  // other codes

      bool opens = false, closes = false;
      while (word.starts_with("<")) {
        word.erase(0, 1);
        opens = true;
      }
      while (word.ends_with(">")) {
        word.pop_back();
        closes = true;
      }
      if (word.empty()) continue;

      if (is_terminator(word)) {
        utt.terminator = word;
        continue;
      }

      if (opens) {
        in_group = true;
        current_group.clear();
      }
      ChatToken tok;
      tok.text = word;
      tok.unintelligible = word == "xxx";
      utt.tokens.push_back(tok);
      const int idx = static_cast<int>(utt.tokens.size()) - 1;
      if (in_group) current_group.push_back(idx);
      if (closes || !in_group) {
        last_scope = in_group ? current_group : std::vector<int>{idx};
        in_group = false;
      }
    }
  }

  void parse_mor_tier(Utterance &utt, const std::string &body, size_t line_no) {
    std::istringstream words(body);
    std::string word;
    while (words >> word) {
      if (word[0] == kBullet) continue;
      MorItem item;
      item.raw = word;
      const size_t bar = word.find('|');
      if (bar == std::string::npos) {
        item.punctuation = true;
        item.morphemes = 0;
        utt.mor_items.push_back(std::move(item));
        continue;
      }
      item.pos = word.substr(0, bar);
      const size_t colon = item.pos.find(':');
      item.base_pos = colon == std::string::npos ? item.pos : item.pos.substr(0, colon);
      const std::string rest = word.substr(bar + 1);
      const size_t affix = rest.find_first_of("-&~");
      item.lemma = affix == std::string::npos ? rest : rest.substr(0, affix);
      item.morphemes = 1;
      for (char c : word)
        if (c == '-' || c == '&' || c == '~') ++item.morphemes;
      utt.mor_items.push_back(std::move(item));
    }
    utt.has_mor = true;

    int analyzable = 0;
    for (const auto &tok : utt.tokens)
      if (!tok.excluded_retrace && !tok.excluded_repeat && !tok.unintelligible)
        ++analyzable;
    int mor_words = 0;
    for (const auto &item : utt.mor_items)
      if (!item.punctuation) ++mor_words;
    if (mor_words != analyzable)
      issue("%mor has " + std::to_string(mor_words) + " items but " +
                std::to_string(analyzable) + " analyzable tokens",
            line_no);
  }

  void run(std::string_view text) {
    const std::vector<LogicalLine> lines = logical_lines(text);

    if (lines.empty() || lines.front().text.rfind("@Begin", 0) != 0)
      issue("transcript does not begin with @Begin", lines.empty() ? 1 : lines.front().line_no);
    if (lines.empty() || lines.back().text.rfind("@End", 0) != 0)
      issue("transcript does not end with @End", lines.empty() ? 1 : lines.back().line_no);

    Utterance *current = nullptr;
    for (const auto &line : lines) {
      const std::string &s = line.text;
      if (s[0] == '@') {
        const size_t colon = s.find(':');
        if (colon != std::string::npos) {
          std::string value = s.substr(colon + 1);
          const size_t start = value.find_first_not_of(" \t");
          value = start == std::string::npos ? "" : value.substr(start);
          result.headers.emplace_back(s.substr(1, colon - 1), value);
        }
        continue;
      }
      if (s[0] == '*') {
        const size_t colon = s.find(':');
        if (colon == std::string::npos || colon < 2) {
          issue("malformed main tier '" + s.substr(0, 8) + "'", line.line_no);
          continue;
        }
        Utterance utt;
        utt.speaker = s.substr(1, colon - 1);
        parse_main_tier(utt, s.substr(colon + 1), line.line_no);
        result.utterances.push_back(std::move(utt));
        current = &result.utterances.back();
        continue;
      }
      if (s[0] == '%') {
        const size_t colon = s.find(':');
        const std::string tier = colon == std::string::npos ? s.substr(1) : s.substr(1, colon - 1);
        if (current == nullptr) {
          issue("dependent tier %" + tier + " before any main tier; dropped",
                line.line_no);
          continue;
        }
        const std::string body = colon == std::string::npos ? "" : s.substr(colon + 1);
        if (tier == "mor")
          parse_mor_tier(*current, body, line.line_no);
        else if (tier != "com")  // comment tiers ignored
          current->other_tiers[tier] = body;
        continue;
      }
      issue("unknown tier prefix '" + s.substr(0, 1) + "'", line.line_no);
    }
  }
};

}  // namespace

Transcript parse_chat(std::string_view text, ChatParseMode mode) {
  Parser parser{mode, {}};
  parser.run(text);
  return std::move(parser.result);
}

Transcript parse_chat_file(const std::filesystem::path &path,
                           ChatParseMode mode) {
  return parse_chat(read_text_file(path), mode);
}

int disfluency_count(const Transcript &t, const std::string &speaker) {
  int count = 0;
  for (const auto &utt : t.utterances) {
    if (utt.speaker != speaker) continue;
    for (const auto &tok : utt.tokens)
      if (tok.excluded_retrace || tok.excluded_repeat) ++count;
  }
  return count;
}

const std::vector<std::string> &linguistic_measure_names() {
  static const std::vector<std::string> names = {
      "duration_s",   "total_utterances", "mlu",          "ttr",
      "open_closed_ratio", "pos_pct_n",   "pos_pct_v",    "pos_pct_adj",
      "pos_pct_adv",  "pos_pct_pro",      "pos_pct_det",  "pos_pct_prep",
      "pos_pct_conj", "pos_pct_int",      "pos_pct_other"};
  return names;
}

NamedVector linguistic_measures(const Transcript &t, const std::string &speaker) {
  std::vector<const Utterance *> utts;
  for (const auto &utt : t.utterances)
    if (utt.speaker == speaker) utts.push_back(&utt);
  if (utts.empty())
    throw ValidationError("linguistic_measures: no utterances by speaker '" +
                          speaker + "'");

  const double nan = std::nan("");

  double duration_s = 0.0;
  bool aligned_seen = false;
  long first_start = 0, last_end = 0;
  for (const auto *utt : utts) {
    if (!utt->time_span_ms) continue;
    if (!aligned_seen) {
      first_start = utt->time_span_ms->first;
      last_end = utt->time_span_ms->second;
      aligned_seen = true;
    } else {
      first_start = std::min(first_start, utt->time_span_ms->first);
      last_end = std::max(last_end, utt->time_span_ms->second);
    }
  }
  if (aligned_seen) duration_s = (last_end - first_start) / 1000.0;

  // MLU over utterances that carry a %mor tier; TTR and POS shares over all
  // analyzable mor items of the speaker.
  long mor_utterances = 0;
  long morpheme_sum = 0;
  long total_lemmas = 0;
  std::set<std::string> distinct_lemmas;
  static const std::vector<std::string> kPosClasses = {
      "n", "v", "adj", "adv", "pro", "det", "prep", "conj", "int"};
  std::map<std::string, long> pos_counts;
  long other_count = 0, total_items = 0;

  for (const auto *utt : utts) {
    if (!utt->has_mor) continue;
    ++mor_utterances;
    for (const auto &item : utt->mor_items) {
      if (item.punctuation) continue;
      morpheme_sum += item.morphemes;
      ++total_lemmas;
      distinct_lemmas.insert(item.lemma);
      ++total_items;
      if (std::find(kPosClasses.begin(), kPosClasses.end(), item.base_pos) !=
          kPosClasses.end())
        pos_counts[item.base_pos] += 1;
      else
        ++other_count;
    }
  }

  const double mlu =
      mor_utterances > 0 ? static_cast<double>(morpheme_sum) / mor_utterances : nan;
  const double ttr =
      total_lemmas > 0
          ? static_cast<double>(distinct_lemmas.size()) / total_lemmas
          : nan;

  long open_count = 0;
  for (const char *open_class : {"n", "v", "adj", "adv"})
    open_count += pos_counts[open_class];
  const long closed_count = total_items - open_count;
  const double open_closed =
      total_items == 0 ? nan
      : closed_count == 0 ? nan
                          : static_cast<double>(open_count) / closed_count;

  NamedVector out;
  out.names = linguistic_measure_names();
  out.values.resize(15);
  out.values[0] = duration_s;
  out.values[1] = static_cast<double>(utts.size());
  out.values[2] = mlu;
  out.values[3] = ttr;
  out.values[4] = open_closed;
  for (size_t i = 0; i < kPosClasses.size(); ++i)
    out.values[5 + static_cast<long>(i)] =
        total_items > 0 ? 100.0 * pos_counts[kPosClasses[i]] / total_items : nan;
  out.values[14] =
      total_items > 0 ? 100.0 * other_count / total_items : nan;
  return out;
}

}  // namespace cogspeech
