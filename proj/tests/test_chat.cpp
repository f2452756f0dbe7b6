#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cogspeech/chat.hpp"
#include "cogspeech/error.hpp"

using namespace cogspeech;

namespace {

const char *kMinimal =
    "@Begin\n"
    "@Languages:\teng\n"
    "@Participants:\tPAR Participant, INV Investigator\n"
    "*PAR:\tthe boy falls .\n"
    "*PAR:\tthe water runs .\n"
    "@End\n";

}  // namespace

TEST_CASE("two-utterance minimal file parses") {
  const Transcript t = parse_chat(kMinimal, ChatParseMode::kStrict);
  REQUIRE(t.utterances.size() == 2);
  CHECK(t.utterances[0].speaker == "PAR");
  CHECK(t.utterances[1].speaker == "PAR");
  CHECK(t.utterances[0].tokens.size() == 3);
  CHECK(t.utterances[0].terminator == ".");
  CHECK(t.warnings.empty());
}

TEST_CASE("%mor tier items carry POS, lemma and morpheme counts") {
  const std::string text =
      "@Begin\n"
      "*PAR:\tit is the cookie .\n"
      "%mor:\tpro|it v|be&3S det|the n|cookie .\n"
      "@End\n";
  const Transcript t = parse_chat(text, ChatParseMode::kStrict);
  REQUIRE(t.utterances.size() == 1);
  const auto &items = t.utterances[0].mor_items;
  REQUIRE(items.size() == 5);  // four words + terminator
  CHECK(items[0].base_pos == "pro");
  CHECK(items[1].base_pos == "v");
  CHECK(items[2].base_pos == "det");
  CHECK(items[3].base_pos == "n");
  CHECK(items[4].punctuation);
  CHECK(items[0].lemma == "it");
  CHECK(items[1].lemma == "be");
  CHECK(items[1].morphemes == 2);  // be&3S
  CHECK(items[3].morphemes == 1);
}

TEST_CASE("subcategorized tags strip to the base class") {
  const std::string text =
      "@Begin\n"
      "*PAR:\tthe dog .\n"
      "%mor:\tdet:art|the n|dog .\n"
      "@End\n";
  const Transcript t = parse_chat(text);
  CHECK(t.utterances[0].mor_items[0].pos == "det:art");
  CHECK(t.utterances[0].mor_items[0].base_pos == "det");
}

TEST_CASE("dependent tier before any main tier: strict error, tolerant warning") {
  const std::string text =
      "@Begin\n"
      "%mor:\tn|orphan .\n"
      "*PAR:\thello .\n"
      "@End\n";
  CHECK_THROWS_AS(parse_chat(text, ChatParseMode::kStrict), ParseError);
  const Transcript t = parse_chat(text, ChatParseMode::kTolerant);
  CHECK(t.utterances.size() == 1);
  CHECK_FALSE(t.utterances[0].has_mor);
  REQUIRE_FALSE(t.warnings.empty());
  CHECK(t.warnings[0].find("dependent tier") != std::string::npos);
}

TEST_CASE("strict mode requires @Begin and @End") {
  CHECK_THROWS_AS(parse_chat("*PAR:\thello .\n", ChatParseMode::kStrict), ParseError);
  CHECK_THROWS_AS(parse_chat("@Begin\n*PAR:\thi .\n", ChatParseMode::kStrict),
                  ParseError);
}

TEST_CASE("time alignment bullets parse to millisecond spans") {
  const std::string text =
      "@Begin\n"
      "*PAR:\thello there . \x15" "1500_3200\x15\n"
      "@End\n";
  const Transcript t = parse_chat(text);
  REQUIRE(t.utterances[0].time_span_ms.has_value());
  CHECK(t.utterances[0].time_span_ms->first == 1500);
  CHECK(t.utterances[0].time_span_ms->second == 3200);
}

TEST_CASE("retracing and repetition markers exclude the marked material") {
  const std::string text =
      "@Begin\n"
      "*PAR:\t<went to> [//] walked to the xxx store [/] store .\n"
      "@End\n";
  const Transcript t = parse_chat(text);
  const auto &tokens = t.utterances[0].tokens;
  // went, to, walked, to, the, xxx, store, store
  REQUIRE(tokens.size() == 8);
  CHECK(tokens[0].excluded_retrace);
  CHECK(tokens[1].excluded_retrace);
  CHECK_FALSE(tokens[2].excluded_retrace);
  CHECK(tokens[5].unintelligible);
  CHECK(tokens[6].excluded_repeat);  // the token before [/]
  CHECK_FALSE(tokens[7].excluded_repeat);
  CHECK(disfluency_count(t) == 3);
}

TEST_CASE("tolerant mode never throws on arbitrary bytes") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> len_dist(0, 400);
  std::uniform_int_distribution<int> byte_dist(1, 255);
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i)
      text.push_back(static_cast<char>(byte_dist(rng)));
    CHECK_NOTHROW(parse_chat(text, ChatParseMode::kTolerant));
  }
}

TEST_CASE("MLU averages morphemes per utterance") {
  // Two utterances of three morphemes each.
  const std::string text =
      "@Begin\n"
      "*PAR:\tit is cookie .\n"
      "%mor:\tpro|it v|be n|cookie .\n"
      "*PAR:\tdog runs .\n"
      "%mor:\tn|dog v|run&3S .\n"
      "@End\n";
  const Transcript t = parse_chat(text, ChatParseMode::kStrict);
  const NamedVector m = linguistic_measures(t);
  CHECK(m.at("mlu") == doctest::Approx(3.0));
  CHECK(m.at("total_utterances") == doctest::Approx(2.0));
}

TEST_CASE("all-distinct lemmas give TTR 1") {
  const std::string text =
      "@Begin\n"
      "*PAR:\tthe boy runs .\n"
      "%mor:\tdet|the n|boy v|run .\n"
      "@End\n";
  const NamedVector m = linguistic_measures(parse_chat(text));
  CHECK(m.at("ttr") == doctest::Approx(1.0));
}

TEST_CASE("hand-counted ten-token transcript POS percentages") {
  // 4 nouns, 2 verbs, 1 adj, 1 pro, 1 det, 1 prep across ten tokens.
  const std::string text =
      "@Begin\n"
      "*PAR:\tboy dog cookie jar eats runs big she the under .\n"
      "%mor:\tn|boy n|dog n|cookie n|jar v|eat&3S v|run adj|big pro|she "
      "det|the prep|under .\n"
      "@End\n";
  const Transcript t = parse_chat(text, ChatParseMode::kStrict);
  const NamedVector m = linguistic_measures(t);
  CHECK(m.at("pos_pct_n") == doctest::Approx(40.0));
  CHECK(m.at("pos_pct_v") == doctest::Approx(20.0));
  CHECK(m.at("pos_pct_adj") == doctest::Approx(10.0));
  CHECK(m.at("pos_pct_adv") == doctest::Approx(0.0));
  CHECK(m.at("pos_pct_pro") == doctest::Approx(10.0));
  CHECK(m.at("pos_pct_det") == doctest::Approx(10.0));
  CHECK(m.at("pos_pct_prep") == doctest::Approx(10.0));
  CHECK(m.at("pos_pct_conj") == doctest::Approx(0.0));
  CHECK(m.at("pos_pct_int") == doctest::Approx(0.0));
  CHECK(m.at("pos_pct_other") == doctest::Approx(0.0));
  // open = 7 (4n + 2v + 1adj), closed = 3
  CHECK(m.at("open_closed_ratio") == doctest::Approx(7.0 / 3.0));
  CHECK(m.at("ttr") == doctest::Approx(1.0));
}

TEST_CASE("POS percentages plus other always sum to 100") {
  std::mt19937_64 rng(555);
  const std::vector<std::string> tags = {"n",    "v",   "adj",  "adv", "pro",
                                         "det",  "prep", "conj", "int", "co",
                                         "part", "aux"};
  std::uniform_int_distribution<int> n_tokens(1, 30);
  std::uniform_int_distribution<size_t> tag_dist(0, tags.size() - 1);
  for (int trial = 0; trial < 40; ++trial) {
    std::string main = "*PAR:\t";
    std::string mor = "%mor:\t";
    const int n = n_tokens(rng);
    for (int i = 0; i < n; ++i) {
      main += "w" + std::to_string(i) + " ";
      mor += tags[tag_dist(rng)] + "|w" + std::to_string(i) + " ";
    }
    const std::string text = "@Begin\n" + main + ".\n" + mor + ".\n@End\n";
    const NamedVector m = linguistic_measures(parse_chat(text));
    double total = m.at("pos_pct_other");
    for (const char *cls : {"n", "v", "adj", "adv", "pro", "det", "prep",
                            "conj", "int"})
      total += m.at("pos_pct_" + std::string(cls));
    CHECK(std::abs(total - 100.0) < 1e-9);
  }
}

TEST_CASE("MLU is invariant under utterance reordering") {
  const std::string a =
      "@Begin\n"
      "*PAR:\tone .\n%mor:\tdet|one .\n"
      "*PAR:\ttwo words .\n%mor:\tdet|two n|word-PL .\n"
      "@End\n";
  const std::string b =
      "@Begin\n"
      "*PAR:\ttwo words .\n%mor:\tdet|two n|word-PL .\n"
      "*PAR:\tone .\n%mor:\tdet|one .\n"
      "@End\n";
  CHECK(linguistic_measures(parse_chat(a)).at("mlu") ==
        doctest::Approx(linguistic_measures(parse_chat(b)).at("mlu")));
}

TEST_CASE("duration comes from the speaker's alignment extremes") {
  const std::string text =
      "@Begin\n"
      "*PAR:\thello . \x15" "1000_2500\x15\n"
      "*INV:\tmhm . \x15" "2500_3000\x15\n"
      "*PAR:\tgoodbye . \x15" "4000_6100\x15\n"
      "@End\n";
  const NamedVector m = linguistic_measures(parse_chat(text));
  CHECK(m.at("duration_s") == doctest::Approx(5.1));
  CHECK(m.at("total_utterances") == doctest::Approx(2.0));
}

TEST_CASE("measures needing %mor are NaN when the tier is missing") {
  const NamedVector m = linguistic_measures(parse_chat(kMinimal));
  CHECK(std::isnan(m.at("mlu")));
  CHECK(std::isnan(m.at("ttr")));
  CHECK(std::isnan(m.at("pos_pct_n")));
  CHECK(m.at("total_utterances") == doctest::Approx(2.0));
}

TEST_CASE("unknown speaker is an error") {
  CHECK_THROWS_AS(linguistic_measures(parse_chat(kMinimal), "XYZ"),
                  ValidationError);
}

TEST_CASE("strict mode flags %mor misalignment") {
  const std::string text =
      "@Begin\n"
      "*PAR:\tone two three .\n"
      "%mor:\tdet|one det|two .\n"
      "@End\n";
  CHECK_THROWS_AS(parse_chat(text, ChatParseMode::kStrict), ParseError);
  CHECK_FALSE(parse_chat(text, ChatParseMode::kTolerant).warnings.empty());
}
