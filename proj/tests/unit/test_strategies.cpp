#include <doctest.h>

#include <set>

#include "support/test_support.hpp"
#include "tgp/error.hpp"
#include "tgp/extraction/grading.hpp"
#include "tgp/strategies/strategies.hpp"

using namespace tgp;
using namespace tgp::strategies;
using gateway::Role;
using tgp::testing::mc_items;
using tgp::testing::ternary_items;

namespace {

const TaskFormat kMc = TaskFormat::multiple_choice();
const TaskFormat kTernary = TaskFormat::ternary(true);

void check_request_shape(const std::vector<ChatMessage>& messages) {
  CHECK_NOTHROW(gateway::validate_messages(messages));
}

}  // namespace

TEST_CASE("zero-shot: one user turn with lettered options") {
  const auto item = mc_items(1).front();
  const auto msgs = build_zero_shot(item, kMc);
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].role == Role::user);
  for (char c = 'A'; c <= 'D'; ++c) {
    CHECK(msgs[0].content.find(std::string("\n") + c + ". option " + c) != std::string::npos);
  }
  CHECK(msgs[0].content.find(answer_instruction(item, kMc)) != std::string::npos);
  check_request_shape(msgs);
}

TEST_CASE("zero-shot: ternary context precedes the question") {
  const auto item = ternary_items(1).front();
  const auto msgs = build_zero_shot(item, kTernary);
  REQUIRE(msgs.size() == 1);
  const auto& text = msgs[0].content;
  const auto ctx = text.find(*item.context);
  REQUIRE(ctx != std::string::npos);
  CHECK(ctx < text.find(item.question));
  CHECK(text.find("yes, no, or maybe") != std::string::npos);
}

TEST_CASE("zero-shot: malformed items are FormatErrors") {
  auto item = mc_items(1).front();
  item.options.clear();
  CHECK_THROWS_AS(build_zero_shot(item, kMc), FormatError);
  auto t = ternary_items(1).front();
  t.context.reset();
  CHECK_THROWS_AS(build_zero_shot(t, kTernary), FormatError);
}

TEST_CASE("few-shot: k=0 equals zero-shot; sampling is reproducible") {
  const auto pool = mc_items(30, "pool");
  const auto item = mc_items(1, "target").front();
  CHECK(build_few_shot(item, pool, 0, 5, kMc) == build_zero_shot(item, kMc));
  const auto a = build_few_shot(item, pool, 2, 5, kMc);
  CHECK(a == build_few_shot(item, pool, 2, 5, kMc));
  REQUIRE(a.size() == 5);
  CHECK(a[0].role == Role::user);
  CHECK(a[1].role == Role::assistant);
  CHECK(a[2].role == Role::user);
  CHECK(a[3].role == Role::assistant);
  CHECK(a[4] == build_zero_shot(item, kMc)[0]);
  check_request_shape(a);

  std::set<std::string> firsts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    firsts.insert(build_few_shot(item, pool, 2, seed, kMc)[0].content);
  }
  CHECK(firsts.size() > 1);
}

TEST_CASE("few-shot: pool too small, target never an exemplar") {
  const auto pool = mc_items(1, "pool");
  CHECK_THROWS_AS(build_few_shot(mc_items(1, "t").front(), pool, 5, 0, kMc), PoolTooSmall);

  const auto items = mc_items(6);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto msgs = build_few_shot(items[0], items, 5, seed, kMc);
    REQUIRE(msgs.size() == 11);
    for (std::size_t i = 0; i + 1 < msgs.size(); i += 2) {
      CHECK(msgs[i].content.find(items[0].question) == std::string::npos);
    }
  }
  CHECK_THROWS_AS(build_few_shot(items[0], items, 6, 0, kMc), PoolTooSmall);
}

TEST_CASE("few-shot: exemplar answers are the gold labels") {
  const auto pool = mc_items(8, "pool");
  const auto msgs = build_few_shot(mc_items(1, "t").front(), pool, 3, 1, kMc);
  for (std::size_t i = 0; i + 1 < msgs.size(); i += 2) {
    const auto key = msgs[i].content.substr(msgs[i].content.find("(key ") + 5, 1);
    CHECK(msgs[i + 1].content == key);
  }
}

TEST_CASE("cot: verbatim conversation template as the system message") {
  const auto msgs = build_cot(mc_items(1).front(), kMc);
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == Role::system);
  CHECK(msgs[0].content == kCotSystemTemplate);
  CHECK(msgs[0].content.find("<think>") != std::string::npos);
  CHECK(msgs[0].content.find("<answer>") != std::string::npos);
  CHECK(msgs[0].content.rfind("A conversation between User and Assistant.", 0) == 0);
  check_request_shape(msgs);

  const auto t = build_cot(ternary_items(1).front(), kTernary);
  CHECK(t[0].content == kCotSystemTemplate);
  CHECK(t[1].content.find("yes, no, or maybe") != std::string::npos);
  CHECK(t[1].content.find("<answer>") != std::string::npos);
}

TEST_CASE("cot: the template's example conversation extracts to B") {
  QAItem item;
  item.id = "viral";
  item.question = "Which of the following is an effective treatment for a viral infection?";
  item.options = {{'A', "Antibiotics"}, {'B', "Rest and hydration"}, {'C', "Painkillers"},
                  {'D', "Vaccines"}};
  item.gold = "B";
  const auto msgs = build_cot(item, kMc);
  CHECK(msgs[1].content.find("B. Rest and hydration") != std::string::npos);
  const std::string reply =
      "<think> Viral infections cannot be treated with antibiotics because they only target "
      "bacteria. Painkillers (e.g., ibuprofen) help with symptoms but do not fight the virus. "
      "Vaccines are preventive, not a treatment. The best approach is rest and hydration to "
      "support the immune system. </think>\n<answer> B </answer>";
  const auto g = extraction::grade(item, reply, extraction::ExtractionRule::for_format(kMc), kMc);
  CHECK(g.extracted == "B");
  CHECK(g.correct);
}

TEST_CASE("system prompt: verbatim first message, answer instruction appended") {
  const auto item = ternary_items(1).front();
  const auto msgs = build_with_system_prompt(item, kDefaultSeedPrompt, kTernary);
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == Role::system);
  CHECK(msgs[0].content == "You are a helpful, creative, and smart assistant.");
  CHECK(msgs[1].content.find(answer_instruction(item, kTernary)) != std::string::npos);

  const std::string optimized =
      "You provide clear, concise, evidence-based answers...encourage further investigation "
      "when findings are preliminary but maintain assertiveness...focus on precision while "
      "considering research nuances.";
  const auto o = build_with_system_prompt(item, optimized, kTernary);
  CHECK(o[0].content.find("evidence-based") != std::string::npos);
  CHECK_THROWS_AS(build_with_system_prompt(item, "", kTernary), FormatError);
}

TEST_CASE("rendering is pure") {
  const auto items = mc_items(10);
  PromptStrategy s{PromptStrategy::Kind::few_shot, 3, std::nullopt, 9};
  for (const auto& item : items) {
    CHECK(build_messages(s, item, items, kMc) == build_messages(s, item, items, kMc));
  }
}

TEST_CASE("strategy names and validation") {
  CHECK(strategy_from_string("zero-shot") == PromptStrategy::Kind::zero_shot);
  CHECK(strategy_from_string("few-shot") == PromptStrategy::Kind::few_shot);
  CHECK(strategy_from_string("cot") == PromptStrategy::Kind::cot);
  CHECK_THROWS_AS(strategy_from_string("tot"), ConfigError);
  CHECK_THROWS_AS(validate(PromptStrategy{PromptStrategy::Kind::few_shot, std::nullopt, {}, 0}),
                  ConfigError);
  CHECK_THROWS_AS(validate(PromptStrategy{PromptStrategy::Kind::system_prompt, {}, "", 0}),
                  ConfigError);
}
