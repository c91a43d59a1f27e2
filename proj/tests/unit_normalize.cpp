#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "mailbot/normalize.hpp"

TEST_CASE("normalize_text lowercases, strips markup, collapses whitespace") {
  CHECK(mailbot::normalize_text("Hello World").text == "hello world");
  CHECK(mailbot::normalize_text("  RESUME \t Attached \r\n ").text == "resume attached");
  CHECK(mailbot::normalize_text("<p>Your <b>Bill</b></p>").text == "your bill");
  CHECK(mailbot::normalize_text("A&amp;B ok&gt;").text == "a b ok>");
  CHECK(mailbot::normalize_text("say &quot;hi&quot; &APOS;x&apos;").text ==
        "say \"hi\" 'x'");
  // the dangerous decodes separate words instead of re-arming the stripper
  CHECK(mailbot::normalize_text("&amp;lt;").text == "lt;");
  CHECK(mailbot::normalize_text("").text == "");
  CHECK(mailbot::normalize_text("   ").text == "");
}

TEST_CASE("tags separate words rather than gluing them") {
  CHECK(mailbot::normalize_text("one<br>two").text == "one two");
  CHECK(mailbot::normalize_text("<div>a</div><div>b</div>").text == "a b");
}

TEST_CASE("non-ASCII bytes survive normalization") {
  CHECK(mailbot::normalize_text("R\xc3\xa9sum\xc3\xa9").text == "r\xc3\xa9sum\xc3\xa9");
}

TEST_CASE("contains is plain substring search") {
  const auto n = mailbot::normalize_text("Your July Invoice #42");
  CHECK(n.contains("invoice"));
  CHECK(n.contains("july invoice"));
  CHECK(!n.contains("bill"));
}

TEST_CASE("ascii_lower leaves non-letters alone") {
  CHECK(mailbot::ascii_lower("AbC-42_x\xc3\x89") == "abc-42_x\xc3\x89");
}

TEST_CASE("normalize_text is idempotent over random noisy input") {
  std::mt19937 rng(4242);
  const std::vector<std::string> tokens = {
      "A",    "z",    " ",     "\t",    "\r\n", "<",     ">",      "&",
      ";",    "amp",  "lt",    "gt",    "&amp;", "&LT;", "&gt;",   "&quot;",
      "&apos;", "<b>", "</b>", "<br",   "\xc3\xa9", "\xff", "\x01", "RESUME",
      "&amp;lt;", "&&", "&am",  "p;",   "  ",    "Bill"};
  std::uniform_int_distribution<std::size_t> pick(0, tokens.size() - 1);
  std::uniform_int_distribution<int> len_dist(0, 40);
  for (int i = 0; i < 600; ++i) {
    std::string s;
    const int n = len_dist(rng);
    for (int k = 0; k < n; ++k) s += tokens[pick(rng)];
    const std::string once = mailbot::normalize_text(s).text;
    CHECK(mailbot::normalize_text(once).text == once);
  }
}
