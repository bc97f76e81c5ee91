#include <fstream>

#include "doctest.h"
#include "support.hpp"
#include "whow/config.hpp"

using whow::RunConfig;

TEST_CASE("key=value parsing with comments and blank lines") {
  RunConfig cfg = RunConfig::parse(
      "# run settings\n"
      "\n"
      "model = gpt-4o\n"
      "concurrency=8\n"
      "temperature = 0.25   # inline comment\n"
      "zero_fill_conditionals = yes\n",
      "test.cfg");
  CHECK(cfg.get_or("model", "") == "gpt-4o");
  CHECK(cfg.get_int("concurrency", 0) == 8);
  CHECK(cfg.get_double("temperature", 0.0) == doctest::Approx(0.25));
  CHECK(cfg.get_bool("zero_fill_conditionals", false));
  CHECK_FALSE(cfg.has("missing"));
  CHECK(cfg.get_or("missing", "fallback") == "fallback");
  CHECK(cfg.get_int("missing", 7) == 7);
}

TEST_CASE("bool spellings") {
  RunConfig cfg = RunConfig::parse("a=true\nb=false\nc=1\nd=0\ne=yes\nf=no\n");
  CHECK(cfg.get_bool("a", false));
  CHECK_FALSE(cfg.get_bool("b", true));
  CHECK(cfg.get_bool("c", false));
  CHECK_FALSE(cfg.get_bool("d", true));
  CHECK(cfg.get_bool("e", false));
  CHECK_FALSE(cfg.get_bool("f", true));
}

TEST_CASE("malformed values and lines throw with origin and line number") {
  CHECK_THROWS(RunConfig::parse("no equals sign here\n", "bad.cfg"));
  try {
    RunConfig::parse("x = 1\nbroken line\n", "bad.cfg");
    FAIL("expected parse error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.cfg") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }

  RunConfig cfg = RunConfig::parse("n = 12abc\nf = 1.2.3\n");
  CHECK_THROWS(cfg.get_int("n", 0));
  CHECK_THROWS(cfg.get_double("f", 0.0));
  CHECK_THROWS(cfg.get_bool("n", false));
}

TEST_CASE("later assignments win and items() is sorted") {
  RunConfig cfg = RunConfig::parse("b = 2\na = 1\nb = 3\n");
  CHECK(cfg.get_or("b", "") == "3");
  const auto items = cfg.items();
  REQUIRE(items.size() == 2);
  CHECK(items[0].first == "a");
  CHECK(items[1].first == "b");
}

TEST_CASE("load reads a file and reports missing files") {
  testsup::TempDir dir("config");
  const auto path = dir.path() / "run.cfg";
  std::ofstream(path) << "schema_version = 1\nmodel = test\n";
  RunConfig cfg = RunConfig::load(path);
  CHECK(cfg.get_or("model", "") == "test");
  CHECK_THROWS(RunConfig::load(dir.path() / "absent.cfg"));
}
