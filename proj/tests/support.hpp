#pragma once

// Shared helpers for the test binaries: fixture locations, tiny episode
// builders, a seeded random-episode generator for property tests, and a
// CLI runner that captures output and exit status.

#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "whow/corpus.hpp"
#include "whow/schema.hpp"

#ifndef WHOW_FIXTURE_DIR
#error "WHOW_FIXTURE_DIR must be defined by the build"
#endif

namespace testsup {

inline std::filesystem::path fixture_dir() { return WHOW_FIXTURE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return fixture_dir() / rel; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A merged three-speaker debate: moderator between a for- and an
// against-team speaker. Six turns, moderator turns at 0, 2 and 4.
inline whow::Episode tiny_debate() {
  whow::Episode ep;
  ep.id = "tiny";
  ep.domain = whow::Domain::debate;
  ep.topic = "Cats make better pets than dogs";
  ep.split = whow::Split::test;
  ep.speakers = {{"mod", "Alex Reed", whow::Role::moderator},
                 {"joe", "Joe Smith", whow::Role::for_team},
                 {"ann", "Ann Lee", whow::Role::against_team}};
  auto turn = [](int idx, std::string who, std::vector<std::string> texts) {
    whow::Turn t;
    t.index = idx;
    t.speaker_id = std::move(who);
    for (auto& txt : texts)
      t.sentences.push_back({static_cast<int>(t.sentences.size()), std::move(txt)});
    return t;
  };
  ep.turns = {turn(0, "mod", {"Welcome everyone.", "Joe, your opening?"}),
              turn(1, "joe", {"Cats are independent."}),
              turn(2, "mod", {"Ann, do you agree?"}),
              turn(3, "ann", {"Not at all."}),
              turn(4, "mod", {"Let us wrap up."}),
              turn(5, "joe", {"Final word: cats."})};
  return ep;
}

// Random merged episode: 3-30 turns, 2-6 speakers (one moderator), no two
// consecutive turns by the same speaker.
inline whow::Episode random_episode(std::mt19937& rng, int index) {
  whow::Episode ep;
  ep.id = "rnd" + std::to_string(index);
  const bool debate = rng() % 2 == 0;
  ep.domain = debate ? whow::Domain::debate : whow::Domain::panel;
  ep.topic = "Generated topic " + std::to_string(index);
  ep.split = whow::Split::test;

  std::uniform_int_distribution<int> speaker_count(2, 6);
  const int n_speakers = speaker_count(rng);
  ep.speakers.push_back({"mod", "Moderator", whow::Role::moderator});
  for (int s = 1; s < n_speakers; ++s) {
    whow::Role role = whow::Role::participant;
    if (debate) role = s % 2 ? whow::Role::for_team : whow::Role::against_team;
    ep.speakers.push_back({"p" + std::to_string(s), "Person " + std::to_string(s), role});
  }

  std::uniform_int_distribution<int> turn_count(3, 30);
  std::uniform_int_distribution<int> sentence_count(1, 3);
  const int n_turns = turn_count(rng);
  int prev = -1;
  for (int t = 0; t < n_turns; ++t) {
    int who;
    do {
      who = static_cast<int>(rng() % n_speakers);
    } while (who == prev);
    prev = who;
    whow::Turn turn;
    turn.index = t;
    turn.speaker_id = ep.speakers[static_cast<size_t>(who)].id;
    const int n_sents = sentence_count(rng);
    for (int s = 0; s < n_sents; ++s)
      turn.sentences.push_back({s, "Sentence " + std::to_string(s) + " of turn " +
                                       std::to_string(t) + "."});
    ep.turns.push_back(std::move(turn));
  }
  return ep;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

#ifdef WHOW_CLI_PATH
inline CliResult run_cli(const std::string& args) {
  CliResult r;
  const std::string cmd = std::string(WHOW_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return r;
}
#endif

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("whow_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testsup
