#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "whow/ingest.hpp"
#include "whow/schema.hpp"

using namespace whow;

TEST_CASE("dialogue act string conversions") {
  const DialogueAct all[] = {DialogueAct::prob, DialogueAct::conf, DialogueAct::inst,
                             DialogueAct::inte, DialogueAct::supp, DialogueAct::util};
  for (DialogueAct a : all) {
    CHECK(act_from_string(to_string(a)) == a);
    CHECK(act_from_string(act_display_name(a)) == a);
  }
  CHECK(act_from_string("Probing") == DialogueAct::prob);
  CHECK(act_from_string("probing") == DialogueAct::prob);
  CHECK(act_from_string("All Utility") == DialogueAct::util);
  CHECK(act_from_string("ALL UTILITY") == DialogueAct::util);
  CHECK_FALSE(act_from_string("guessing").has_value());
}

TEST_CASE("dimension string conversions") {
  for (Dimension d : kAllDimensions) CHECK(dimension_from_string(to_string(d)) == d);
  CHECK_FALSE(dimension_from_string("XX").has_value());
}

TEST_CASE("target vocabulary order: debate") {
  Corpus corpus = load_corpus_dir(testsup::fixture("corpus"));
  const Episode& deb = *corpus.find_episode("deb001");
  const auto vocab = target_vocabulary(deb);
  REQUIRE(vocab.size() == 9);
  CHECK(vocab[0] == TargetLabel::Group(TargetKind::unknown));
  CHECK(vocab[1] == TargetLabel::Group(TargetKind::self));
  CHECK(vocab[2] == TargetLabel::Group(TargetKind::everyone));
  CHECK(vocab[3] == TargetLabel::Group(TargetKind::audience));
  CHECK(vocab[4] == TargetLabel::Group(TargetKind::support_team));
  CHECK(vocab[5] == TargetLabel::Group(TargetKind::against_team));
  CHECK(vocab[6] == TargetLabel::Speaker("joe_smith"));
  CHECK(vocab[7] == TargetLabel::Speaker("maria_garcia"));
  CHECK(vocab[8] == TargetLabel::Group(TargetKind::all_speakers));
}

TEST_CASE("target vocabulary order: panel has no debate-only groups") {
  Corpus corpus = load_corpus_dir(testsup::fixture("corpus"));
  const Episode& pan = *corpus.find_episode("pan001");
  const auto vocab = target_vocabulary(pan);
  REQUIRE(vocab.size() == 6);
  CHECK(vocab[0] == TargetLabel::Group(TargetKind::unknown));
  CHECK(vocab[1] == TargetLabel::Group(TargetKind::self));
  CHECK(vocab[2] == TargetLabel::Group(TargetKind::everyone));
  CHECK(vocab[3] == TargetLabel::Speaker("lisa_wong"));
  CHECK(vocab[4] == TargetLabel::Speaker("tom_brown"));
  CHECK(vocab[5] == TargetLabel::Group(TargetKind::all_speakers));
}

TEST_CASE("speaker display names carry team suffixes in debates") {
  Corpus corpus = load_corpus_dir(testsup::fixture("corpus"));
  const Episode& deb = *corpus.find_episode("deb001");
  const Episode& pan = *corpus.find_episode("pan001");
  CHECK(TargetLabel::Speaker("joe_smith").display(deb) == "Joe Smith- for");
  CHECK(TargetLabel::Speaker("maria_garcia").display(deb) == "Maria Garcia- against");
  CHECK(TargetLabel::Speaker("lisa_wong").display(pan) == "Lisa Wong");
}

TEST_CASE("canonicalize_target resolves names, aliases and suffixed forms") {
  Corpus corpus = load_corpus_dir(testsup::fixture("corpus"));
  const Episode& deb = *corpus.find_episode("deb001");

  CHECK(canonicalize_target("everyone", &deb) == TargetLabel::Group(TargetKind::everyone));
  CHECK(canonicalize_target("Everyone", &deb) == TargetLabel::Group(TargetKind::everyone));
  CHECK(canonicalize_target("Support team", &deb) == TargetLabel::Group(TargetKind::support_team));
  CHECK(canonicalize_target("support side", &deb) == TargetLabel::Group(TargetKind::support_team));
  CHECK(canonicalize_target("against side", &deb) == TargetLabel::Group(TargetKind::against_team));
  CHECK(canonicalize_target("All speakers", &deb) == TargetLabel::Group(TargetKind::all_speakers));
  CHECK(canonicalize_target("the audience", &deb) == TargetLabel::Group(TargetKind::audience));

  CHECK(canonicalize_target("joe_smith", &deb) == TargetLabel::Speaker("joe_smith"));
  CHECK(canonicalize_target("Joe Smith", &deb) == TargetLabel::Speaker("joe_smith"));
  CHECK(canonicalize_target("Joe Smith- for", &deb) == TargetLabel::Speaker("joe_smith"));
  CHECK(canonicalize_target("Maria Garcia - against", &deb) ==
        TargetLabel::Speaker("maria_garcia"));

  CHECK_FALSE(canonicalize_target("Nobody Here", &deb).has_value());
}

TEST_CASE("annotation json round-trips with and without rationale") {
  Annotation a;
  a.key = {"deb001", 2, 1};
  a.annotator = "human:a1";
  a.motives = {true, false, true};
  a.act = DialogueAct::conf;
  a.target = TargetLabel::Speaker("maria_garcia");
  a.rationale = "pressed for a reply";
  CHECK(annotation_from_json(to_annotation_json(a)) == a);

  a.rationale.reset();
  CHECK(annotation_from_json(to_annotation_json(a)) == a);
  CHECK(to_annotation_json(a).find("\"rationale\":null") != std::string::npos);
}

TEST_CASE("annotations jsonl reader reports the offending line") {
  std::istringstream in(
      "{\"episode\":\"e\",\"turn\":0,\"sentence\":0,\"annotator\":\"x\","
      "\"motives\":{\"IM\":true,\"CM\":false,\"SM\":false},\"act\":\"prob\","
      "\"target\":\"everyone\",\"rationale\":null}\n"
      "{broken\n");
  try {
    read_annotations_jsonl(in);
    FAIL("expected a parse failure");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("validate_annotation flags non-moderator keys and foreign targets") {
  Corpus corpus = load_corpus_dir(testsup::fixture("corpus"));
  const Episode& deb = *corpus.find_episode("deb001");

  Annotation ok;
  ok.key = {"deb001", 0, 0};
  ok.annotator = "human:a1";
  ok.act = DialogueAct::supp;
  ok.target = TargetLabel::Group(TargetKind::everyone);
  CHECK(validate_annotation(ok, deb).empty());

  Annotation participant_turn = ok;
  participant_turn.key = {"deb001", 1, 0};
  CHECK_FALSE(validate_annotation(participant_turn, deb).empty());

  Annotation bad_sentence = ok;
  bad_sentence.key = {"deb001", 0, 9};
  CHECK_FALSE(validate_annotation(bad_sentence, deb).empty());

  Annotation foreign_target = ok;
  foreign_target.target = TargetLabel::Speaker("lisa_wong");
  CHECK_FALSE(validate_annotation(foreign_target, deb).empty());
}

TEST_CASE("sentence keys order lexicographically") {
  SentenceKey a{"deb001", 0, 1}, b{"deb001", 0, 2}, c{"deb001", 1, 0}, d{"pan001", 0, 0};
  CHECK(a < b);
  CHECK(b < c);
  CHECK(c < d);
  CHECK(to_string(a).find("deb001") != std::string::npos);
}
