#include <doctest.h>

#include <limits>

#include "phonoparse/types.hpp"

using namespace phonoparse;

namespace {

PosteriorSequence make_sequence(std::size_t n, std::size_t k, double value = 0.5) {
  PosteriorSequence seq;
  for (std::size_t i = 0; i < n; ++i) {
    seq.frames.push_back({std::vector<double>(k, value)});
  }
  return seq;
}

}  // namespace

TEST_CASE("validate_sequence accepts a valid sequence") {
  const auto seq = make_sequence(4, 3, 0.25);
  CHECK(validate_sequence(seq).empty());
}

TEST_CASE("validate_sequence reports out-of-range values with frame and class") {
  auto seq = make_sequence(6, 4);
  seq.frames[3].probs[2] = 1.5;
  const auto violations = validate_sequence(seq);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].frame == 3);
  CHECK(violations[0].class_index == 2);
  CHECK(violations[0].rule.find("out of [0,1]") != std::string::npos);
}

TEST_CASE("validate_sequence reports ragged frames") {
  auto seq = make_sequence(8, 4);
  seq.frames[5].probs.pop_back();
  const auto violations = validate_sequence(seq);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].frame == 5);
  CHECK(violations[0].rule.find("ragged K") != std::string::npos);
}

TEST_CASE("validate_sequence reports non-finite values and empty sequences") {
  auto seq = make_sequence(2, 2);
  seq.frames[1].probs[0] = std::numeric_limits<double>::quiet_NaN();
  auto violations = validate_sequence(seq);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule.find("finite") != std::string::npos);

  const PosteriorSequence empty;
  violations = validate_sequence(empty);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule.find("N >= 1") != std::string::npos);
}

TEST_CASE("validate_sequence checks class name list and frame rate") {
  auto seq = make_sequence(1, 3);
  seq.class_names = {"a", "b"};  // K now comes from the names, so frames look ragged
  CHECK(!validate_sequence(seq).empty());

  seq = make_sequence(1, 2);
  seq.class_names = {"a", "b"};
  seq.frame_rate_hz = -10.0;
  const auto violations = validate_sequence(seq);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule.find("frame_rate_hz") != std::string::npos);
}

TEST_CASE("task and label names round-trip") {
  for (const Task t : kAllTasks) {
    CHECK(task_from_string(task_name(t)) == t);
    for (const ClassId c : {ClassId::A, ClassId::B}) {
      CHECK(class_from_string(t, class_long_label(t, c)) == c);
      CHECK(class_from_string(t, class_short_label(t, c)) == c);
    }
  }
  CHECK(task_from_string("CV") == Task::CV);
  CHECK(!task_from_string("syllable").has_value());
  CHECK(class_from_string(Task::CV, "consonant") == ClassId::A);
  CHECK(!class_from_string(Task::CV, "1").has_value());
  CHECK(class_from_string(Task::Stress, "0") == ClassId::B);
}

TEST_CASE("BinaryPattern bitstring round-trip and bit order") {
  const auto p = BinaryPattern::from_bits("10110");
  CHECK(p.width() == 5);
  CHECK(p.test(0));
  CHECK(!p.test(1));
  CHECK(p.test(2));
  CHECK(p.popcount() == 3);
  CHECK(p.to_bitstring() == "10110");
  CHECK_THROWS_AS(BinaryPattern::from_bits("10x"), Error);
  CHECK_THROWS_AS(p.test(5), Error);
}

TEST_CASE("BinaryPattern width must fit the context blocking") {
  CHECK_THROWS_AS(BinaryPattern(0), Error);
  CHECK_THROWS_AS(BinaryPattern(5, 1), Error);
  const BinaryPattern p(6, 1);
  CHECK(p.base_width() == 3);
}

TEST_CASE("BinaryPattern spans multiple words") {
  std::string bits(130, '0');
  bits[0] = bits[64] = bits[129] = '1';
  const auto p = BinaryPattern::from_bits(bits);
  CHECK(p.words().size() == 3);
  CHECK(p.popcount() == 3);
  CHECK(p.test(64));
  CHECK(p.to_bitstring() == bits);
}

TEST_CASE("BinaryPattern equality and hashing") {
  const auto p = BinaryPattern::from_bits("0101");
  const auto q = BinaryPattern::from_bits("0101");
  const auto r = BinaryPattern::from_bits("0100");
  CHECK(p == q);
  CHECK(BinaryPattern::Hash{}(p) == BinaryPattern::Hash{}(q));
  CHECK(!(p == r));
}

TEST_CASE("bitstring_less sorts like the string form") {
  const auto a = BinaryPattern::from_bits("001");
  const auto b = BinaryPattern::from_bits("010");
  const auto c = BinaryPattern::from_bits("0100");
  CHECK(bitstring_less(a, b));
  CHECK(!bitstring_less(b, a));
  CHECK(bitstring_less(b, c));  // equal prefix, shorter first
  CHECK(!bitstring_less(a, a));
}

TEST_CASE("validate_annotations detects crafted overlap per tier") {
  std::vector<SegmentAnnotation> anns;
  anns.push_back({0, 5, {{Task::CV, ClassId::A}}});
  anns.push_back({5, 9, {{Task::CV, ClassId::B}}});
  CHECK(validate_annotations(anns, 9).empty());

  anns.push_back({4, 6, {{Task::Stress, ClassId::A}}});  // other tier may overlap cv
  CHECK(validate_annotations(anns, 9).empty());

  anns.push_back({8, 10, {{Task::CV, ClassId::A}}});
  const auto violations = validate_annotations(anns, 10);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("overlap") != std::string::npos);
}

TEST_CASE("validate_annotations checks ranges and bounds") {
  std::vector<SegmentAnnotation> anns;
  anns.push_back({5, 3, {{Task::CV, ClassId::A}}});
  CHECK(validate_annotations(anns, std::nullopt).size() == 1);

  anns.clear();
  anns.push_back({0, 12, {{Task::CV, ClassId::A}}});
  CHECK(validate_annotations(anns, 10).size() == 1);
  CHECK(validate_annotations(anns, 12).empty());
}

TEST_CASE("SegmentAnnotation label lookup") {
  const SegmentAnnotation ann{2, 4, {{Task::Stress, ClassId::B}}};
  CHECK(ann.has_label(Task::Stress));
  CHECK(!ann.has_label(Task::CV));
  CHECK(ann.label(Task::Stress) == ClassId::B);
  CHECK_THROWS_AS(ann.label(Task::CV), Error);
  CHECK(ann.num_frames() == 2);
}
