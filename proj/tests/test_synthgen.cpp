#include <doctest.h>

#include <unordered_set>

#include "phonoparse/quantize.hpp"
#include "phonoparse/synthgen.hpp"

using namespace phonoparse;

namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.k = 8;
  cfg.templates_per_class = SynthConfig::uniform_templates(5);
  cfg.segments = 60;
  cfg.seed = seed;
  return cfg;
}

double eval_accuracy(const SynthCorpus& corpus, std::size_t context, Task task,
                     const Metric& metric) {
  Corpus c;
  c.push_back({corpus.sequence, corpus.annotations});
  ParseConfig cfg;
  cfg.task = task;
  cfg.metric = metric;
  cfg.quantize.context = context;
  const auto report = evaluate(c, cfg, 1, corpus.annotations.size(), 17);
  return report.segment_accuracy_mean;
}

}  // namespace

TEST_CASE("generation is a pure function of the config") {
  const auto a = generate(small_config(99));
  const auto b = generate(small_config(99));
  CHECK(a.sequence == b.sequence);
  CHECK(a.annotations == b.annotations);
  CHECK(a.truth.frame_slots == b.truth.frame_slots);
  REQUIRE(a.truth.pool.size() == b.truth.pool.size());
  for (std::size_t i = 0; i < a.truth.pool.size(); ++i) {
    CHECK(a.truth.pool[i].pattern == b.truth.pool[i].pattern);
    CHECK(a.truth.pool[i].labels == b.truth.pool[i].labels);
  }
  const auto c = generate(small_config(100));
  CHECK(!(a.sequence == c.sequence));
}

TEST_CASE("zero noise and zero softness are exactly invertible by binarization") {
  auto cfg = small_config(5);
  cfg.noise_flip_prob = 0.0;
  cfg.softness = 0.0;
  const auto corpus = generate(cfg);
  const auto patterns = binarize_sequence(corpus.sequence, {});
  REQUIRE(patterns.size() == corpus.truth.frame_slots.size());
  for (std::size_t f = 0; f < patterns.size(); ++f) {
    CHECK(patterns[f] == corpus.truth.pool[corpus.truth.frame_slots[f]].pattern);
  }
}

TEST_CASE("soft noiseless frames still binarize to their templates") {
  auto cfg = small_config(6);
  cfg.noise_flip_prob = 0.0;
  cfg.softness = 0.2;
  const auto corpus = generate(cfg);
  const auto patterns = binarize_sequence(corpus.sequence, {});
  for (std::size_t f = 0; f < patterns.size(); ++f) {
    CHECK(patterns[f] == corpus.truth.pool[corpus.truth.frame_slots[f]].pattern);
  }
}

TEST_CASE("annotations are contiguous, labeled for all tasks, and cover all frames") {
  const auto corpus = generate(small_config(7));
  std::int64_t cursor = 0;
  for (const auto& ann : corpus.annotations) {
    CHECK(ann.start == cursor);
    CHECK(ann.end > ann.start);
    for (const Task t : kAllTasks) CHECK(ann.has_label(t));
    cursor = ann.end;
  }
  CHECK(static_cast<std::size_t>(cursor) == corpus.sequence.num_frames());
  CHECK(validate_annotations(corpus.annotations, corpus.sequence.num_frames()).empty());
  CHECK(validate_sequence(corpus.sequence).empty());
}

TEST_CASE("segment labels match the anchor slot's classes") {
  const auto corpus = generate(small_config(8));
  std::size_t frame = 0;
  for (const auto& ann : corpus.annotations) {
    for (std::int64_t f = ann.start; f < ann.end; ++f) {
      const auto& slot = corpus.truth.pool[corpus.truth.frame_slots[frame++]];
      for (const Task t : kAllTasks) {
        CHECK(slot.labels[task_index(t)] == ann.label(t));
      }
    }
  }
}

TEST_CASE("disjoint mode keeps per-task class pattern sets disjoint and nonzero") {
  const auto corpus = generate(small_config(9));
  for (const Task t : kAllTasks) {
    std::unordered_set<std::string> a;
    std::unordered_set<std::string> b;
    for (const auto& slot : corpus.truth.pool) {
      CHECK(slot.pattern.popcount() > 0);
      (slot.labels[task_index(t)] == ClassId::A ? a : b).insert(slot.pattern.to_bitstring());
    }
    for (const auto& s : a) CHECK(b.count(s) == 0);
  }
}

TEST_CASE("shared mode duplicates pattern values across slots") {
  auto cfg = small_config(10);
  cfg.overlap = TemplateOverlap::Shared;
  cfg.templates_per_class = SynthConfig::uniform_templates(10);
  const auto corpus = generate(cfg);
  std::unordered_set<std::string> values;
  for (const auto& slot : corpus.truth.pool) values.insert(slot.pattern.to_bitstring());
  CHECK(values.size() < corpus.truth.pool.size());
}

TEST_CASE("config validation rejects bad settings") {
  auto cfg = small_config(1);
  cfg.templates_per_class[1][0] = 0;
  CHECK_THROWS_AS(generate(cfg), Error);

  cfg = small_config(1);
  cfg.templates_per_class[2] = {3, 4};  // sums differ across tasks
  CHECK_THROWS_AS(generate(cfg), Error);

  cfg = small_config(1);
  cfg.noise_flip_prob = 0.5;
  CHECK_THROWS_AS(generate(cfg), Error);

  cfg = small_config(1);
  cfg.softness = -0.1;
  CHECK_THROWS_AS(generate(cfg), Error);

  cfg = small_config(1);
  cfg.frames_per_segment_min = 5;
  cfg.frames_per_segment_max = 3;
  CHECK_THROWS_AS(generate(cfg), Error);

  cfg = small_config(1);
  cfg.k = 3;
  cfg.templates_per_class = SynthConfig::uniform_templates(4);  // 8 > 2^3 - 1
  CHECK_THROWS_AS(generate(cfg), Error);

  cfg = small_config(1);
  cfg.link = TaskLink::AccentComplementsStress;
  cfg.templates_per_class[task_index(Task::Stress)] = {4, 6};
  cfg.templates_per_class[task_index(Task::Accent)] = {4, 6};  // must be swapped
  CHECK_THROWS_AS(generate(cfg), Error);
}

TEST_CASE("task links couple the stress and accent labels") {
  auto cfg = small_config(11);
  cfg.link = TaskLink::AccentEqualsStress;
  auto corpus = generate(cfg);
  for (const auto& ann : corpus.annotations) {
    CHECK(ann.label(Task::Accent) == ann.label(Task::Stress));
  }

  cfg.link = TaskLink::AccentComplementsStress;
  corpus = generate(cfg);
  for (const auto& ann : corpus.annotations) {
    CHECK(ann.label(Task::Accent) == other_class(ann.label(Task::Stress)));
  }
}

TEST_CASE("ten noiseless templates yield at most ten unique patterns") {
  auto cfg = small_config(12);
  cfg.noise_flip_prob = 0.0;
  cfg.softness = 0.0;
  const auto corpus = generate(cfg);  // pool size 10
  const auto patterns = binarize_sequence(corpus.sequence, {});
  const auto stats = sparsity_stats(patterns, cfg.k);
  std::unordered_set<std::uint32_t> sampled(corpus.truth.frame_slots.begin(),
                                            corpus.truth.frame_slots.end());
  CHECK(stats.unique_count == sampled.size());
  CHECK(stats.unique_count <= 10);
}

TEST_CASE("noise monotonicity: low noise scores at least as well as high noise") {
  double low_sum = 0.0;
  double high_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cfg = small_config(seed);
    cfg.k = 15;
    cfg.segments = 40;
    cfg.noise_flip_prob = 0.02;
    low_sum += eval_accuracy(generate(cfg), 0, Task::CV,
                             Metric::of(MetricKind::InnerProduct));
    cfg.noise_flip_prob = 0.15;
    high_sum += eval_accuracy(generate(cfg), 0, Task::CV,
                              Metric::of(MetricKind::InnerProduct));
  }
  CHECK(low_sum / 20.0 >= high_sum / 20.0);
}

TEST_CASE("context benefit: context 2 scores at least as well as context 0") {
  double c0_sum = 0.0;
  double c2_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cfg = small_config(seed);
    cfg.k = 8;
    cfg.segments = 40;
    cfg.noise_flip_prob = 0.1;
    const auto corpus = generate(cfg);
    c0_sum += eval_accuracy(corpus, 0, Task::CV, Metric::of(MetricKind::InnerProduct));
    c2_sum += eval_accuracy(corpus, 2, Task::CV, Metric::of(MetricKind::InnerProduct));
  }
  CHECK(c2_sum / 20.0 >= c0_sum / 20.0);
}

TEST_CASE("oracle_parse handles the trivial cases") {
  const auto corpus = generate(small_config(13));
  ParseConfig cfg;
  cfg.task = Task::CV;
  const auto patterns = quantize_sequence(corpus.sequence, cfg.quantize);
  const auto books = build_codebooks(patterns, corpus.annotations, Task::CV);
  const auto empty = oracle_parse(corpus.sequence, {}, books, cfg);
  CHECK(empty.empty());
}
