#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phonoparse/codebook.hpp"
#include "phonoparse/quantize.hpp"
#include "phonoparse/similarity.hpp"
#include "phonoparse/types.hpp"

namespace phonoparse {

struct ParseConfig {
  Task task = Task::CV;
  Metric metric = Metric::of(MetricKind::InnerProduct);
  QuantizeConfig quantize;
  /// When set, codebooks are built from this task's labels while accuracy is
  /// scored against `task` labels (class mapping is positional: A to A).
  std::optional<Task> cross_task_books;
};

struct SegmentResult {
  SegmentAnnotation segment;
  ClassDecision decision = ClassDecision::Unlabeled;
  std::uint64_t votes_a = 0;
  std::uint64_t votes_b = 0;
  std::uint64_t votes_unlabeled = 0;

  friend bool operator==(const SegmentResult&, const SegmentResult&) = default;
};

/// Scores the pattern against both books; the class whose best member is
/// better under the metric's polarity wins. An exact score tie abstains.
ClassDecision classify_frame(const BinaryPattern& pattern, const CodebookPair& books,
                             const Metric& metric);

/// Majority count over the segment's frame decisions. Unlabeled frames do
/// not vote; equal votes (including zero-zero) yield Unlabeled.
SegmentResult parse_segment(const SegmentAnnotation& seg,
                            std::span<const ClassDecision> frame_decisions);

/// Full top-down pipeline: binarize, concatenate context, classify each
/// frame, majority-vote each annotated segment. One result per annotation,
/// order preserved. Throws before any classification when the quantize
/// config and the books disagree on K, context, or width.
std::vector<SegmentResult> parse_utterance(const PosteriorSequence& seq,
                                           std::span<const SegmentAnnotation> annotations,
                                           const CodebookPair& books, const ParseConfig& cfg);

struct CorpusItem {
  PosteriorSequence sequence;
  std::vector<SegmentAnnotation> annotations;
};

using Corpus = std::vector<CorpusItem>;

struct FoldResult {
  std::uint64_t start_segment = 0;  // index into the flattened segment list
  std::uint64_t segments = 0;
  std::uint64_t correct_segments = 0;
  std::uint64_t unlabeled_segments = 0;
  std::uint64_t frames = 0;
  std::uint64_t correct_frames = 0;
  double segment_accuracy = 0.0;
  double frame_accuracy = 0.0;

  friend bool operator==(const FoldResult&, const FoldResult&) = default;
};

struct EvalReport {
  Task task = Task::CV;
  Metric metric;
  std::size_t context = 0;
  double threshold = 0.5;
  BoundaryPolicy boundary_policy = BoundaryPolicy::Clamp;
  std::optional<Task> cross_task_books;
  std::size_t folds = 0;
  std::size_t fold_length = 0;
  std::uint64_t seed = 0;
  bool holdout = false;
  double segment_accuracy_mean = 0.0;
  double frame_accuracy_mean = 0.0;
  std::vector<FoldResult> per_fold;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Per fold: draw a seeded random window of fold_length consecutive
/// annotated segments, build the codebooks from the selection, classify the
/// same selection, and score segment and frame accuracy (Unlabeled counts as
/// incorrect). With holdout, the window is 2*fold_length segments: books
/// come from the first half, scoring from the second. Honors
/// cfg.cross_task_books when set.
EvalReport evaluate(const Corpus& corpus, const ParseConfig& cfg, std::size_t folds,
                    std::size_t fold_length, std::uint64_t seed, bool holdout = false);

/// evaluate with cfg.cross_task_books required to be set.
EvalReport cross_evaluate(const Corpus& corpus, const ParseConfig& cfg, std::size_t folds,
                          std::size_t fold_length, std::uint64_t seed, bool holdout = false);

}  // namespace phonoparse
