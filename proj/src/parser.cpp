#include "phonoparse/parser.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "phonoparse/rng.hpp"

namespace phonoparse {

ClassDecision classify_frame(const BinaryPattern& pattern, const CodebookPair& books,
                             const Metric& metric) {
  const double score_a = match(pattern, books.class_a, metric);
  const double score_b = match(pattern, books.class_b, metric);
  switch (better(metric, score_a, score_b)) {
    case Preference::First: return ClassDecision::ClassA;
    case Preference::Second: return ClassDecision::ClassB;
    case Preference::Tie: return ClassDecision::Unlabeled;
  }
  throw Error("invalid preference value");
}

SegmentResult parse_segment(const SegmentAnnotation& seg,
                            std::span<const ClassDecision> frame_decisions) {
  SegmentResult result;
  result.segment = seg;
  for (const ClassDecision d : frame_decisions) {
    switch (d) {
      case ClassDecision::ClassA: ++result.votes_a; break;
      case ClassDecision::ClassB: ++result.votes_b; break;
      case ClassDecision::Unlabeled: ++result.votes_unlabeled; break;
    }
  }
  if (result.votes_a > result.votes_b) {
    result.decision = ClassDecision::ClassA;
  } else if (result.votes_b > result.votes_a) {
    result.decision = ClassDecision::ClassB;
  } else {
    result.decision = ClassDecision::Unlabeled;
  }
  return result;
}

namespace {

void require_books_match(const CodebookPair& books, std::size_t k, const QuantizeConfig& cfg) {
  if (books.class_a.k() != books.class_b.k() ||
      books.class_a.context() != books.class_b.context()) {
    throw Error("codebook pair is inconsistent: the two books disagree on K or context");
  }
  if (books.class_a.k() != k) {
    throw Error("codebook K=" + std::to_string(books.class_a.k()) +
                " differs from sequence K=" + std::to_string(k));
  }
  if (books.class_a.context() != cfg.context) {
    throw Error("codebook context=" + std::to_string(books.class_a.context()) +
                " differs from configured context=" + std::to_string(cfg.context));
  }
}

/// Pure-function cache: identical patterns repeat heavily (that sparsity is
/// the whole point), so each distinct pattern is classified once.
class FrameClassifier {
 public:
  FrameClassifier(const CodebookPair& books, const Metric& metric)
      : books_(books), metric_(metric) {}

  ClassDecision operator()(const BinaryPattern& pattern) {
    const auto it = cache_.find(pattern);
    if (it != cache_.end()) return it->second;
    const ClassDecision d = classify_frame(pattern, books_, metric_);
    cache_.emplace(pattern, d);
    return d;
  }

 private:
  const CodebookPair& books_;
  Metric metric_;
  std::unordered_map<BinaryPattern, ClassDecision, BinaryPattern::Hash> cache_;
};

std::vector<SegmentResult> parse_with_patterns(
    std::span<const std::optional<BinaryPattern>> patterns,
    std::span<const SegmentAnnotation> annotations, const CodebookPair& books,
    const Metric& metric) {
  FrameClassifier classify(books, metric);
  std::vector<SegmentResult> results;
  results.reserve(annotations.size());
  std::vector<ClassDecision> decisions;
  for (const auto& seg : annotations) {
    decisions.clear();
    for (std::int64_t f = seg.start; f < seg.end; ++f) {
      const auto& p = patterns[static_cast<std::size_t>(f)];
      if (p) decisions.push_back(classify(*p));
    }
    results.push_back(parse_segment(seg, decisions));
  }
  return results;
}

}  // namespace

std::vector<SegmentResult> parse_utterance(const PosteriorSequence& seq,
                                           std::span<const SegmentAnnotation> annotations,
                                           const CodebookPair& books, const ParseConfig& cfg) {
  require_valid(seq);
  require_valid(cfg.quantize);
  require_books_match(books, seq.k(), cfg.quantize);
  require_valid(annotations, seq.num_frames());
  const auto patterns = quantize_sequence(seq, cfg.quantize);
  return parse_with_patterns(patterns, annotations, books, cfg.metric);
}

// ---------------------------------------------------------------------------
// Evaluation harness
// ---------------------------------------------------------------------------

namespace {

struct SegmentRef {
  std::size_t item = 0;
  const SegmentAnnotation* annotation = nullptr;
};

/// Flattens the corpus into the ordered list of segments annotated for
/// `task` (corpus order, then start order within each item).
std::vector<SegmentRef> flatten_segments(const Corpus& corpus, Task task) {
  std::vector<SegmentRef> refs;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<const SegmentAnnotation*> anns;
    for (const auto& a : corpus[i].annotations) {
      if (a.has_label(task)) anns.push_back(&a);
    }
    std::sort(anns.begin(), anns.end(),
              [](const auto* x, const auto* y) { return x->start < y->start; });
    for (const auto* a : anns) refs.push_back({i, a});
  }
  return refs;
}

struct FoldScore {
  std::uint64_t correct_segments = 0;
  std::uint64_t unlabeled_segments = 0;
  std::uint64_t frames = 0;
  std::uint64_t correct_frames = 0;
};

}  // namespace

EvalReport evaluate(const Corpus& corpus, const ParseConfig& cfg, std::size_t folds,
                    std::size_t fold_length, std::uint64_t seed, bool holdout) {
  if (folds < 1) throw Error("folds must be >= 1");
  if (fold_length < 1) throw Error("fold length must be >= 1");
  require_valid(cfg.quantize);
  const Task books_task = cfg.cross_task_books.value_or(cfg.task);

  // Validate and quantize every utterance once, up front.
  std::vector<std::vector<std::optional<BinaryPattern>>> patterns;
  patterns.reserve(corpus.size());
  std::optional<std::size_t> k;
  for (const auto& item : corpus) {
    require_valid(item.sequence);
    require_valid(std::span<const SegmentAnnotation>(item.annotations),
                  item.sequence.num_frames());
    if (k && item.sequence.k() != *k) {
      throw Error("corpus sequences disagree on K");
    }
    k = item.sequence.k();
    patterns.push_back(quantize_sequence(item.sequence, cfg.quantize));
  }

  const auto segments = flatten_segments(corpus, cfg.task);
  if (cfg.cross_task_books) {
    for (const auto& ref : segments) {
      if (!ref.annotation->has_label(books_task)) {
        throw Error("cross-task evaluation needs every segment annotated for both tasks; "
                    "segment [" +
                    std::to_string(ref.annotation->start) + ", " +
                    std::to_string(ref.annotation->end) + ") lacks a " +
                    std::string(task_name(books_task)) + " label");
      }
    }
  }

  const std::size_t window = holdout ? 2 * fold_length : fold_length;
  if (segments.size() < window) {
    throw Error("insufficient annotated segments: need " + std::to_string(window) + ", have " +
                std::to_string(segments.size()));
  }

  EvalReport report;
  report.task = cfg.task;
  report.metric = cfg.metric;
  report.context = cfg.quantize.context;
  report.threshold = cfg.quantize.threshold;
  report.boundary_policy = cfg.quantize.boundary_policy;
  report.cross_task_books = cfg.cross_task_books;
  report.folds = folds;
  report.fold_length = fold_length;
  report.seed = seed;
  report.holdout = holdout;

  for (std::size_t fold = 0; fold < folds; ++fold) {
    rng::Stream stream(seed, fold);
    const std::size_t start =
        static_cast<std::size_t>(stream.below(segments.size() - window + 1));
    const auto train = std::span(segments).subspan(start, fold_length);
    const auto test =
        holdout ? std::span(segments).subspan(start + fold_length, fold_length) : train;

    CodebookPair books{books_task,
                       Codebook(books_task, ClassId::A, *k, cfg.quantize.context),
                       Codebook(books_task, ClassId::B, *k, cfg.quantize.context)};
    for (const auto& ref : train) {
      const std::array<SegmentAnnotation, 1> one = {*ref.annotation};
      accumulate_codebooks(books, patterns[ref.item], one);
    }

    FrameClassifier classify(books, cfg.metric);
    FoldScore score;
    for (const auto& ref : test) {
      const SegmentAnnotation& seg = *ref.annotation;
      std::vector<ClassDecision> decisions;
      for (std::int64_t f = seg.start; f < seg.end; ++f) {
        const auto& p = patterns[ref.item][static_cast<std::size_t>(f)];
        if (p) decisions.push_back(classify(*p));
      }
      const SegmentResult result = parse_segment(seg, decisions);
      const ClassDecision truth = to_decision(seg.label(cfg.task));
      if (result.decision == truth) ++score.correct_segments;
      if (result.decision == ClassDecision::Unlabeled) ++score.unlabeled_segments;
      score.frames += decisions.size();
      for (const ClassDecision d : decisions) {
        if (d == truth) ++score.correct_frames;
      }
    }

    FoldResult fr;
    fr.start_segment = start;
    fr.segments = test.size();
    fr.correct_segments = score.correct_segments;
    fr.unlabeled_segments = score.unlabeled_segments;
    fr.frames = score.frames;
    fr.correct_frames = score.correct_frames;
    fr.segment_accuracy =
        static_cast<double>(score.correct_segments) / static_cast<double>(test.size());
    fr.frame_accuracy = score.frames == 0 ? 0.0
                                          : static_cast<double>(score.correct_frames) /
                                                static_cast<double>(score.frames);
    report.per_fold.push_back(fr);
  }

  double seg_sum = 0.0;
  double frame_sum = 0.0;
  for (const auto& fr : report.per_fold) {
    seg_sum += fr.segment_accuracy;
    frame_sum += fr.frame_accuracy;
  }
  report.segment_accuracy_mean = seg_sum / static_cast<double>(folds);
  report.frame_accuracy_mean = frame_sum / static_cast<double>(folds);
  return report;
}

EvalReport cross_evaluate(const Corpus& corpus, const ParseConfig& cfg, std::size_t folds,
                          std::size_t fold_length, std::uint64_t seed, bool holdout) {
  if (!cfg.cross_task_books) {
    throw Error("cross_evaluate requires cross_task_books to be set");
  }
  return evaluate(corpus, cfg, folds, fold_length, seed, holdout);
}

}  // namespace phonoparse
