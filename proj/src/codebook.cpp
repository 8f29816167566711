#include "phonoparse/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace phonoparse {

Codebook::Codebook(Task task, ClassId class_id, std::size_t k, std::size_t context)
    : task_(task), class_id_(class_id), k_(k), context_(context) {
  if (k == 0) throw Error("codebook K must be positive");
}

std::uint64_t Codebook::count(const BinaryPattern& p) const {
  const auto it = entries_.find(p);
  return it == entries_.end() ? 0 : it->second;
}

void Codebook::insert(const BinaryPattern& p, std::uint64_t count) {
  if (p.width() != width()) {
    throw Error("codebook entry width " + std::to_string(p.width()) + " differs from book width " +
                std::to_string(width()));
  }
  if (count == 0) throw Error("codebook entry count must be >= 1");
  entries_[p] += count;
  total_count_ += count;
}

std::vector<std::pair<BinaryPattern, std::uint64_t>> Codebook::sorted_entries() const {
  std::vector<std::pair<BinaryPattern, std::uint64_t>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return bitstring_less(x.first, y.first); });
  return out;
}

void accumulate_codebooks(CodebookPair& books,
                          std::span<const std::optional<BinaryPattern>> patterns,
                          std::span<const SegmentAnnotation> annotations) {
  for (const auto& seg : annotations) {
    if (!seg.has_label(books.task)) continue;
    if (seg.start < 0 || seg.end > static_cast<std::int64_t>(patterns.size())) {
      throw Error("annotation [" + std::to_string(seg.start) + ", " + std::to_string(seg.end) +
                  ") references frames beyond N=" + std::to_string(patterns.size()));
    }
    Codebook& book = seg.label(books.task) == ClassId::A ? books.class_a : books.class_b;
    for (std::int64_t f = seg.start; f < seg.end; ++f) {
      const auto& p = patterns[static_cast<std::size_t>(f)];
      if (p) book.insert(*p);
    }
  }
}

CodebookPair build_codebooks(std::span<const std::optional<BinaryPattern>> patterns,
                             std::span<const SegmentAnnotation> annotations, Task task) {
  const auto present =
      std::find_if(patterns.begin(), patterns.end(), [](const auto& p) { return p.has_value(); });
  if (present == patterns.end()) {
    throw Error("cannot build codebooks: no patterns present");
  }
  const std::size_t context = (*present)->context();
  const std::size_t k = (*present)->base_width();
  require_valid(annotations, patterns.size());
  CodebookPair books{task, Codebook(task, ClassId::A, k, context),
                     Codebook(task, ClassId::B, k, context)};
  accumulate_codebooks(books, patterns, annotations);
  return books;
}

namespace {

// Best score any member could possibly reach under the metric's polarity.
double optimum_score(const Metric& metric, std::size_t width) {
  const bool maximize = metric.polarity == Polarity::Maximize;
  switch (metric.kind) {
    case MetricKind::Jaccard:
    case MetricKind::Simpson: return maximize ? 1.0 : 0.0;
    case MetricKind::InnerProduct:
    case MetricKind::Hamming: return maximize ? static_cast<double>(width) : 0.0;
    case MetricKind::Ample:
      return maximize ? std::numeric_limits<double>::infinity() : 0.0;
    case MetricKind::Hellinger: return maximize ? 2.0 : 0.0;
  }
  throw Error("invalid metric kind");
}

// Whether an exact copy of the pattern would attain that optimum, so a hash
// lookup may replace the scan without changing the result.
bool exact_match_is_optimal(const Metric& metric, const BinaryPattern& pattern) {
  const bool maximize = metric.polarity == Polarity::Maximize;
  const std::size_t ones = pattern.popcount();
  switch (metric.kind) {
    case MetricKind::InnerProduct: return maximize;         // score = width
    case MetricKind::Hamming: return !maximize;             // score = 0
    case MetricKind::Jaccard:
    case MetricKind::Simpson: return maximize && ones > 0;  // score = 1
    case MetricKind::Hellinger: return !maximize && ones > 0;
    case MetricKind::Ample: return maximize && ones > 0 && ones < pattern.width();
  }
  throw Error("invalid metric kind");
}

}  // namespace

double match(const BinaryPattern& pattern, const Codebook& book, const Metric& metric) {
  if (book.empty()) {
    throw Error("cannot match against an empty codebook");
  }
  if (pattern.width() != book.width()) {
    throw Error("pattern width " + std::to_string(pattern.width()) +
                " differs from codebook width " + std::to_string(book.width()));
  }
  const double optimum = optimum_score(metric, pattern.width());
  if (exact_match_is_optimal(metric, pattern) && book.contains(pattern)) {
    return optimum;
  }
  bool first = true;
  double best = 0.0;
  for (const auto& [member, count] : book.entries()) {
    (void)count;
    const double s = score(metric.kind, taxonomic_units(pattern, member));
    if (first || better(metric, s, best) == Preference::First) {
      best = s;
      first = false;
      if (best == optimum) break;  // nothing can beat it, ties keep the score
    }
  }
  return best;
}

SparsityStats sparsity_stats(std::span<const BinaryPattern> patterns, std::size_t width) {
  if (patterns.empty()) throw Error("sparsity statistics require a non-empty pattern list");
  std::unordered_set<BinaryPattern, BinaryPattern::Hash> unique;
  for (const auto& p : patterns) {
    if (p.width() != width) {
      throw Error("pattern width " + std::to_string(p.width()) + " differs from stated width " +
                  std::to_string(width));
    }
    unique.insert(p);
  }
  SparsityStats stats;
  stats.unique_count = unique.size();
  stats.total_count = patterns.size();
  stats.ratio_of_total =
      static_cast<double>(stats.unique_count) / static_cast<double>(stats.total_count);
  stats.log10_ratio_of_possible =
      std::log10(static_cast<double>(stats.unique_count)) -
      static_cast<double>(width) * std::log10(2.0);
  const double ratio = std::ldexp(static_cast<double>(stats.unique_count),
                                  -static_cast<int>(std::min<std::size_t>(width, 1200)));
  if (width >= 1024 || ratio == 0.0) {
    stats.ratio_of_possible = 0.0;
    stats.possible_overflow = true;
  } else {
    stats.ratio_of_possible = ratio;
  }
  return stats;
}

}  // namespace phonoparse
