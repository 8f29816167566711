#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phonoparse/similarity.hpp"
#include "phonoparse/types.hpp"

namespace phonoparse {

/// The unique binary patterns observed for one class of one task, with
/// occurrence counts. Cardinality equals the number of unique class-specific
/// structures. Single-writer during construction, immutable afterwards.
class Codebook {
 public:
  Codebook(Task task, ClassId class_id, std::size_t k, std::size_t context);

  Task task() const { return task_; }
  ClassId class_id() const { return class_id_; }
  std::size_t k() const { return k_; }
  std::size_t context() const { return context_; }
  std::size_t width() const { return k_ * (context_ + 1); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::uint64_t total_count() const { return total_count_; }
  std::uint64_t count(const BinaryPattern& p) const;
  bool contains(const BinaryPattern& p) const { return count(p) != 0; }

  /// Adds `count` occurrences of a pattern. Throws on width mismatch or
  /// count = 0.
  void insert(const BinaryPattern& p, std::uint64_t count = 1);

  using EntryMap = std::unordered_map<BinaryPattern, std::uint64_t, BinaryPattern::Hash>;
  const EntryMap& entries() const { return entries_; }

  /// Entries in lexicographic bitstring order, the canonical file order.
  std::vector<std::pair<BinaryPattern, std::uint64_t>> sorted_entries() const;

  friend bool operator==(const Codebook& x, const Codebook& y) {
    return x.task_ == y.task_ && x.class_id_ == y.class_id_ && x.k_ == y.k_ &&
           x.context_ == y.context_ && x.entries_ == y.entries_;
  }

 private:
  Task task_;
  ClassId class_id_;
  std::size_t k_;
  std::size_t context_;
  std::uint64_t total_count_ = 0;
  EntryMap entries_;
};

/// The two codebooks of one task. class_a holds the marked class
/// (Consonant / Stressed / Accented).
struct CodebookPair {
  Task task;
  Codebook class_a;
  Codebook class_b;

  const Codebook& book(ClassId c) const { return c == ClassId::A ? class_a : class_b; }
  std::size_t width() const { return class_a.width(); }
};

/// Inserts each frame's pattern (aligned 1:1 with frames; nullopt marks
/// anchors dropped by the Skip policy) into the codebook of its enclosing
/// segment's class for `task`. Frames outside any segment labeled for the
/// task are ignored.
void accumulate_codebooks(CodebookPair& books,
                          std::span<const std::optional<BinaryPattern>> patterns,
                          std::span<const SegmentAnnotation> annotations);

/// Builds a fresh pair from one utterance's patterns and annotations.
/// Throws when an annotation references frames beyond the pattern list or
/// when segments of the task's tier overlap.
CodebookPair build_codebooks(std::span<const std::optional<BinaryPattern>> patterns,
                             std::span<const SegmentAnnotation> annotations, Task task);

/// Best score over the book's members under the metric's polarity, by full
/// linear scan. Throws on an empty book or width mismatch.
double match(const BinaryPattern& pattern, const Codebook& book, const Metric& metric);

struct SparsityStats {
  std::uint64_t unique_count = 0;
  std::uint64_t total_count = 0;
  double ratio_of_total = 0.0;
  /// unique_count / 2^width; 0 with possible_overflow set when 2^width is
  /// not representable (the log-space field is always valid).
  double ratio_of_possible = 0.0;
  bool possible_overflow = false;
  double log10_ratio_of_possible = 0.0;
};

/// Uniqueness statistics of a pattern list. All patterns must have the
/// stated width; the list must be non-empty.
SparsityStats sparsity_stats(std::span<const BinaryPattern> patterns, std::size_t width);

}  // namespace phonoparse
