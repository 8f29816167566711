#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phonoparse {

/// Error type thrown on contract violations and malformed input.
/// Messages from the file readers carry "path:line:" prefixes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tasks and class labels
// ---------------------------------------------------------------------------

/// The three parsing scenarios. Every task is a binary classification.
enum class Task { CV, Stress, Accent };

inline constexpr std::size_t kNumTasks = 3;
inline constexpr Task kAllTasks[kNumTasks] = {Task::CV, Task::Stress, Task::Accent};

std::size_t task_index(Task t);
std::string_view task_name(Task t);
std::optional<Task> task_from_string(std::string_view name);

/// One of the two classes of a task. A is the marked class
/// (Consonant / Stressed / Accented), B the other.
enum class ClassId { A, B };

inline ClassId other_class(ClassId c) { return c == ClassId::A ? ClassId::B : ClassId::A; }

/// Outcome of classifying a frame or a segment. Unlabeled is produced only
/// by the tie rule, never by default initialization of results.
enum class ClassDecision { ClassA, ClassB, Unlabeled };

inline ClassDecision to_decision(ClassId c) {
  return c == ClassId::A ? ClassDecision::ClassA : ClassDecision::ClassB;
}

std::string_view class_long_label(Task t, ClassId c);   // "Consonant", "Stressed", ...
std::string_view class_short_label(Task t, ClassId c);  // "C", "V", "1", "0"
std::optional<ClassId> class_from_string(Task t, std::string_view token);
std::string_view decision_name(ClassDecision d);  // "Consonant" / ... / "unlabeled"

// ---------------------------------------------------------------------------
// Posterior probability data
// ---------------------------------------------------------------------------

/// One frame of K class-conditional posterior probabilities, each in [0,1].
struct PosteriorFrame {
  std::vector<double> probs;

  friend bool operator==(const PosteriorFrame&, const PosteriorFrame&) = default;
};

/// An utterance: N frames sharing one K, with optional class names and
/// frame rate metadata. Immutable by convention after construction.
struct PosteriorSequence {
  std::vector<PosteriorFrame> frames;
  std::vector<std::string> class_names;  // empty, or exactly K names
  std::optional<double> frame_rate_hz;

  std::size_t num_frames() const { return frames.size(); }

  /// The sequence-wide K: class_names.size() when names are present,
  /// otherwise the width of the first frame.
  std::size_t k() const {
    if (!class_names.empty()) return class_names.size();
    return frames.empty() ? 0 : frames.front().probs.size();
  }

  friend bool operator==(const PosteriorSequence&, const PosteriorSequence&) = default;
};

/// A broken invariant found by validate_sequence. `frame` and `class_index`
/// are set when the violation is localized to a frame / a class dimension.
struct Violation {
  std::optional<std::size_t> frame;
  std::optional<std::size_t> class_index;
  std::string rule;

  std::string to_string() const;
};

/// Checks every type invariant of a sequence. Returns an empty list iff the
/// sequence is valid; reports instead of throwing.
std::vector<Violation> validate_sequence(const PosteriorSequence& seq);

/// Throws Error with the first violation's message when the sequence is invalid.
void require_valid(const PosteriorSequence& seq);

// ---------------------------------------------------------------------------
// Binary patterns
// ---------------------------------------------------------------------------

/// Fixed-width bit vector of width K*(1+context). Bit k + j*K is class k of
/// the frame j positions to the right of the anchor frame (j = 0 is the
/// anchor). Stored as 64-bit words, bit i at word i/64, bit i%64; trailing
/// bits of the last word are always zero.
class BinaryPattern {
 public:
  BinaryPattern() = default;
  explicit BinaryPattern(std::size_t width, std::size_t context = 0);

  /// Builds a pattern from a string of '0'/'1' characters; the leftmost
  /// character is bit index 0.
  static BinaryPattern from_bits(std::string_view bits, std::size_t context = 0);

  std::size_t width() const { return width_; }
  std::size_t context() const { return context_; }
  /// K, the per-frame width: width / (1 + context).
  std::size_t base_width() const { return width_ / (context_ + 1); }

  bool test(std::size_t i) const;
  void set(std::size_t i, bool value = true);
  std::size_t popcount() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::string to_bitstring() const;

  /// Equality is over width and bits; the context annotation is metadata
  /// and is checked at module boundaries instead.
  friend bool operator==(const BinaryPattern& a, const BinaryPattern& b) {
    return a.width_ == b.width_ && a.words_ == b.words_;
  }

  struct Hash {
    std::size_t operator()(const BinaryPattern& p) const;
  };

 private:
  std::size_t width_ = 0;
  std::size_t context_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Lexicographic order of the bitstrings (bit 0 first, '0' < '1').
/// Patterns of smaller width sort first.
bool bitstring_less(const BinaryPattern& a, const BinaryPattern& b);

// ---------------------------------------------------------------------------
// Segment annotations
// ---------------------------------------------------------------------------

/// A frame range [start, end) with per-task class labels. Labels attach to
/// segments; frame labels are derived by containment.
struct SegmentAnnotation {
  std::int64_t start = 0;  // inclusive
  std::int64_t end = 0;    // exclusive
  std::map<Task, ClassId> labels;

  bool has_label(Task t) const { return labels.count(t) != 0; }
  ClassId label(Task t) const;
  std::int64_t num_frames() const { return end - start; }

  friend bool operator==(const SegmentAnnotation&, const SegmentAnnotation&) = default;
};

/// Validates ranges (0 <= start < end <= N) and per-task non-overlap.
/// Pass n_frames = nullopt to skip the upper bound check.
std::vector<std::string> validate_annotations(std::span<const SegmentAnnotation> annotations,
                                              std::optional<std::size_t> n_frames);

void require_valid(std::span<const SegmentAnnotation> annotations,
                   std::optional<std::size_t> n_frames);

}  // namespace phonoparse
