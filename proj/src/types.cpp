#include "phonoparse/types.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <sstream>

namespace phonoparse {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::size_t task_index(Task t) {
  return static_cast<std::size_t>(t);
}

std::string_view task_name(Task t) {
  switch (t) {
    case Task::CV: return "cv";
    case Task::Stress: return "stress";
    case Task::Accent: return "accent";
  }
  throw Error("invalid task value");
}

std::optional<Task> task_from_string(std::string_view name) {
  const std::string n = lower(name);
  if (n == "cv") return Task::CV;
  if (n == "stress") return Task::Stress;
  if (n == "accent") return Task::Accent;
  return std::nullopt;
}

std::string_view class_long_label(Task t, ClassId c) {
  switch (t) {
    case Task::CV: return c == ClassId::A ? "Consonant" : "Vowel";
    case Task::Stress: return c == ClassId::A ? "Stressed" : "Unstressed";
    case Task::Accent: return c == ClassId::A ? "Accented" : "Unaccented";
  }
  throw Error("invalid task value");
}

std::string_view class_short_label(Task t, ClassId c) {
  switch (t) {
    case Task::CV: return c == ClassId::A ? "C" : "V";
    case Task::Stress:
    case Task::Accent: return c == ClassId::A ? "1" : "0";
  }
  throw Error("invalid task value");
}

std::optional<ClassId> class_from_string(Task t, std::string_view token) {
  const std::string s = lower(token);
  switch (t) {
    case Task::CV:
      if (s == "c" || s == "consonant") return ClassId::A;
      if (s == "v" || s == "vowel") return ClassId::B;
      break;
    case Task::Stress:
      if (s == "1" || s == "stressed") return ClassId::A;
      if (s == "0" || s == "unstressed") return ClassId::B;
      break;
    case Task::Accent:
      if (s == "1" || s == "accented") return ClassId::A;
      if (s == "0" || s == "unaccented") return ClassId::B;
      break;
  }
  return std::nullopt;
}

std::string_view decision_name(ClassDecision d) {
  switch (d) {
    case ClassDecision::ClassA: return "class_a";
    case ClassDecision::ClassB: return "class_b";
    case ClassDecision::Unlabeled: return "unlabeled";
  }
  throw Error("invalid decision value");
}

// ---------------------------------------------------------------------------
// Sequence validation
// ---------------------------------------------------------------------------

std::string Violation::to_string() const {
  std::ostringstream os;
  if (frame) os << "frame " << *frame << ": ";
  if (class_index) os << "class " << *class_index << ": ";
  os << rule;
  return os.str();
}

std::vector<Violation> validate_sequence(const PosteriorSequence& seq) {
  std::vector<Violation> out;
  if (seq.frames.empty()) {
    out.push_back({std::nullopt, std::nullopt, "sequence has no frames (N >= 1 required)"});
    return out;
  }
  const std::size_t k = seq.k();
  if (k == 0) {
    out.push_back({std::nullopt, std::nullopt, "sequence has K = 0 (K >= 1 required)"});
    return out;
  }
  if (!seq.class_names.empty() && seq.class_names.size() != k) {
    out.push_back({std::nullopt, std::nullopt, "class name list length differs from K"});
  }
  if (seq.frame_rate_hz && !(*seq.frame_rate_hz > 0.0 && std::isfinite(*seq.frame_rate_hz))) {
    out.push_back({std::nullopt, std::nullopt, "frame_rate_hz must be a positive finite real"});
  }
  for (std::size_t n = 0; n < seq.frames.size(); ++n) {
    const auto& probs = seq.frames[n].probs;
    if (probs.size() != k) {
      out.push_back({n, std::nullopt, "ragged K: frame width differs from sequence K"});
      continue;
    }
    for (std::size_t c = 0; c < probs.size(); ++c) {
      const double v = probs[c];
      if (!std::isfinite(v)) {
        out.push_back({n, c, "posterior is not finite"});
      } else if (v < 0.0 || v > 1.0) {
        out.push_back({n, c, "posterior out of [0,1]"});
      }
    }
  }
  return out;
}

void require_valid(const PosteriorSequence& seq) {
  const auto violations = validate_sequence(seq);
  if (!violations.empty()) {
    throw Error("invalid posterior sequence: " + violations.front().to_string());
  }
}

// ---------------------------------------------------------------------------
// BinaryPattern
// ---------------------------------------------------------------------------

BinaryPattern::BinaryPattern(std::size_t width, std::size_t context)
    : width_(width), context_(context), words_((width + 63) / 64, 0) {
  if (width == 0) throw Error("pattern width must be positive");
  if (width % (context + 1) != 0) {
    throw Error("pattern width must be a multiple of 1 + context");
  }
}

BinaryPattern BinaryPattern::from_bits(std::string_view bits, std::size_t context) {
  BinaryPattern p(bits.size(), context);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      p.set(i);
    } else if (bits[i] != '0') {
      throw Error("bitstring may contain only '0' and '1'");
    }
  }
  return p;
}

bool BinaryPattern::test(std::size_t i) const {
  if (i >= width_) throw Error("bit index out of range");
  return (words_[i / 64] >> (i % 64)) & 1u;
}

void BinaryPattern::set(std::size_t i, bool value) {
  if (i >= width_) throw Error("bit index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (value) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

std::size_t BinaryPattern::popcount() const {
  std::size_t n = 0;
  for (const std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::string BinaryPattern::to_bitstring() const {
  std::string out(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if ((words_[i / 64] >> (i % 64)) & 1u) out[i] = '1';
  }
  return out;
}

std::size_t BinaryPattern::Hash::operator()(const BinaryPattern& p) const {
  // FNV-1a over the words plus the width.
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  mix(p.width_);
  for (const std::uint64_t w : p.words_) mix(w);
  return static_cast<std::size_t>(h);
}

bool bitstring_less(const BinaryPattern& a, const BinaryPattern& b) {
  const std::size_t common = std::min(a.width(), b.width());
  for (std::size_t i = 0; i < common; ++i) {
    const bool ba = (a.words()[i / 64] >> (i % 64)) & 1u;
    const bool bb = (b.words()[i / 64] >> (i % 64)) & 1u;
    if (ba != bb) return !ba;
  }
  return a.width() < b.width();
}

// ---------------------------------------------------------------------------
// Segment annotations
// ---------------------------------------------------------------------------

ClassId SegmentAnnotation::label(Task t) const {
  const auto it = labels.find(t);
  if (it == labels.end()) {
    throw Error(std::string("segment has no label for task ") + std::string(task_name(t)));
  }
  return it->second;
}

std::vector<std::string> validate_annotations(std::span<const SegmentAnnotation> annotations,
                                              std::optional<std::size_t> n_frames) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& a = annotations[i];
    std::ostringstream os;
    if (a.start < 0) {
      os << "segment " << i << ": negative start " << a.start;
    } else if (a.start >= a.end) {
      os << "segment " << i << ": reversed or empty range [" << a.start << ", " << a.end << ")";
    } else if (n_frames && a.end > static_cast<std::int64_t>(*n_frames)) {
      os << "segment " << i << ": end " << a.end << " exceeds N=" << *n_frames;
    }
    if (const std::string s = os.str(); !s.empty()) out.push_back(s);
  }
  // Per-task tier overlap: sort indices by start and check neighbors.
  for (const Task t : kAllTasks) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
      if (annotations[i].has_label(t) && annotations[i].start < annotations[i].end) {
        idx.push_back(i);
      }
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
      return annotations[x].start < annotations[y].start;
    });
    for (std::size_t j = 1; j < idx.size(); ++j) {
      const auto& prev = annotations[idx[j - 1]];
      const auto& cur = annotations[idx[j]];
      if (cur.start < prev.end) {
        std::ostringstream os;
        os << "task " << task_name(t) << ": segments [" << prev.start << ", " << prev.end
           << ") and [" << cur.start << ", " << cur.end << ") overlap";
        out.push_back(os.str());
      }
    }
  }
  return out;
}

void require_valid(std::span<const SegmentAnnotation> annotations,
                   std::optional<std::size_t> n_frames) {
  const auto violations = validate_annotations(annotations, n_frames);
  if (!violations.empty()) {
    throw Error("invalid annotations: " + violations.front());
  }
}

}  // namespace phonoparse
