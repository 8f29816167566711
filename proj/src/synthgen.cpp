#include "phonoparse/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

#include "phonoparse/quantize.hpp"
#include "phonoparse/rng.hpp"

namespace phonoparse {

std::string_view template_overlap_name(TemplateOverlap o) {
  return o == TemplateOverlap::Disjoint ? "disjoint" : "shared";
}

std::optional<TemplateOverlap> template_overlap_from_string(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "disjoint") return TemplateOverlap::Disjoint;
  if (n == "shared") return TemplateOverlap::Shared;
  return std::nullopt;
}

std::string_view task_link_name(TaskLink l) {
  switch (l) {
    case TaskLink::None: return "none";
    case TaskLink::AccentEqualsStress: return "accent-equals-stress";
    case TaskLink::AccentComplementsStress: return "accent-complements-stress";
  }
  throw Error("invalid task link value");
}

std::optional<TaskLink> task_link_from_string(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "none") return TaskLink::None;
  if (n == "accent-equals-stress") return TaskLink::AccentEqualsStress;
  if (n == "accent-complements-stress") return TaskLink::AccentComplementsStress;
  return std::nullopt;
}

void require_valid(const SynthConfig& cfg) {
  if (cfg.k < 1) throw Error("synth config: k must be >= 1");
  const std::size_t pool = cfg.pool_size();
  for (const Task t : kAllTasks) {
    const auto& counts = cfg.templates_per_class[task_index(t)];
    if (counts[0] == 0 || counts[1] == 0) {
      throw Error("synth config: zero templates for a class of task " +
                  std::string(task_name(t)));
    }
    if (counts[0] + counts[1] != pool) {
      throw Error("synth config: per-task template counts must sum to the same pool size");
    }
  }
  if (!(cfg.noise_flip_prob >= 0.0 && cfg.noise_flip_prob < 0.5)) {
    throw Error("synth config: noise_flip_prob must lie in [0, 0.5)");
  }
  if (!(cfg.softness >= 0.0 && cfg.softness < 0.5)) {
    throw Error("synth config: softness must lie in [0, 0.5)");
  }
  if (cfg.segments < 1) throw Error("synth config: segments must be >= 1");
  if (cfg.frames_per_segment_min < 1 ||
      cfg.frames_per_segment_min > cfg.frames_per_segment_max) {
    throw Error("synth config: frames_per_segment bounds must satisfy 1 <= min <= max");
  }
  if (cfg.k < 63 && pool > (std::size_t{1} << cfg.k) - 1) {
    throw Error("synth config: pool of " + std::to_string(pool) +
                " distinct nonzero patterns does not fit in 2^k - 1");
  }
  if (cfg.link == TaskLink::AccentEqualsStress) {
    if (cfg.templates_per_class[task_index(Task::Accent)] !=
        cfg.templates_per_class[task_index(Task::Stress)]) {
      throw Error("synth config: accent-equals-stress needs matching class counts");
    }
  } else if (cfg.link == TaskLink::AccentComplementsStress) {
    const auto& acc = cfg.templates_per_class[task_index(Task::Accent)];
    const auto& str = cfg.templates_per_class[task_index(Task::Stress)];
    if (acc[0] != str[1] || acc[1] != str[0]) {
      throw Error("synth config: accent-complements-stress needs swapped class counts");
    }
  }
}

namespace {

// Stream ids for the independent RNG streams derived from the master seed.
constexpr std::uint64_t kPoolStream = 1;
constexpr std::uint64_t kShareStream = 2;
constexpr std::uint64_t kTaskStreamBase = 3;    // 3, 4, 5
constexpr std::uint64_t kSegmentStreamBase = 100;

BinaryPattern random_nonzero_pattern(rng::Stream& stream, std::size_t k) {
  while (true) {
    BinaryPattern p(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (stream.bernoulli(0.5)) p.set(i);
    }
    if (p.popcount() > 0) return p;
  }
}

std::vector<BinaryPattern> draw_distinct_pool(rng::Stream& stream, std::size_t k,
                                              std::size_t pool) {
  std::unordered_set<BinaryPattern, BinaryPattern::Hash> seen;
  std::vector<BinaryPattern> out;
  out.reserve(pool);
  while (out.size() < pool) {
    BinaryPattern p = random_nonzero_pattern(stream, k);
    if (seen.insert(p).second) out.push_back(std::move(p));
  }
  return out;
}

/// Random subset assignment with exact class counts: shuffle slot indices,
/// first `count_a` become class A.
std::vector<ClassId> assign_classes(rng::Stream& stream, std::size_t pool, std::size_t count_a) {
  std::vector<std::size_t> order(pool);
  for (std::size_t i = 0; i < pool; ++i) order[i] = i;
  for (std::size_t i = pool; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(stream.below(i));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<ClassId> labels(pool, ClassId::B);
  for (std::size_t i = 0; i < count_a; ++i) labels[order[i]] = ClassId::A;
  return labels;
}

}  // namespace

SynthCorpus generate(const SynthConfig& cfg) {
  require_valid(cfg);
  const std::size_t pool_size = cfg.pool_size();

  rng::Stream pool_stream(cfg.seed, kPoolStream);
  std::vector<BinaryPattern> values = draw_distinct_pool(pool_stream, cfg.k, pool_size);

  if (cfg.overlap == TemplateOverlap::Shared) {
    // Duplicate some slot values so identical patterns occur in both classes.
    rng::Stream share(cfg.seed, kShareStream);
    for (std::size_t i = 0; i < pool_size; ++i) {
      if (!share.bernoulli(0.25)) continue;
      const std::size_t j = static_cast<std::size_t>(share.below(pool_size));
      if (j != i) values[i] = values[j];
    }
  }

  SynthCorpus corpus;
  corpus.truth.pool.resize(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    corpus.truth.pool[i].pattern = values[i];
  }
  for (const Task t : kAllTasks) {
    const std::size_t ti = task_index(t);
    std::vector<ClassId> labels;
    if (t == Task::Accent && cfg.link == TaskLink::AccentEqualsStress) {
      for (const auto& slot : corpus.truth.pool) {
        labels.push_back(slot.labels[task_index(Task::Stress)]);
      }
    } else if (t == Task::Accent && cfg.link == TaskLink::AccentComplementsStress) {
      for (const auto& slot : corpus.truth.pool) {
        labels.push_back(other_class(slot.labels[task_index(Task::Stress)]));
      }
    } else {
      rng::Stream task_stream(cfg.seed, kTaskStreamBase + ti);
      labels = assign_classes(task_stream, pool_size, cfg.templates_per_class[ti][0]);
    }
    for (std::size_t i = 0; i < pool_size; ++i) {
      corpus.truth.pool[i].labels[ti] = labels[i];
    }
  }

  // Cells: slots sharing a label triple, in slot order. A segment cycles
  // through its anchor's cell so frame sequences are triple-specific.
  std::map<std::array<ClassId, kNumTasks>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < pool_size; ++i) {
    cells[corpus.truth.pool[i].labels].push_back(i);
  }

  std::int64_t cursor = 0;
  for (std::size_t s = 0; s < cfg.segments; ++s) {
    rng::Stream seg_stream(cfg.seed, kSegmentStreamBase + s);
    const std::size_t anchor = static_cast<std::size_t>(seg_stream.below(pool_size));
    const auto& slot = corpus.truth.pool[anchor];
    const auto& cell = cells[slot.labels];
    const std::size_t anchor_pos = static_cast<std::size_t>(
        std::find(cell.begin(), cell.end(), anchor) - cell.begin());
    const std::size_t length = static_cast<std::size_t>(
        seg_stream.between(cfg.frames_per_segment_min, cfg.frames_per_segment_max));

    SegmentAnnotation ann;
    ann.start = cursor;
    ann.end = cursor + static_cast<std::int64_t>(length);
    for (const Task t : kAllTasks) ann.labels[t] = slot.labels[task_index(t)];
    corpus.annotations.push_back(ann);
    cursor = ann.end;

    for (std::size_t f = 0; f < length; ++f) {
      const std::size_t emit = cell[(anchor_pos + f) % cell.size()];
      corpus.truth.frame_slots.push_back(static_cast<std::uint32_t>(emit));
      const BinaryPattern& bits = corpus.truth.pool[emit].pattern;
      PosteriorFrame frame;
      frame.probs.reserve(cfg.k);
      for (std::size_t bit = 0; bit < cfg.k; ++bit) {
        bool value = bits.test(bit);
        if (cfg.noise_flip_prob > 0.0 && seg_stream.bernoulli(cfg.noise_flip_prob)) {
          value = !value;
        }
        if (value) {
          frame.probs.push_back(1.0 - cfg.softness * seg_stream.unit());
        } else {
          frame.probs.push_back(cfg.softness * seg_stream.unit());
        }
      }
      corpus.sequence.frames.push_back(std::move(frame));
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Naive reference pipeline
// ---------------------------------------------------------------------------

namespace {

std::string naive_binarize(const PosteriorFrame& frame, double threshold) {
  std::string bits;
  for (const double v : frame.probs) {
    if (!(v >= 0.0) || !(v <= 1.0)) throw Error("oracle: posterior out of [0,1]");
    bits.push_back(v >= threshold ? '1' : '0');
  }
  return bits;
}

double naive_score(const Metric& metric, const std::string& p, const std::string& q) {
  if (p.size() != q.size()) throw Error("oracle: width mismatch");
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::uint64_t d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pi = p[i] == '1';
    const bool qi = q[i] == '1';
    if (pi && qi) {
      ++a;
    } else if (!pi && qi) {
      ++b;
    } else if (pi && !qi) {
      ++c;
    } else {
      ++d;
    }
  }
  switch (metric.kind) {
    case MetricKind::Jaccard:
      return a + b + c == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(a + b + c);
    case MetricKind::InnerProduct:
      return static_cast<double>(a + d);
    case MetricKind::Hamming:
      return static_cast<double>(b + c);
    case MetricKind::Ample: {
      const std::uint64_t num = a * (c + d);
      const std::uint64_t denom = c * (a + b);
      if (denom == 0) return num > 0 ? std::numeric_limits<double>::infinity() : 0.0;
      return static_cast<double>(num) / static_cast<double>(denom);
    }
    case MetricKind::Simpson: {
      const std::uint64_t denom = std::min(a + b, a + c);
      return denom == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(denom);
    }
    case MetricKind::Hellinger: {
      const std::uint64_t prod = (a + b) * (a + c);
      if (prod == 0) return 2.0;
      const double radicand = 1.0 - static_cast<double>(a) / std::sqrt(static_cast<double>(prod));
      return 2.0 * std::sqrt(std::max(radicand, 0.0));
    }
  }
  throw Error("oracle: invalid metric kind");
}

double naive_match(const std::string& pattern, const std::vector<std::string>& members,
                   const Metric& metric) {
  if (members.empty()) throw Error("oracle: empty codebook");
  double best = naive_score(metric, pattern, members.front());
  for (std::size_t i = 1; i < members.size(); ++i) {
    const double s = naive_score(metric, pattern, members[i]);
    const bool wins = metric.polarity == Polarity::Maximize ? s > best : s < best;
    if (wins) best = s;
  }
  return best;
}

}  // namespace

std::vector<SegmentResult> oracle_parse(const PosteriorSequence& seq,
                                        std::span<const SegmentAnnotation> annotations,
                                        const CodebookPair& books, const ParseConfig& cfg) {
  require_valid(seq);
  require_valid(annotations, seq.num_frames());

  // Codebook members as sorted bitstrings, scanned exhaustively.
  std::vector<std::string> members_a;
  for (const auto& [p, n] : books.class_a.sorted_entries()) {
    (void)n;
    members_a.push_back(p.to_bitstring());
  }
  std::vector<std::string> members_b;
  for (const auto& [p, n] : books.class_b.sorted_entries()) {
    (void)n;
    members_b.push_back(p.to_bitstring());
  }

  std::vector<std::string> base;
  base.reserve(seq.num_frames());
  for (const auto& frame : seq.frames) {
    base.push_back(naive_binarize(frame, cfg.quantize.threshold));
  }

  const std::size_t n = base.size();
  const std::size_t context = cfg.quantize.context;
  std::vector<std::optional<std::string>> windows(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + context >= n && cfg.quantize.boundary_policy == BoundaryPolicy::Skip &&
        context > 0) {
      continue;
    }
    std::string w;
    for (std::size_t j = 0; j <= context; ++j) {
      const std::size_t src = std::min(i + j, n - 1);
      w += base[src];
    }
    windows[i] = std::move(w);
  }

  std::vector<SegmentResult> results;
  for (const auto& seg : annotations) {
    SegmentResult result;
    result.segment = seg;
    for (std::int64_t f = seg.start; f < seg.end; ++f) {
      const auto& w = windows[static_cast<std::size_t>(f)];
      if (!w) continue;
      const double sa = naive_match(*w, members_a, cfg.metric);
      const double sb = naive_match(*w, members_b, cfg.metric);
      if (sa == sb) {
        ++result.votes_unlabeled;
      } else {
        const bool a_wins = cfg.metric.polarity == Polarity::Maximize ? sa > sb : sa < sb;
        if (a_wins) {
          ++result.votes_a;
        } else {
          ++result.votes_b;
        }
      }
    }
    if (result.votes_a > result.votes_b) {
      result.decision = ClassDecision::ClassA;
    } else if (result.votes_b > result.votes_a) {
      result.decision = ClassDecision::ClassB;
    } else {
      result.decision = ClassDecision::Unlabeled;
    }
    results.push_back(result);
  }
  return results;
}

}  // namespace phonoparse
