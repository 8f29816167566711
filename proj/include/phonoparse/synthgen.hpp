#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "phonoparse/parser.hpp"
#include "phonoparse/types.hpp"

namespace phonoparse {

/// Disjoint: the two classes of every task draw from disjoint template
/// pattern sets. Shared: some pattern values are duplicated across classes,
/// so identical patterns occur on both sides of a task.
enum class TemplateOverlap { Disjoint, Shared };

/// Optional coupling between the stress and accent label assignments,
/// used to study cross-task codebooks on data with a known relation.
enum class TaskLink { None, AccentEqualsStress, AccentComplementsStress };

std::string_view template_overlap_name(TemplateOverlap o);
std::optional<TemplateOverlap> template_overlap_from_string(std::string_view name);
std::string_view task_link_name(TaskLink l);
std::optional<TaskLink> task_link_from_string(std::string_view name);

struct SynthConfig {
  std::size_t k = 15;
  /// Template counts per [task][class]. The per-task sums must all equal the
  /// same pool size P, because one pool of P template slots carries one
  /// class assignment per task.
  std::array<std::array<std::size_t, 2>, kNumTasks> templates_per_class =
      uniform_templates(5);
  double noise_flip_prob = 0.0;  // per-bit flip probability, in [0, 0.5)
  double softness = 0.1;         // bit 1 emits U[1-softness, 1], bit 0 emits U[0, softness]
  std::size_t segments = 100;
  std::size_t frames_per_segment_min = 3;
  std::size_t frames_per_segment_max = 8;
  std::uint64_t seed = 0;
  TemplateOverlap overlap = TemplateOverlap::Disjoint;
  TaskLink link = TaskLink::None;

  static std::array<std::array<std::size_t, 2>, kNumTasks> uniform_templates(
      std::size_t per_class) {
    return {{{per_class, per_class}, {per_class, per_class}, {per_class, per_class}}};
  }

  std::size_t pool_size() const { return templates_per_class[0][0] + templates_per_class[0][1]; }
};

void require_valid(const SynthConfig& cfg);

/// One template slot: a K-bit pattern plus its class per task.
struct TemplateInfo {
  BinaryPattern pattern;
  std::array<ClassId, kNumTasks> labels{};
};

struct GroundTruth {
  std::vector<TemplateInfo> pool;
  /// Pool slot emitted by each frame, before noise and softening.
  std::vector<std::uint32_t> frame_slots;
};

struct SynthCorpus {
  PosteriorSequence sequence;
  std::vector<SegmentAnnotation> annotations;  // every segment labels all three tasks
  GroundTruth truth;
};

/// Generates a corpus as a pure function of the config. Each segment picks
/// an anchor slot uniformly from the pool; its label triple is the slot's
/// per-task classes and its frames cycle through the slot's cell (the slots
/// sharing that triple) in construction order, so right-context windows see
/// class-specific sequences. Bits are then flipped with noise_flip_prob and
/// softened into posteriors.
SynthCorpus generate(const SynthConfig& cfg);

/// Deliberately naive reimplementation of the parse_utterance pipeline
/// (character-level bit handling, per-bit counting, exhaustive scans). Used
/// by the differential tests; not a production path.
std::vector<SegmentResult> oracle_parse(const PosteriorSequence& seq,
                                        std::span<const SegmentAnnotation> annotations,
                                        const CodebookPair& books, const ParseConfig& cfg);

}  // namespace phonoparse
