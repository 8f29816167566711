#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "phonoparse/types.hpp"

namespace phonoparse {

/// What to do with anchors whose right-context window runs past the end of
/// the utterance: repeat the final pattern (Clamp) or drop the anchor (Skip).
enum class BoundaryPolicy { Clamp, Skip };

std::string_view boundary_policy_name(BoundaryPolicy p);
std::optional<BoundaryPolicy> boundary_policy_from_string(std::string_view name);

struct QuantizeConfig {
  double threshold = 0.5;  // strictly inside (0, 1)
  std::size_t context = 0;
  BoundaryPolicy boundary_policy = BoundaryPolicy::Clamp;
};

void require_valid(const QuantizeConfig& cfg);

/// Bit k = 1 iff probs[k] >= threshold. A value exactly at the threshold
/// maps to 1, so the rule is total. The result has context 0.
BinaryPattern binarize_frame(const PosteriorFrame& frame, const QuantizeConfig& cfg);

/// Element-wise binarize_frame over a validated sequence.
std::vector<BinaryPattern> binarize_sequence(const PosteriorSequence& seq,
                                             const QuantizeConfig& cfg);

/// Concatenates the anchor at `index` with its cfg.context right neighbors:
/// the anchor occupies bits [0, K), the j-th right neighbor [jK, (j+1)K).
/// Inputs must be context-0 patterns of equal width. When the window runs
/// past the end, Clamp repeats the final pattern and Skip returns nullopt.
std::optional<BinaryPattern> concat_context(std::span<const BinaryPattern> patterns,
                                            std::size_t index, const QuantizeConfig& cfg);

/// concat_context for every anchor; output is aligned 1:1 with the input.
std::vector<std::optional<BinaryPattern>> apply_context(std::span<const BinaryPattern> patterns,
                                                        const QuantizeConfig& cfg);

/// Full front end: binarize, then apply the context window per anchor.
std::vector<std::optional<BinaryPattern>> quantize_sequence(const PosteriorSequence& seq,
                                                            const QuantizeConfig& cfg);

}  // namespace phonoparse
