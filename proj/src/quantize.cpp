#include "phonoparse/quantize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace phonoparse {

std::string_view boundary_policy_name(BoundaryPolicy p) {
  return p == BoundaryPolicy::Clamp ? "clamp" : "skip";
}

std::optional<BoundaryPolicy> boundary_policy_from_string(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "clamp") return BoundaryPolicy::Clamp;
  if (n == "skip") return BoundaryPolicy::Skip;
  return std::nullopt;
}

void require_valid(const QuantizeConfig& cfg) {
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0) || !std::isfinite(cfg.threshold)) {
    throw Error("quantize threshold must lie strictly inside (0, 1)");
  }
}

BinaryPattern binarize_frame(const PosteriorFrame& frame, const QuantizeConfig& cfg) {
  require_valid(cfg);
  if (frame.probs.empty()) throw Error("cannot binarize an empty frame");
  for (std::size_t k = 0; k < frame.probs.size(); ++k) {
    const double v = frame.probs[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error("invalid frame: posterior out of [0,1] at class " + std::to_string(k));
    }
  }
  BinaryPattern p(frame.probs.size(), 0);
  for (std::size_t k = 0; k < frame.probs.size(); ++k) {
    if (frame.probs[k] >= cfg.threshold) p.set(k);
  }
  return p;
}

std::vector<BinaryPattern> binarize_sequence(const PosteriorSequence& seq,
                                             const QuantizeConfig& cfg) {
  require_valid(cfg);
  require_valid(seq);
  std::vector<BinaryPattern> out;
  out.reserve(seq.frames.size());
  for (const auto& frame : seq.frames) out.push_back(binarize_frame(frame, cfg));
  return out;
}

namespace {

void require_context0_inputs(std::span<const BinaryPattern> patterns) {
  if (patterns.empty()) throw Error("context concatenation requires at least one pattern");
  const std::size_t k = patterns.front().width();
  for (const auto& p : patterns) {
    if (p.context() != 0) throw Error("context concatenation requires context-0 inputs");
    if (p.width() != k) throw Error("context concatenation requires equal-width inputs");
  }
}

BinaryPattern concat_window(std::span<const BinaryPattern> patterns, std::size_t index,
                            std::size_t context, BoundaryPolicy policy) {
  const std::size_t k = patterns.front().width();
  BinaryPattern out(k * (context + 1), context);
  for (std::size_t j = 0; j <= context; ++j) {
    std::size_t src = index + j;
    if (src >= patterns.size()) {
      // Only reachable under Clamp; Skip anchors were filtered out already.
      (void)policy;
      src = patterns.size() - 1;
    }
    const auto& block = patterns[src];
    for (std::size_t bit = 0; bit < k; ++bit) {
      if (block.test(bit)) out.set(j * k + bit);
    }
  }
  return out;
}

}  // namespace

std::optional<BinaryPattern> concat_context(std::span<const BinaryPattern> patterns,
                                            std::size_t index, const QuantizeConfig& cfg) {
  require_context0_inputs(patterns);
  if (index >= patterns.size()) throw Error("anchor index out of range");
  if (cfg.context == 0) return patterns[index];
  if (index + cfg.context >= patterns.size() && cfg.boundary_policy == BoundaryPolicy::Skip) {
    return std::nullopt;
  }
  return concat_window(patterns, index, cfg.context, cfg.boundary_policy);
}

std::vector<std::optional<BinaryPattern>> apply_context(std::span<const BinaryPattern> patterns,
                                                        const QuantizeConfig& cfg) {
  require_context0_inputs(patterns);
  std::vector<std::optional<BinaryPattern>> out;
  out.reserve(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    out.push_back(concat_context(patterns, i, cfg));
  }
  return out;
}

std::vector<std::optional<BinaryPattern>> quantize_sequence(const PosteriorSequence& seq,
                                                            const QuantizeConfig& cfg) {
  return apply_context(binarize_sequence(seq, cfg), cfg);
}

}  // namespace phonoparse
