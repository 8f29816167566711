#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "phonoparse/types.hpp"

namespace phonoparse {

/// Operational taxonomic units of a pattern pair (p, q):
///   a — positions where both are 1 (positive match)
///   b — positions where (p, q) = (0, 1)
///   c — positions where (p, q) = (1, 0)
///   d — positions where both are 0 (negative match)
/// Always a + b + c + d = width.
struct TaxonomicUnits {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::uint64_t d = 0;

  std::uint64_t width() const { return a + b + c + d; }

  friend bool operator==(const TaxonomicUnits&, const TaxonomicUnits&) = default;
};

/// Counts the taxonomic units via word-wise AND/XOR and popcounts.
/// Throws on width mismatch.
TaxonomicUnits taxonomic_units(const BinaryPattern& p, const BinaryPattern& q);

enum class MetricKind { Jaccard, InnerProduct, Hamming, Ample, Simpson, Hellinger };

inline constexpr MetricKind kAllMetricKinds[] = {
    MetricKind::Jaccard, MetricKind::InnerProduct, MetricKind::Hamming,
    MetricKind::Ample,   MetricKind::Simpson,      MetricKind::Hellinger,
};

/// Whether a larger or a smaller score means a better match.
enum class Polarity { Maximize, Minimize };

std::string_view metric_kind_name(MetricKind kind);
std::optional<MetricKind> metric_kind_from_string(std::string_view name);

/// Hellinger is 0 at a perfect match, so it minimizes by default;
/// all other measures maximize as written.
Polarity default_polarity(MetricKind kind);

/// A similarity measure plus its decision polarity.
struct Metric {
  MetricKind kind = MetricKind::InnerProduct;
  Polarity polarity = Polarity::Maximize;

  static Metric of(MetricKind kind) { return {kind, default_polarity(kind)}; }

  /// Parses "name" or "name:max" / "name:min", case-insensitive.
  static Metric parse(std::string_view text);

  std::string to_string() const;  // canonical "name:max" / "name:min"

  friend bool operator==(const Metric&, const Metric&) = default;
};

/// Evaluates one measure from the four counts. Total and deterministic:
///   jaccard      a / (a+b+c); 0 when a+b+c = 0
///   innerproduct a + d (exact integer)
///   hamming      b + c (exact integer)
///   ample        a(c+d) / (c(a+b)); +inf when the denominator is 0 and the
///                numerator positive, 0 when both are 0
///   simpson      a / min(a+b, a+c); 0 when min(a+b, a+c) = 0
///   hellinger    2*sqrt(1 - a / sqrt((a+b)(a+c))); 2 when (a+b)(a+c) = 0
double score(MetricKind kind, const TaxonomicUnits& units);

double score(const Metric& metric, const BinaryPattern& p, const BinaryPattern& q);

enum class Preference { First, Second, Tie };

/// Compares two scores of the same metric under its polarity.
Preference better(const Metric& metric, double s1, double s2);

}  // namespace phonoparse
