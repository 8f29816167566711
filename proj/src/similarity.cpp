#include "phonoparse/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>

namespace phonoparse {

TaxonomicUnits taxonomic_units(const BinaryPattern& p, const BinaryPattern& q) {
  if (p.width() != q.width()) {
    throw Error("taxonomic units require equal pattern widths (" + std::to_string(p.width()) +
                " vs " + std::to_string(q.width()) + ")");
  }
  const auto pw = p.words();
  const auto qw = q.words();
  std::uint64_t a = 0;
  std::uint64_t xored = 0;
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < pw.size(); ++i) {
    a += static_cast<std::uint64_t>(std::popcount(pw[i] & qw[i]));
    xored += static_cast<std::uint64_t>(std::popcount(pw[i] ^ qw[i]));
    // ~qw[i] sets the padding bits past width, but pw keeps them zero.
    c += static_cast<std::uint64_t>(std::popcount(pw[i] & ~qw[i]));
  }
  TaxonomicUnits u;
  u.a = a;
  u.c = c;
  u.b = xored - c;
  u.d = p.width() - a - u.b - c;
  return u;
}

std::string_view metric_kind_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::Jaccard: return "jaccard";
    case MetricKind::InnerProduct: return "innerproduct";
    case MetricKind::Hamming: return "hamming";
    case MetricKind::Ample: return "ample";
    case MetricKind::Simpson: return "simpson";
    case MetricKind::Hellinger: return "hellinger";
  }
  throw Error("invalid metric kind");
}

std::optional<MetricKind> metric_kind_from_string(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const MetricKind kind : kAllMetricKinds) {
    if (n == metric_kind_name(kind)) return kind;
  }
  return std::nullopt;
}

Polarity default_polarity(MetricKind kind) {
  return kind == MetricKind::Hellinger ? Polarity::Minimize : Polarity::Maximize;
}

Metric Metric::parse(std::string_view text) {
  std::string_view name = text;
  std::optional<Polarity> polarity;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    name = text.substr(0, colon);
    std::string suffix(text.substr(colon + 1));
    std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (suffix == "max") {
      polarity = Polarity::Maximize;
    } else if (suffix == "min") {
      polarity = Polarity::Minimize;
    } else {
      throw Error("unknown metric polarity suffix ':" + suffix + "' (use :max or :min)");
    }
  }
  const auto kind = metric_kind_from_string(name);
  if (!kind) throw Error("unknown metric '" + std::string(name) + "'");
  Metric m = Metric::of(*kind);
  if (polarity) m.polarity = *polarity;
  return m;
}

std::string Metric::to_string() const {
  std::string out(metric_kind_name(kind));
  out += polarity == Polarity::Maximize ? ":max" : ":min";
  return out;
}

double score(MetricKind kind, const TaxonomicUnits& u) {
  const double a = static_cast<double>(u.a);
  switch (kind) {
    case MetricKind::Jaccard: {
      const std::uint64_t denom = u.a + u.b + u.c;
      return denom == 0 ? 0.0 : a / static_cast<double>(denom);
    }
    case MetricKind::InnerProduct:
      return static_cast<double>(u.a + u.d);
    case MetricKind::Hamming:
      return static_cast<double>(u.b + u.c);
    case MetricKind::Ample: {
      const std::uint64_t num = u.a * (u.c + u.d);
      const std::uint64_t denom = u.c * (u.a + u.b);
      if (denom == 0) {
        return num > 0 ? std::numeric_limits<double>::infinity() : 0.0;
      }
      return static_cast<double>(num) / static_cast<double>(denom);
    }
    case MetricKind::Simpson: {
      const std::uint64_t denom = std::min(u.a + u.b, u.a + u.c);
      return denom == 0 ? 0.0 : a / static_cast<double>(denom);
    }
    case MetricKind::Hellinger: {
      const std::uint64_t prod = (u.a + u.b) * (u.a + u.c);
      if (prod == 0) return 2.0;
      const double radicand = 1.0 - a / std::sqrt(static_cast<double>(prod));
      return 2.0 * std::sqrt(std::max(radicand, 0.0));
    }
  }
  throw Error("invalid metric kind");
}

double score(const Metric& metric, const BinaryPattern& p, const BinaryPattern& q) {
  return score(metric.kind, taxonomic_units(p, q));
}

Preference better(const Metric& metric, double s1, double s2) {
  if (s1 == s2) return Preference::Tie;
  const bool first_wins = metric.polarity == Polarity::Maximize ? s1 > s2 : s1 < s2;
  return first_wins ? Preference::First : Preference::Second;
}

}  // namespace phonoparse
