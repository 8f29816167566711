#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "phonoparse/similarity.hpp"
#include "support/reference.hpp"

using namespace phonoparse;

namespace {

BinaryPattern bits(std::string_view s) { return BinaryPattern::from_bits(s); }

double ref_score(MetricKind kind, const std::string& p, const std::string& q) {
  const auto u = testref::count_units(p, q);
  switch (kind) {
    case MetricKind::Jaccard: return testref::jaccard(u);
    case MetricKind::InnerProduct: return testref::innerproduct(u);
    case MetricKind::Hamming: return testref::hamming(u);
    case MetricKind::Ample: return testref::ample(u);
    case MetricKind::Simpson: return testref::simpson(u);
    case MetricKind::Hellinger: return testref::hellinger(u);
  }
  throw std::runtime_error("bad kind");
}

}  // namespace

TEST_CASE("taxonomic units of hand-enumerated pairs") {
  CHECK(taxonomic_units(bits("110"), bits("100")) == TaxonomicUnits{1, 0, 1, 1});
  CHECK(taxonomic_units(bits("1111"), bits("1111")) == TaxonomicUnits{4, 0, 0, 0});
  CHECK(taxonomic_units(bits("000"), bits("111")) == TaxonomicUnits{0, 3, 0, 0});
  // b and c are one-sided: swapping the arguments swaps them.
  CHECK(taxonomic_units(bits("100"), bits("110")) == TaxonomicUnits{1, 1, 0, 1});
}

TEST_CASE("taxonomic units reject width mismatch") {
  CHECK_THROWS_AS(taxonomic_units(bits("10"), bits("100")), Error);
}

TEST_CASE("scores of the worked pair 110 vs 100") {
  const auto u = taxonomic_units(bits("110"), bits("100"));
  CHECK(score(MetricKind::Jaccard, u) == 0.5);
  CHECK(score(MetricKind::InnerProduct, u) == 2.0);
  CHECK(score(MetricKind::Hamming, u) == 1.0);
  CHECK(score(MetricKind::Simpson, u) == 1.0);
  CHECK(score(MetricKind::Ample, u) == 2.0);
  // 2*sqrt(1 - 1/sqrt(2))
  CHECK(score(MetricKind::Hellinger, u) ==
        doctest::Approx(1.082392200292394).epsilon(1e-12));
}

TEST_CASE("perfect match scores") {
  const auto p = bits("1011");
  const auto u = taxonomic_units(p, p);
  CHECK(score(MetricKind::InnerProduct, u) == 4.0);
  CHECK(score(MetricKind::Hamming, u) == 0.0);
  CHECK(score(MetricKind::Hellinger, u) == 0.0);
  CHECK(score(MetricKind::Jaccard, u) == 1.0);
  CHECK(score(MetricKind::Simpson, u) == 1.0);
}

TEST_CASE("division-by-zero conventions are total") {
  const auto zz = taxonomic_units(bits("000"), bits("000"));
  CHECK(score(MetricKind::Jaccard, zz) == 0.0);
  CHECK(score(MetricKind::Simpson, zz) == 0.0);
  CHECK(score(MetricKind::Ample, zz) == 0.0);
  CHECK(score(MetricKind::Hellinger, zz) == 2.0);
  CHECK(score(MetricKind::InnerProduct, zz) == 3.0);

  // Disjoint nonzero patterns: no positive overlap evidence.
  const auto disj = taxonomic_units(bits("000"), bits("111"));
  CHECK(score(MetricKind::Simpson, disj) == 0.0);
  CHECK(score(MetricKind::Ample, disj) == 0.0);
  CHECK(score(MetricKind::Hellinger, disj) == 2.0);

  // c = 0 with positive numerator: the +inf sentinel.
  const auto u = taxonomic_units(bits("10"), bits("10"));
  CHECK(score(MetricKind::Ample, u) == std::numeric_limits<double>::infinity());
  const Metric ample = Metric::of(MetricKind::Ample);
  CHECK(better(ample, score(MetricKind::Ample, u), score(MetricKind::Ample, u)) ==
        Preference::Tie);
}

TEST_CASE("better follows the polarity") {
  CHECK(better(Metric::of(MetricKind::Jaccard), 0.8, 0.5) == Preference::First);
  CHECK(better(Metric::of(MetricKind::Hellinger), 0.0, 1.0) == Preference::First);
  CHECK(better(Metric::of(MetricKind::Hamming), 1.0, 3.0) == Preference::Second);
  CHECK(better(Metric{MetricKind::Hamming, Polarity::Minimize}, 1.0, 3.0) == Preference::First);
  for (const MetricKind kind : kAllMetricKinds) {
    CHECK(better(Metric::of(kind), 0.25, 0.25) == Preference::Tie);
  }
}

TEST_CASE("metric parsing and default polarities") {
  CHECK(Metric::parse("jaccard") == Metric{MetricKind::Jaccard, Polarity::Maximize});
  CHECK(Metric::parse("HELLINGER") == Metric{MetricKind::Hellinger, Polarity::Minimize});
  CHECK(Metric::parse("hamming:min") == Metric{MetricKind::Hamming, Polarity::Minimize});
  CHECK(Metric::parse("hellinger:MAX") == Metric{MetricKind::Hellinger, Polarity::Maximize});
  CHECK(Metric::parse("innerproduct").to_string() == "innerproduct:max");
  CHECK_THROWS_AS(Metric::parse("cosine"), Error);
  CHECK_THROWS_AS(Metric::parse("jaccard:up"), Error);
  for (const MetricKind kind : kAllMetricKinds) {
    const Metric m = Metric::of(kind);
    CHECK(Metric::parse(m.to_string()) == m);
    CHECK(m.polarity == default_polarity(kind));
  }
}

TEST_CASE("conservation: a+b+c+d equals the width") {
  std::mt19937_64 rng(11);
  // Exhaustive p for widths up to 12, sampled q.
  for (std::size_t w = 1; w <= 12; ++w) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << w); ++v) {
      std::string ps(w, '0');
      for (std::size_t i = 0; i < w; ++i) {
        if ((v >> i) & 1) ps[i] = '1';
      }
      const std::string qs = testref::random_bits(rng, w);
      const auto u = taxonomic_units(bits(ps), bits(qs));
      CHECK(u.width() == w);
    }
  }
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t w = 13 + rng() % 116;
    const auto u = taxonomic_units(bits(testref::random_bits(rng, w)),
                                   bits(testref::random_bits(rng, w)));
    CHECK(u.width() == w);
  }
}

TEST_CASE("complement identity: innerproduct + hamming = width") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t w = 1 + rng() % 128;
    const auto p = bits(testref::random_bits(rng, w));
    const auto q = bits(testref::random_bits(rng, w));
    const auto u = taxonomic_units(p, q);
    CHECK(score(MetricKind::InnerProduct, u) + score(MetricKind::Hamming, u) ==
          static_cast<double>(w));
  }
}

TEST_CASE("jaccard, innerproduct and hamming are symmetric") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t w = 1 + rng() % 64;
    const auto p = bits(testref::random_bits(rng, w, 0.3));
    const auto q = bits(testref::random_bits(rng, w, 0.7));
    for (const MetricKind kind :
         {MetricKind::Jaccard, MetricKind::InnerProduct, MetricKind::Hamming}) {
      CHECK(score(kind, taxonomic_units(p, q)) == score(kind, taxonomic_units(q, p)));
    }
  }
}

TEST_CASE("word-level scores agree with the per-bit reference") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t w = 1 + rng() % 128;
    const double density = 0.1 + 0.8 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    const std::string ps = testref::random_bits(rng, w, density);
    const std::string qs = testref::random_bits(rng, w, density);
    const auto p = bits(ps);
    const auto q = bits(qs);
    for (const MetricKind kind : kAllMetricKinds) {
      const double got = score(kind, taxonomic_units(p, q));
      const double want = ref_score(kind, ps, qs);
      if (kind == MetricKind::InnerProduct || kind == MetricKind::Hamming) {
        CHECK(got == want);
      } else if (std::isinf(want)) {
        CHECK(std::isinf(got));
      } else {
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("hellinger of a nonzero pattern with itself is zero") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t w = 1 + rng() % 100;
    auto p = bits(testref::random_bits(rng, w));
    if (p.popcount() == 0) p.set(0);
    CHECK(score(MetricKind::Hellinger, taxonomic_units(p, p)) == 0.0);
  }
}
