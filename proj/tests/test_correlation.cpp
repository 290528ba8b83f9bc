#include "ghostfringe/correlation.hpp"
#include "ghostfringe/errors.hpp"
#include "ghostfringe/speckle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace ghostfringe;

namespace {

AccumulatorConfig config(std::size_t pixels, std::size_t probe = 0, bool fields = false,
                         std::size_t stride = 0) {
  AccumulatorConfig c;
  for (std::size_t i = 0; i < pixels; ++i)
    c.positions.push_back(1e-4 * (static_cast<double>(i) - static_cast<double>(pixels / 2)));
  c.probe_pixel = probe;
  c.field_diagnostics = fields;
  c.matrix_stride = stride;
  return c;
}

// Fully developed speckle: circular Gaussian fields with unit mean intensity.
struct SpeckleSource {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, std::sqrt(0.5)};
  explicit SpeckleSource(std::uint64_t seed) : rng(seed) {}
  Complex field() { return {normal(rng), normal(rng)}; }
};

FrameRecord independent_frame(SpeckleSource &src, std::size_t pixels, bool fields = false) {
  FrameRecord f;
  for (std::size_t i = 0; i < pixels; ++i) {
    const Complex e1 = src.field(), e2 = src.field();
    f.intensity1.push_back(std::norm(e1));
    f.intensity2.push_back(std::norm(e2));
    if (fields) {
      f.field1.push_back(e1);
      f.field2.push_back(e2);
    }
  }
  return f;
}

FrameRecord identical_frame(SpeckleSource &src, std::size_t pixels, bool fields = false) {
  FrameRecord f;
  for (std::size_t i = 0; i < pixels; ++i) {
    const Complex e = src.field();
    f.intensity1.push_back(std::norm(e));
    f.intensity2.push_back(std::norm(e));
    if (fields) {
      f.field1.push_back(e);
      f.field2.push_back(e);
    }
  }
  return f;
}

double max_rel_diff(const std::vector<double> &a, const std::vector<double> &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]) / std::max(std::abs(a[i]), 1e-300));
  return m;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

} // namespace

TEST_CASE("update sums") {
  CorrelationAccumulator acc(config(4));
  FrameRecord ones{std::vector<double>(4, 1.0), std::vector<double>(4, 1.0), {}, {}};
  for (int i = 0; i < 3; ++i) {
    const auto before = acc.frame_count();
    acc.update(ones);
    CHECK(acc.frame_count() == before + 1);
  }
  for (Arm a : {Arm::one, Arm::two})
    for (double s : acc.sum_intensity(a))
      CHECK(s == 3.0);

  CorrelationAccumulator two(config(4));
  FrameRecord fa{{0.5, 1.5, 2.0, 0.25}, {1, 2, 3, 4}, {}, {}};
  FrameRecord fb{{0.25, 0.5, 1.0, 4.0}, {4, 3, 2, 1}, {}, {}};
  two.update(fa);
  two.update(fb);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(two.sum_intensity(Arm::one)[i] == fa.intensity1[i] + fb.intensity1[i]);
    CHECK(two.sum_intensity(Arm::two)[i] == fa.intensity2[i] + fb.intensity2[i]);
  }
  FrameRecord wrong{std::vector<double>(3, 1.0), std::vector<double>(3, 1.0), {}, {}};
  CHECK_THROWS_AS(acc.update(wrong), GridMismatch);
}

TEST_CASE("independent exponential streams give g2 = 1") {
  const std::size_t pixels = 6;
  CorrelationAccumulator acc(config(pixels, 2));
  SpeckleSource src(17);
  for (int f = 0; f < 100000; ++f)
    acc.update(independent_frame(src, pixels));
  for (Arm scan : {Arm::one, Arm::two}) {
    const auto s = g2_slice(acc, scan);
    for (std::size_t i = 0; i < pixels; ++i) {
      REQUIRE(s.defined[i]);
      CHECK(s.g2[i] == doctest::Approx(1.0).epsilon(0.02));
      // var(AB) = 3, var(A) = var(B) = 1, cov(AB, A) = 1: delta-method variance 1.
      CHECK(s.standard_error[i] == doctest::Approx(std::sqrt(1.0 / 100000)).epsilon(0.1));
    }
  }
}

TEST_CASE("identical streams give g2(x, x) = 2") {
  const std::size_t pixels = 5;
  CorrelationAccumulator acc(config(pixels, 3));
  SpeckleSource src(23);
  for (int f = 0; f < 100000; ++f)
    acc.update(identical_frame(src, pixels));
  const auto s = g2_slice(acc, Arm::two);
  CHECK(s.g2[3] == doctest::Approx(2.0).epsilon(0.015));
  CHECK(s.g2[0] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("merge") {
  const std::size_t pixels = 8;
  SpeckleSource src(31);
  std::vector<FrameRecord> frames;
  for (int f = 0; f < 100; ++f)
    frames.push_back(identical_frame(src, pixels, true));
  const auto cfg = config(pixels, 1, true, 2);

  CorrelationAccumulator seq(cfg), a(cfg), b(cfg);
  for (int f = 0; f < 100; ++f) {
    seq.update(frames[f]);
    (f < 50 ? a : b).update(frames[f]);
  }
  const CorrelationAccumulator empty(cfg);
  const auto ae = merge(a, empty);
  CHECK(ae.frame_count() == a.frame_count());
  CHECK(ae.cross(Arm::two).product == a.cross(Arm::two).product);
  CHECK(ae.field_sums().re == a.field_sums().re);

  const auto ab = merge(a, b), ba = merge(b, a);
  CHECK(ab.frame_count() == 100);
  for (Arm scan : {Arm::one, Arm::two}) {
    CHECK(max_rel_diff(g2_slice(ab, scan).g2, g2_slice(ba, scan).g2) <= 1e-10);
    CHECK(max_rel_diff(g2_slice(ab, scan).g2, g2_slice(seq, scan).g2) <= 1e-10);
    CHECK(max_rel_diff(g2_slice(ab, scan).standard_error, g2_slice(seq, scan).standard_error) <= 1e-10);
  }
  CHECK(max_rel_diff(g2_matrix(ab).g2, g2_matrix(seq).g2) <= 1e-10);

  CHECK_THROWS_AS(merge(a, CorrelationAccumulator(config(pixels, 2, true, 2))), GridMismatch);
}

TEST_CASE("scale invariance of g2") {
  const std::size_t pixels = 6;
  SpeckleSource src(41);
  CorrelationAccumulator plain(config(pixels, 0)), scaled(config(pixels, 0));
  for (int f = 0; f < 500; ++f) {
    auto fr = identical_frame(src, pixels);
    plain.update(fr);
    for (auto &v : fr.intensity1)
      v *= 37.5;
    for (auto &v : fr.intensity2)
      v *= 37.5;
    scaled.update(fr);
  }
  for (Arm scan : {Arm::one, Arm::two})
    CHECK(max_rel_diff(g2_slice(plain, scan).g2, g2_slice(scaled, scan).g2) <= 1e-12);
}

TEST_CASE("standard errors shrink as 1/sqrt(frames)") {
  const std::size_t pixels = 64;
  SpeckleSource src(43);
  CorrelationAccumulator acc(config(pixels, 0));
  std::vector<double> at_half;
  for (int f = 0; f < 8000; ++f) {
    acc.update(independent_frame(src, pixels));
    if (f == 3999)
      at_half = g2_slice(acc, Arm::two).standard_error;
  }
  const double ratio = median(at_half) / median(g2_slice(acc, Arm::two).standard_error);
  CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
}

TEST_CASE("undefined pixels are flagged, not dropped") {
  SUBCASE("too few frames") {
    CorrelationAccumulator acc(config(4));
    SpeckleSource src(1);
    acc.update(independent_frame(src, 4));
    const auto s = g2_slice(acc, Arm::two);
    CHECK(s.size() == 4);
    CHECK(std::none_of(s.defined.begin(), s.defined.end(), [](auto d) { return d; }));
  }
  SUBCASE("dark probe") {
    CorrelationAccumulator acc(config(4, 0));
    SpeckleSource src(2);
    for (int f = 0; f < 10; ++f) {
      auto fr = independent_frame(src, 4);
      fr.intensity1[0] = 0.0;
      acc.update(fr);
    }
    const auto s = g2_slice(acc, Arm::two);
    CHECK(std::none_of(s.defined.begin(), s.defined.end(), [](auto d) { return d; }));
    CHECK(std::isnan(s.g2[1]));
  }
  SUBCASE("dark scan pixel") {
    CorrelationAccumulator acc(config(4, 0));
    SpeckleSource src(3);
    for (int f = 0; f < 10; ++f) {
      auto fr = independent_frame(src, 4);
      fr.intensity2[2] = 0.0;
      acc.update(fr);
    }
    const auto s = g2_slice(acc, Arm::two);
    CHECK_FALSE(s.defined[2]);
    CHECK(s.defined[1]);
  }
}

TEST_CASE("Siegert check on synthetic fields") {
  const std::size_t pixels = 7;
  SUBCASE("identical arms: coherence term equals g2 - 1") {
    CorrelationAccumulator acc(config(pixels, 3, true));
    SpeckleSource src(51);
    for (int f = 0; f < 20000; ++f)
      acc.update(identical_frame(src, pixels, true));
    const auto r = siegert_check(acc);
    CHECK(r.coherence_sq[3] == doctest::Approx(1.0).epsilon(0.03));
    CHECK(r.g2_minus_one[3] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r.agreement_fraction(5.0, 0.0, 1.0) == 1.0);
  }
  SUBCASE("independent arms: both terms vanish") {
    CorrelationAccumulator acc(config(pixels, 3, true));
    SpeckleSource src(52);
    for (int f = 0; f < 20000; ++f)
      acc.update(independent_frame(src, pixels, true));
    const auto r = siegert_check(acc);
    for (std::size_t i = 0; i < pixels; ++i) {
      CHECK(std::abs(r.g2_minus_one[i]) < 5 * r.g2_stderr[i]);
      CHECK(r.coherence_sq[i] < 1e-3);
    }
  }
  SUBCASE("intensity scaling leaves g2 - 1 unchanged") {
    CorrelationAccumulator a(config(pixels, 3, true)), b(config(pixels, 3, true));
    SpeckleSource src(53);
    for (int f = 0; f < 200; ++f) {
      auto fr = identical_frame(src, pixels, true);
      a.update(fr);
      for (auto &v : fr.intensity1)
        v *= 4.0;
      for (auto &v : fr.intensity2)
        v *= 4.0;
      for (auto &e : fr.field1)
        e *= 2.0;
      for (auto &e : fr.field2)
        e *= 2.0;
      b.update(fr);
    }
    CHECK(max_rel_diff(siegert_check(a).g2_minus_one, siegert_check(b).g2_minus_one) <= 1e-12);
  }
  CHECK_THROWS_AS(siegert_check(CorrelationAccumulator(config(pixels))), InvalidArgument);
}

TEST_CASE("singles profile and decimated matrix") {
  const std::size_t pixels = 9;
  CorrelationAccumulator acc(config(pixels, 4, false, 3));
  SpeckleSource src(61);
  for (int f = 0; f < 40000; ++f)
    acc.update(identical_frame(src, pixels));
  const auto s = singles_profile(acc, Arm::one);
  for (std::size_t i = 0; i < pixels; ++i) {
    CHECK(s.mean[i] == doctest::Approx(1.0).epsilon(0.03));
    CHECK(s.standard_error[i] == doctest::Approx(1.0 / std::sqrt(40000.0)).epsilon(0.05));
  }
  const auto m = g2_matrix(acc);
  REQUIRE(m.x1.size() == 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      CHECK(m.g2[a * 3 + b] == doctest::Approx(a == b ? 2.0 : 1.0).epsilon(0.03));
}
