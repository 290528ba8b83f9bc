#include "ghostfringe/analytic.hpp"
#include "ghostfringe/errors.hpp"
#include "ghostfringe/fringe_fit.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace ghostfringe;

namespace {

constexpr double lambda = 660e-9, distance = 0.806;

FringeModelParams reference() {
  return {1.0, 0.5435, lambda * distance / 670e-6, lambda * distance / 250e-6, 0.0};
}

G2Slice sample(const FringeModelParams &p, double noise = 0.0, std::uint64_t seed = 0,
               double half_width = 10e-3, double spacing = 2.5e-6) {
  G2Slice s;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  const auto count = static_cast<long>(std::round(half_width / spacing));
  for (long i = -count; i <= count; ++i) {
    const double x = static_cast<double>(i) * spacing;
    s.positions.push_back(x);
    s.g2.push_back(p(x) + (noise > 0 ? n(rng) : 0.0));
    s.standard_error.push_back(noise);
    s.defined.push_back(1);
  }
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

TEST_CASE("model shape") {
  const auto p = reference();
  CHECK(p(0.0) == doctest::Approx(1.5435));
  CHECK(p(0.5 * p.period) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p(p.envelope_zero) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.resolvable());
  CHECK_FALSE(FringeModelParams{1, 0.5, 1e-3, 0.4e-3, 0}.resolvable());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-20e-3, 20e-3);
  for (int i = 0; i < 1000; ++i)
    REQUIRE(p(ux(rng)) >= p.baseline);
}

TEST_CASE("analytic Jacobian matches central differences") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int point = 0; point < 10; ++point) {
    FringeModelParams p{0.9 + 0.2 * u(rng), 0.1 + 0.8 * u(rng), 0.5e-3 + 0.5e-3 * u(rng),
                        1.5e-3 + 1.5e-3 * u(rng), -0.2e-3 + 0.4e-3 * u(rng)};
    const double x = -3e-3 + 6e-3 * u(rng);
    Eigen::Matrix<double, 5, 1> grad;
    fringe_model(p, x, &grad);
    double *fields[5] = {&p.baseline, &p.visibility, &p.period, &p.envelope_zero, &p.center};
    const double scales[5] = {1.0, 1.0, p.period, p.envelope_zero, p.period};
    for (int j = 0; j < 5; ++j) {
      const double h = 1e-6 * scales[j];
      const double keep = *fields[j];
      *fields[j] = keep + h;
      const double up = p(x);
      *fields[j] = keep - h;
      const double down = p(x);
      *fields[j] = keep;
      const double fd = (up - down) / (2 * h);
      const double floor = 1e-9 * grad.cwiseAbs().cwiseProduct(Eigen::Map<const Eigen::Matrix<double, 5, 1>>(scales)).maxCoeff() / scales[j];
      CHECK(std::abs(grad(j) - fd) <= 1e-5 * std::max(std::abs(grad(j)), floor));
    }
  }
}

TEST_CASE("seed") {
  const auto p = reference();
  SUBCASE("exact model") {
    const auto s = seed_fit(sample(p));
    CHECK_FALSE(s.low_confidence);
    CHECK(s.params.period == doctest::Approx(p.period).epsilon(0.1));
    CHECK(s.params.envelope_zero == doctest::Approx(p.envelope_zero).epsilon(0.25));
    CHECK(s.params.visibility == doctest::Approx(p.visibility).epsilon(0.1));
    CHECK(std::abs(s.params.center) < 0.1 * p.period);
    CHECK(s.params.baseline == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("flat slice is low confidence") {
    auto flat = p;
    flat.visibility = 0.0;
    CHECK(seed_fit(sample(flat)).low_confidence);
    CHECK(seed_fit(sample(flat, 0.01, 4)).low_confidence);
  }
  SUBCASE("too short a span is low confidence") {
    CHECK(seed_fit(sample(p, 0.0, 0, 1.2e-3)).low_confidence);
  }
  SUBCASE("translation moves only the centre") {
    auto slice = sample(p, 0.01, 9);
    const auto a = seed_fit(slice);
    for (double &x : slice.positions)
      x += 1e-3;
    const auto b = seed_fit(slice);
    CHECK(b.params.center - a.params.center == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(b.params.period == doctest::Approx(a.params.period).epsilon(1e-9));
    CHECK(b.params.envelope_zero == doctest::Approx(a.params.envelope_zero).epsilon(1e-9));
    CHECK(b.params.visibility == doctest::Approx(a.params.visibility).epsilon(1e-9));
    CHECK(b.params.baseline == a.params.baseline);
  }
}

TEST_CASE("noise-free recovery") {
  auto p = reference();
  p.center = 37e-6;
  const auto slice = sample(p);
  const auto r = fit(slice, seed_fit(slice).params);
  CHECK(r.converged);
  CHECK(r.params.baseline == doctest::Approx(p.baseline).epsilon(1e-6));
  CHECK(r.params.visibility == doctest::Approx(p.visibility).epsilon(1e-6));
  CHECK(r.params.period == doctest::Approx(p.period).epsilon(1e-6));
  CHECK(r.params.envelope_zero == doctest::Approx(p.envelope_zero).epsilon(1e-6));
  CHECK(r.params.center == doctest::Approx(p.center).epsilon(1e-6));
  CHECK(r.slit_separation(lambda, distance) == doctest::Approx(670e-6).epsilon(1e-3));
  CHECK(r.slit_width(lambda, distance) == doctest::Approx(250e-6).epsilon(1e-3));
  CHECK(r.residual_rms == doctest::Approx(residual_rms(slice, r.params)).epsilon(1e-12));
  CHECK(r.residual_rms < 1e-8);
}

TEST_CASE("round trip through the closed-form metrics") {
  const auto layout = ExperimentLayout::paper_default();
  const SpatialGrid g(6e-3, 2400);
  for (const DoubleSlitSpec slit : {DoubleSlitSpec{250e-6, 670e-6}, DoubleSlitSpec{150e-6, 500e-6},
                                    DoubleSlitSpec{300e-6, 1000e-6}}) {
    const auto pair = canonical_aperture_pair(slit, slit.center_separation + slit.slit_width, g);
    const auto m = fringe_metrics(layout, slit, pair);
    const FringeModelParams p{1.0, m.visibility_factor, m.period, m.envelope_first_zero, 0.0};
    const auto slice = sample(p);
    const auto r = fit(slice, seed_fit(slice).params);
    CHECK(r.slit_separation(660e-9, 0.806) == doctest::Approx(slit.center_separation).epsilon(1e-3));
    CHECK(r.slit_width(660e-9, 0.806) == doctest::Approx(slit.slit_width).epsilon(1e-3));
  }
}

TEST_CASE("recovery with additive noise over 20 seeds") {
  std::vector<double> d, b;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto slice = sample(reference(), 0.01, seed);
    const auto r = fit(slice, seed_fit(slice).params);
    CHECK(r.converged);
    d.push_back(r.slit_separation(lambda, distance));
    b.push_back(r.slit_width(lambda, distance));
  }
  CHECK(median(d) == doctest::Approx(670e-6).epsilon(0.01));
  CHECK(median(b) == doctest::Approx(250e-6).epsilon(0.05));
}

TEST_CASE("visibility scaling leaves the geometry unchanged") {
  const auto p = reference();
  const auto slice = sample(p, 0.005, 77);
  const auto base = fit(slice, seed_fit(slice).params);
  for (double c : {0.3, 2.0}) {
    auto scaled = slice;
    for (double &g : scaled.g2)
      g = 1.0 + c * (g - 1.0);
    for (double &s : scaled.standard_error)
      s *= c;
    const auto r = fit(scaled, seed_fit(scaled).params);
    CHECK(r.params.period == doctest::Approx(base.params.period).epsilon(1e-6));
    CHECK(r.params.envelope_zero == doctest::Approx(base.params.envelope_zero).epsilon(1e-6));
    CHECK(r.params.center == doctest::Approx(base.params.center).epsilon(1e-6).scale(base.params.period));
    CHECK(r.params.visibility == doctest::Approx(c * base.params.visibility).epsilon(1e-6));
  }
}

TEST_CASE("covariance") {
  const auto slice = sample(reference(), 0.01, 5);
  const auto r = fit(slice, seed_fit(slice).params);
  CHECK((r.covariance - r.covariance.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> eig(r.covariance);
  CHECK(eig.eigenvalues().minCoeff() >= 0.0);
  // White noise: the correlation time is close to one and the period error
  // covers the truth.
  CHECK(r.correlation_time < 1.5);
  CHECK(std::abs(r.params.period - reference().period) < 5 * r.stderr_of(2));
}

TEST_CASE("failure modes") {
  SUBCASE("too few points") {
    auto s = sample(reference(), 0.0, 0, 20e-6);
    CHECK(s.size() < 20);
    CHECK_THROWS_AS(fit(s, reference()), InvalidArgument);
  }
  SUBCASE("degenerate positions") {
    G2Slice s;
    for (int i = 0; i < 40; ++i) {
      s.positions.push_back(0.3e-3);
      s.g2.push_back(1.2);
      s.standard_error.push_back(0.01);
      s.defined.push_back(1);
    }
    try {
      (void)fit(s, reference());
      FAIL("expected RankDeficiency");
    } catch (const RankDeficiency &e) {
      CHECK_FALSE(e.parameter().empty());
    }
  }
  SUBCASE("iteration budget exhausted") {
    const auto slice = sample(reference(), 0.01, 3);
    auto seed = seed_fit(slice).params;
    seed.period *= 1.02;
    const auto r = fit(slice, seed, FitOptions{1, 1e-8});
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
  }
  SUBCASE("undefined points are excluded") {
    auto slice = sample(reference(), 0.01, 8);
    const auto clean = fit(slice, seed_fit(slice).params);
    for (std::size_t i = 0; i < slice.size(); i += 7) {
      slice.g2[i] = 1e6;
      slice.defined[i] = 0;
    }
    const auto r = fit(slice, seed_fit(slice).params);
    CHECK(r.points < clean.points);
    CHECK(r.params.period == doctest::Approx(clean.params.period).epsilon(1e-3));
  }
}

TEST_CASE("resolvable minima") {
  const auto p = reference();
  // Noise-free: every cos^2 zero inside the envelope counts, including the
  // pair just before the sinc zero.
  CHECK(count_resolvable_minima(sample(p), p.period / 8, 3.0, 0.0, p.envelope_zero) == 6);
  CHECK(count_resolvable_minima(sample(p, 0.01, 12), p.period / 8, 3.0, 0.0, p.envelope_zero) == 4);
  auto flat = p;
  flat.visibility = 0.0;
  CHECK(count_resolvable_minima(sample(flat, 0.01, 13), p.period / 8, 3.0, 0.0, p.envelope_zero) == 0);
}
