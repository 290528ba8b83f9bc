#include "ghostfringe/errors.hpp"
#include "ghostfringe/speckle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace ghostfringe;

namespace {

// Short bench: L0 = 2 cm, L = 4 cm, 5 um sampling over 10.24 mm.
Scenario bench(std::size_t frames = 64) {
  const SpatialGrid g(10.24e-3, 2048);
  const DoubleSlitSpec slit{100e-6, 250e-6};
  Scenario s{.layout = ExperimentLayout(660e-9, 0.01, {0.01, 0.05}, {0.01, 0.05}),
             .apertures = canonical_aperture_pair(slit, 350e-6, g),
             .source = SourceSpec{1.0, 10e-6, 4e-3},
             .grid = g};
  s.frames = frames;
  s.master_seed = 1234;
  s.detector_half_width = 2e-3;
  return s;
}

double contrast(const std::vector<double> &v) {
  double m = 0.0, m2 = 0.0;
  for (double x : v) {
    m += x;
    m2 += x * x;
  }
  m /= static_cast<double>(v.size());
  m2 /= static_cast<double>(v.size());
  return std::sqrt(m2 - m * m) / m;
}

} // namespace

TEST_CASE("frame stream seeds are distinct and reproducible") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t master : {0ull, 1ull, 42ull})
    for (std::uint64_t f = 0; f < 1000; ++f)
      seeds.insert(frame_stream_seed(master, f));
  CHECK(seeds.size() == 3000);
  CHECK(frame_stream_seed(42, 7) == frame_stream_seed(42, 7));
}

TEST_CASE("broadband source samples are circular Gaussian") {
  const SpatialGrid g(1.0, 1 << 20);
  const SourceSpec s{2.0, 0.0, 1e6}; // envelope effectively flat
  RandomStream stream(99);
  const auto f = sample_source_field(s, g, stream);
  const double n = static_cast<double>(g.samples());
  Complex mean{};
  double var = 0.0, i2 = 0.0, pseudo = 0.0;
  for (const auto &e : f.amplitudes) {
    mean += e;
    var += std::norm(e);
    i2 += std::norm(e) * std::norm(e);
    pseudo += (e * e).real();
  }
  mean /= n;
  var /= n;
  i2 /= n;
  const double expected_var = s.strength / g.spacing();
  const double se_mean = std::sqrt(expected_var / (2 * n));
  CHECK(std::abs(mean.real()) < 4 * se_mean);
  CHECK(std::abs(mean.imag()) < 4 * se_mean);
  CHECK(var == doctest::Approx(expected_var).epsilon(0.01));
  CHECK(std::sqrt(i2 - var * var) / var == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(pseudo / n) < 0.01 * var); // circularity: <E^2> = 0
}

TEST_CASE("finite coherence length gives a Gaussian field correlation") {
  const SpatialGrid g(0.5, 1 << 18);
  const double lc = 8 * g.spacing();
  const SourceSpec s{1.0, lc, 1e6};
  RandomStream stream(5);
  const auto f = sample_source_field(s, g, stream);
  auto corr = [&](std::size_t lag) {
    Complex c{};
    for (std::size_t i = 1000; i + lag < g.samples() - 1000; ++i)
      c += std::conj(f.amplitudes[i]) * f.amplitudes[i + lag];
    return c / static_cast<double>(g.samples() - 2000 - lag);
  };
  const double c0 = corr(0).real();
  // W0 times a unit-area Gaussian of standard deviation lc, at zero lag.
  CHECK(c0 == doctest::Approx(1.0 / (std::sqrt(2 * std::numbers::pi) * lc)).epsilon(0.02));
  for (std::size_t lag : {4u, 8u, 12u}) {
    const double d = static_cast<double>(lag) * g.spacing();
    CHECK(corr(lag).real() / c0 == doctest::Approx(std::exp(-d * d / (2 * lc * lc))).epsilon(0.03).scale(1.0));
  }
}

TEST_CASE("frame paths") {
  SUBCASE("open symmetric arms see identical intensities") {
    auto s = bench();
    s.apertures = {open_aperture(s.grid), open_aperture(s.grid)};
    const auto f = simulate_frame(s, 3);
    CHECK(f.intensity1 == f.intensity2);
  }
  SUBCASE("a blocked arm is dark and leaves the other untouched") {
    auto s = bench();
    const auto reference = simulate_frame(s, 3);
    s.apertures.arm2 = blocked_aperture(s.grid);
    const auto f = simulate_frame(s, 3);
    for (double v : f.intensity2)
      REQUIRE(v == 0.0);
    CHECK(f.intensity1 == reference.intensity1);
  }
  SUBCASE("frames depend on the index only") {
    const auto s = bench();
    FrameSimulator sim(s);
    const auto a = sim.simulate(10);
    (void)sim.simulate(11);
    CHECK(sim.simulate(10).intensity1 == a.intensity1);
    CHECK(simulate_frame(s, 11).intensity1 != a.intensity1);
  }
  SUBCASE("field diagnostics carry the detector fields") {
    auto s = bench();
    s.field_diagnostics = true;
    const auto f = simulate_frame(s, 0);
    REQUIRE(f.has_fields());
    for (std::size_t i = 0; i < f.intensity1.size(); ++i)
      REQUIRE(std::norm(f.field1[i]) == doctest::Approx(f.intensity1[i]));
  }
}

TEST_CASE("reference scenario frames show fully developed speckle") {
  const auto s = Scenario::paper_default();
  FrameSimulator sim(s);
  const auto det = s.detector();
  double sum = 0.0, lo = 1e9, hi = 0.0;
  const int frames = 50;
  for (int f = 0; f < frames; ++f) {
    const auto rec = sim.simulate(static_cast<std::uint64_t>(f));
    std::vector<double> central;
    for (std::size_t p = 0; p < det.count; ++p)
      if (std::abs(det.coordinate(p)) <= 5e-3)
        central.push_back(rec.intensity1[p]);
    const double c = contrast(central);
    sum += c;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  MESSAGE("single-frame contrast range " << lo << " .. " << hi);
  CHECK(sum / frames == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("ensemble") {
  SUBCASE("one frame leaves g2 undefined") {
    const auto acc = run_ensemble(bench(1));
    CHECK(acc.frame_count() == 1);
    const auto sl = g2_slice(acc, Arm::two);
    for (std::size_t i = 0; i < sl.size(); ++i) {
      REQUIRE_FALSE(sl.defined[i]);
      REQUIRE(std::isnan(sl.g2[i]));
    }
  }
  SUBCASE("worker count does not change a single bit") {
    const auto s = bench(150);
    const auto a = run_ensemble(s, 1);
    for (unsigned w : {2u, 4u, 8u}) {
      const auto b = run_ensemble(s, w);
      CHECK(b.frame_count() == 150);
      for (Arm arm : {Arm::one, Arm::two}) {
        CHECK(a.sum_intensity(arm) == b.sum_intensity(arm));
        CHECK(a.cross(arm).product == b.cross(arm).product);
        CHECK(g2_slice(a, arm).g2 == g2_slice(b, arm).g2);
      }
    }
  }
  SUBCASE("consecutive frames are uncorrelated") {
    const auto s = bench();
    FrameSimulator sim(s);
    const std::size_t p = s.detector().pixel_of(0.0);
    std::vector<double> v;
    for (std::uint64_t f = 0; f < 400; ++f)
      v.push_back(sim.simulate(f).intensity2[p]);
    double m = 0.0;
    for (double x : v)
      m += x;
    m /= static_cast<double>(v.size());
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      c0 += (v[i] - m) * (v[i] - m);
      if (i + 1 < v.size())
        c1 += (v[i] - m) * (v[i + 1] - m);
    }
    // 4 standard errors of a lag-1 autocorrelation over 400 samples.
    CHECK(std::abs(c1 / c0) < 4.0 / std::sqrt(400.0));
  }
}

TEST_CASE("statistical Siegert relation on the bench") {
  auto s = bench(1500);
  s.field_diagnostics = true;
  const auto acc = run_ensemble(s, 2);
  const auto report = siegert_check(acc);
  CHECK(report.agreement_fraction(5.0, 0.0, 1.5e-3) >= 0.95);
}

TEST_CASE("scenario validation") {
  SUBCASE("too fine a grid for the propagation distance") {
    auto s = bench();
    const SpatialGrid g(1.024e-3, 2048); // 0.5 um over 1 mm
    s.grid = g;
    s.apertures = canonical_aperture_pair({100e-6, 250e-6}, 350e-6, g);
    s.source.correlation_length = 0.0;
    s.detector_half_width = 0.4e-3;
    CHECK_THROWS_AS(s.validate(), SamplingBoundError);
  }
  SUBCASE("unresolved coherence length") {
    auto s = bench();
    s.source.correlation_length = 6e-6;
    CHECK_THROWS_AS(s.validate(), SamplingBoundError);
  }
  SUBCASE("probe outside the detector") {
    auto s = bench();
    s.probe.position = 3e-3;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
  }
  SUBCASE("apertures on another grid") {
    auto s = bench();
    s.apertures.arm1 = open_aperture(SpatialGrid(10.24e-3, 1024));
    CHECK_THROWS_AS(s.validate(), GridMismatch);
  }
  SUBCASE("zero frames") {
    auto s = bench();
    s.frames = 0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
  }
  CHECK_NOTHROW(Scenario::paper_default().validate());
}
