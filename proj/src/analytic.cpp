#include "ghostfringe/analytic.hpp"
#include "ghostfringe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace ghostfringe {

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt_2pi = std::sqrt(2.0 * pi);

void require_broadband(const SourceSpec &source) {
  source.validate();
  if (!source.is_broadband())
    throw RegimeError("closed form holds only in the broadband limit (correlation length 0); "
                      "use the quadrature variant");
}

void require_symmetric(const ExperimentLayout &layout) {
  if (!layout.is_symmetric())
    throw RegimeError("closed form needs equal distances in both arms; use the quadrature variant");
}

struct Support {
  std::size_t first = 0;
  std::size_t last = 0; // inclusive
  bool empty = true;
};

Support support_of(const ApertureProfile &a) {
  Support s;
  const auto &t = a.transmission();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != 0.0) {
      if (s.empty)
        s.first = i;
      s.last = i;
      s.empty = false;
    }
  }
  return s;
}

double support_half_extent(const ApertureProfile &a) {
  const Support s = support_of(a);
  if (s.empty)
    return 0.0;
  return std::max(std::abs(a.grid().coordinate(s.first)), std::abs(a.grid().coordinate(s.last)));
}

std::vector<double> source_coordinates(const SourceSampling &s) {
  const auto half = static_cast<long>(std::ceil(s.half_window / s.spacing));
  std::vector<double> x0(static_cast<std::size_t>(2 * half + 1));
  for (long m = -half; m <= half; ++m)
    x0[static_cast<std::size_t>(m + half)] = static_cast<double>(m) * s.spacing;
  return x0;
}

// h(x, x0_m) for every source sample, by midpoint quadrature over the
// aperture samples. The x'-dependent part of the phase is split into a
// fixed chirp a_i and a plane wave exp(-i kappa x'_i) advanced by recurrence.
std::vector<Complex> transfer_row(double x, const ExperimentLayout &layout, Arm arm,
                                  const ApertureProfile &aperture,
                                  const std::vector<double> &x0) {
  const double k = layout.wavenumber();
  const double l0 = layout.source_to_aperture(arm);
  const double l = layout.aperture_to_detector(arm);
  std::vector<Complex> h(x0.size(), Complex{});
  const Support s = support_of(aperture);
  if (s.empty)
    return h;

  const auto &grid = aperture.grid();
  const double dx = grid.spacing();
  const double curvature = 0.5 * k * (1.0 / l + 1.0 / l0);
  std::vector<Complex> chirp(s.last - s.first + 1);
  for (std::size_t i = s.first; i <= s.last; ++i) {
    const double xp = grid.coordinate(i);
    chirp[i - s.first] = aperture.transmission()[i] * std::polar(1.0, curvature * xp * xp);
  }

  const Complex prefactor = Complex(0.0, -k / (2.0 * pi * std::sqrt(l0 * l))) *
                            std::polar(1.0, k * (l0 + l)) * dx;
  const double x_start = grid.coordinate(s.first);
  for (std::size_t m = 0; m < x0.size(); ++m) {
    const double kappa = k * (x / l + x0[m] / l0);
    Complex phasor = std::polar(1.0, -kappa * x_start);
    const Complex step = std::polar(1.0, -kappa * dx);
    Complex sum{};
    for (const Complex &c : chirp) {
      sum += c * phasor;
      phasor *= step;
    }
    const double outer = k * (x * x / (2.0 * l) + x0[m] * x0[m] / (2.0 * l0));
    h[m] = prefactor * std::polar(1.0, outer) * sum;
  }
  return h;
}

// Discrete unit-area Gaussian of standard deviation sigma on the source
// spacing, truncated at 6 sigma.
std::vector<double> correlation_kernel(double sigma, double spacing) {
  const auto half = static_cast<long>(std::ceil(6.0 * sigma / spacing));
  std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (long j = -half; j <= half; ++j) {
    const double u = static_cast<double>(j) * spacing;
    const double v = std::exp(-0.5 * u * u / (sigma * sigma));
    w[static_cast<std::size_t>(j + half)] = v;
    sum += v;
  }
  for (double &v : w)
    v /= sum * spacing;
  return w;
}

// W0 * sum_n sum_m conj(h1_n) env_n K(x0_n - x0_m) env_m h2_m (spacing^2).
Complex correlate_rows(const std::vector<Complex> &h1, const std::vector<Complex> &h2,
                       const std::vector<double> &x0, const SourceSpec &source,
                       double spacing) {
  std::vector<Complex> g(x0.size());
  for (std::size_t m = 0; m < x0.size(); ++m)
    g[m] = source.envelope(x0[m]) * h2[m];

  if (!source.is_broadband() && source.correlation_length > 0.5 * spacing) {
    const auto kernel = correlation_kernel(source.correlation_length, spacing);
    const long half = static_cast<long>(kernel.size() / 2);
    std::vector<Complex> smoothed(g.size());
    const long n = static_cast<long>(g.size());
    for (long i = 0; i < n; ++i) {
      Complex acc{};
      for (long j = -half; j <= half; ++j) {
        const long m = i - j;
        if (m >= 0 && m < n)
          acc += kernel[static_cast<std::size_t>(j + half)] * g[static_cast<std::size_t>(m)];
      }
      smoothed[static_cast<std::size_t>(i)] = acc * spacing;
    }
    g.swap(smoothed);
  }

  Complex sum{};
  for (std::size_t n = 0; n < x0.size(); ++n)
    sum += std::conj(h1[n]) * source.envelope(x0[n]) * g[n];
  return source.strength * sum * spacing;
}

void check_quadrature_grid(const ExperimentLayout &layout, Arm arm, const ApertureProfile &aperture,
                           const SourceSampling &sampling, double x) {
  const double bound = quadrature_sampling_bound(layout, arm, aperture, sampling, x);
  if (aperture.grid().spacing() > bound)
    throw SamplingBoundError("aperture spacing " + std::to_string(aperture.grid().spacing()) +
                                 " m undersamples the Fresnel chirp; needs <= " +
                                 std::to_string(bound) + " m",
                             bound);
}

} // namespace

double sinc(double u) noexcept {
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sin(u) / u;
}

double double_slit_transform(double q, const DoubleSlitSpec &slit) noexcept {
  return 2.0 * slit.slit_width / sqrt_2pi * sinc(0.5 * q * slit.slit_width) *
         std::cos(0.5 * q * slit.center_separation);
}

double mean_intensity(const ExperimentLayout &layout, Arm arm, const ApertureProfile &aperture,
                      const SourceSpec &source) {
  require_broadband(source);
  return source.strength * layout.wavenumber() /
         (2.0 * pi * layout.aperture_to_detector(arm)) * aperture.squared_integral();
}

CoherenceValue mutual_coherence(double x1, double x2, const ExperimentLayout &layout,
                                const DoubleSlitSpec &slit, const SourceSpec &source) {
  require_broadband(source);
  require_symmetric(layout);
  slit.validate();
  const double k = layout.wavenumber();
  const double l = layout.aperture_to_detector(Arm::one);
  const double amplitude = source.strength * k / (sqrt_2pi * l) *
                           double_slit_transform(k / l * (x1 - x2), slit);
  const double phase = k / (2.0 * l) * (x2 * x2 - x1 * x1);
  return {std::polar(1.0, phase) * amplitude, x1, x2};
}

double g2_model(double x1, double x2, const ExperimentLayout &layout,
                const AperturePair &apertures, const DoubleSlitSpec &slit,
                const SourceSpec &source) {
  const double i1 = mean_intensity(layout, Arm::one, apertures.arm1, source);
  const double i2 = mean_intensity(layout, Arm::two, apertures.arm2, source);
  if (!(i1 > 0.0) || !(i2 > 0.0))
    throw UndefinedCorrelation("g2 undefined: an arm has zero mean intensity");
  const auto gamma = mutual_coherence(x1, x2, layout, slit, source);
  return 1.0 + std::norm(gamma.value) / (i1 * i2);
}

FringeMetrics fringe_metrics(const ExperimentLayout &layout, const DoubleSlitSpec &slit,
                             const AperturePair &apertures) {
  require_symmetric(layout);
  slit.validate();
  const double lambda_l = layout.wavelength() * layout.aperture_to_detector(Arm::one);
  const double denom = apertures.arm1.squared_integral() * apertures.arm2.squared_integral();
  const double two_b = 2.0 * slit.slit_width;
  return {lambda_l / slit.center_separation, lambda_l / slit.slit_width,
          denom > 0.0 ? two_b * two_b / denom : 0.0};
}

SourceSampling default_source_sampling(const ExperimentLayout &layout,
                                       const AperturePair &apertures, const SourceSpec &source) {
  source.validate();
  const double extent =
      2.0 * std::max(support_half_extent(apertures.arm1), support_half_extent(apertures.arm2));
  const double l0 =
      std::min(layout.source_to_aperture(Arm::one), layout.source_to_aperture(Arm::two));
  double spacing = extent > 0.0 ? layout.wavelength() * l0 / (4.0 * extent)
                                : 0.1 * source.envelope_radius();
  spacing = std::min(spacing, 0.1 * source.envelope_radius());
  if (!source.is_broadband())
    spacing = std::min(spacing, 0.5 * source.correlation_length);
  return {3.0 * source.envelope_radius(), spacing};
}

double quadrature_sampling_bound(const ExperimentLayout &layout, Arm arm,
                                 const ApertureProfile &aperture, const SourceSampling &sampling,
                                 double x) {
  const double half = support_half_extent(aperture);
  const double detector_lag = half + std::abs(x);
  const double source_lag = half + sampling.half_window;
  const double rate = detector_lag / layout.aperture_to_detector(arm) +
                      source_lag / layout.source_to_aperture(arm);
  return layout.wavelength() / (2.0 * rate);
}

CoherenceValue mutual_coherence_quadrature(double x1, double x2, const ExperimentLayout &layout,
                                           const AperturePair &apertures,
                                           const SourceSpec &source,
                                           std::optional<SourceSampling> sampling) {
  source.validate();
  const SourceSampling s = sampling.value_or(default_source_sampling(layout, apertures, source));
  check_quadrature_grid(layout, Arm::one, apertures.arm1, s, x1);
  check_quadrature_grid(layout, Arm::two, apertures.arm2, s, x2);
  const auto x0 = source_coordinates(s);
  const auto h1 = transfer_row(x1, layout, Arm::one, apertures.arm1, x0);
  const auto h2 = transfer_row(x2, layout, Arm::two, apertures.arm2, x0);
  return {correlate_rows(h1, h2, x0, source, s.spacing), x1, x2};
}

double mean_intensity_quadrature(double x, const ExperimentLayout &layout, Arm arm,
                                 const ApertureProfile &aperture, const SourceSpec &source,
                                 std::optional<SourceSampling> sampling) {
  source.validate();
  const SourceSampling s =
      sampling.value_or(default_source_sampling(layout, AperturePair{aperture, aperture}, source));
  check_quadrature_grid(layout, arm, aperture, s, x);
  const auto x0 = source_coordinates(s);
  const auto h = transfer_row(x, layout, arm, aperture, x0);
  return correlate_rows(h, h, x0, source, s.spacing).real();
}

} // namespace ghostfringe
