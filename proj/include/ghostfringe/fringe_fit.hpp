#pragma once

#include "ghostfringe/correlation.hpp"
#include "ghostfringe/layout.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>

namespace ghostfringe {

/// baseline + V0 sinc^2(pi (x - xc) / e) cos^2(pi (x - xc) / p)
struct FringeModelParams {
  double baseline = 1.0;
  double visibility = 0.0;
  double period = 0.0;
  double envelope_zero = 0.0;
  double center = 0.0;

  double operator()(double x) const noexcept;
  bool resolvable() const noexcept { return period > 0 && envelope_zero > 0.5 * period; }
};

inline constexpr std::array<const char *, 5> fringe_parameter_names = {
    "baseline", "visibility", "period", "envelope_zero", "center"};

/// Model value and its gradient with respect to
/// (baseline, visibility, period, envelope_zero, center).
double fringe_model(const FringeModelParams &p, double x, Eigen::Matrix<double, 5, 1> *gradient);

struct FringeSeed {
  FringeModelParams params;
  bool low_confidence = false;
  /// Periodogram peak power over its median.
  double peak_to_floor = 0.0;
};

/// Initial guess from a periodogram of (g2 - median). cos^2(pi x / p) puts
/// the dominant peak beyond the envelope lobe at 1/p cycles per metre. The
/// envelope comes from the height ratio of the first side fringe to the
/// central one.
FringeSeed seed_fit(const G2Slice &slice);

struct FringeFitResult {
  FringeModelParams params;
  Eigen::Matrix<double, 5, 5> covariance = Eigen::Matrix<double, 5, 5>::Zero();
  double residual_rms = 0.0;
  double chi2 = 0.0;
  /// Integrated autocorrelation time of the normalised residuals (>= 1),
  /// by which the covariance is inflated. Speckle makes neighbouring
  /// pixels of a simulated slice strongly correlated.
  double correlation_time = 1.0;
  std::size_t points = 0;
  std::size_t iterations = 0;
  bool converged = false;

  double stderr_of(std::size_t parameter) const;

  /// d = lambda L / p and b = lambda L / e.
  double slit_separation(double wavelength, double distance) const noexcept {
    return wavelength * distance / params.period;
  }
  double slit_width(double wavelength, double distance) const noexcept {
    return wavelength * distance / params.envelope_zero;
  }
};

struct FitOptions {
  std::size_t max_iterations = 200;
  double step_tolerance = 1e-8;
};

/// Weighted Levenberg-Marquardt fit of the fringe law with analytic
/// Jacobian. Visibility, period and envelope are optimised in log space.
/// Weights are 1/stderr^2 over defined points; if no point carries a
/// positive stderr the fit is unweighted. The covariance is scaled by the
/// reduced chi^2 and by the residual correlation time. Throws
/// RankDeficiency on singular normal equations.
FringeFitResult fit(const G2Slice &slice, const FringeModelParams &seed,
                    const FitOptions &options = {});

/// Root-mean-square of g2 - model over the points a fit would use.
double residual_rms(const G2Slice &slice, const FringeModelParams &params);

/// Local minima of the slice, smoothed over `smoothing` metres, that sit
/// below the mean of their two neighbouring maxima by at least `sigmas`
/// standard errors. Only points with |x - centre| <= half_width count.
std::size_t count_resolvable_minima(const G2Slice &slice, double smoothing, double sigmas,
                                    double centre, double half_width);

} // namespace ghostfringe
