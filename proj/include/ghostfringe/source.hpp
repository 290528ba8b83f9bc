#pragma once

namespace ghostfringe {

/// Statistical description of the pseudothermal source plane.
///
/// The field correlation is <E*(x')E(x)> = W0 * G(x'-x) * env(x') * env(x),
/// with G a unit-area Gaussian of standard deviation correlation_length (a
/// Dirac delta when correlation_length == 0) and env(x) = exp(-x^2/r^2),
/// r = envelope_width / 2, the amplitude of a spot whose intensity falls to
/// 1/e^2 at +-r.
struct SourceSpec {
  double strength = 1.0;
  double correlation_length = 0.0;
  double envelope_width = 10e-3;

  void validate() const;
  bool is_broadband() const noexcept { return correlation_length == 0.0; }
  double envelope_radius() const noexcept { return 0.5 * envelope_width; }
  double envelope(double x) const noexcept;
};

} // namespace ghostfringe
