#pragma once

#include "ghostfringe/aperture.hpp"
#include "ghostfringe/fft.hpp"
#include "ghostfringe/grid.hpp"

#include <span>
#include <vector>

namespace ghostfringe {

/// Smallest grid spacing for which the Fresnel transfer function, sampled on
/// the 2x zero-padded domain, resolves its quadratic phase: lambda z / (2 W).
double spectral_sampling_bound(double distance, double wavelength, const SpatialGrid &grid);

/// Paraxial free-space propagation over a fixed distance on a fixed grid.
///
/// Applies H(kx) = exp(ikz) exp(-i z kx^2 / 2k), the exact transform of the
/// Fresnel kernel sqrt(k/(2 pi i z)) exp(ikz) exp(ik x^2/2z), on a domain
/// zero-padded to twice the window. Light leaving the window is discarded
/// (absorbing boundary). Owns its FFT scratch space, so one instance per
/// thread.
class FresnelPropagator {
public:
  FresnelPropagator(const SpatialGrid &grid, double distance, double wavelength);

  const SpatialGrid &grid() const noexcept { return grid_; }
  double distance() const noexcept { return distance_; }

  /// in and out may alias.
  void propagate(std::span<const Complex> in, std::span<Complex> out);
  ComplexField operator()(const ComplexField &field);

private:
  SpatialGrid grid_;
  double distance_;
  std::vector<Complex> transfer_;
  detail::Fft fft_;
};

ComplexField fresnel_propagate(const ComplexField &field, double distance, double wavelength);

/// Pointwise product of the field with the aperture transmission.
ComplexField apply_mask(const ComplexField &field, const ApertureProfile &aperture);

} // namespace ghostfringe
