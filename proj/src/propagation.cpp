#include "ghostfringe/propagation.hpp"
#include "ghostfringe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ghostfringe {

double spectral_sampling_bound(double distance, double wavelength, const SpatialGrid &grid) {
  return wavelength * distance / (2.0 * grid.window());
}

FresnelPropagator::FresnelPropagator(const SpatialGrid &grid, double distance, double wavelength)
    : grid_(grid), distance_(distance), fft_(2 * grid.samples()) {
  if (!(distance > 0.0) || !(wavelength > 0.0))
    throw InvalidArgument("propagation distance and wavelength must be positive");
  const double bound = spectral_sampling_bound(distance, wavelength, grid);
  if (grid.spacing() < bound) {
    std::ostringstream os;
    os << "grid spacing " << grid.spacing() << " m is below the Fresnel sampling bound " << bound
       << " m for z = " << distance << " m (widen the window or coarsen the grid)";
    throw SamplingBoundError(os.str(), bound);
  }

  const std::size_t m = fft_.size();
  const double k = 2.0 * std::numbers::pi / wavelength;
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(m) * grid.spacing());
  const Complex carrier = std::polar(1.0 / static_cast<double>(m), k * distance);
  transfer_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double n = j < m / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(m);
    const double kx = n * dk;
    transfer_[j] = carrier * std::polar(1.0, -distance * kx * kx / (2.0 * k));
  }
}

void FresnelPropagator::propagate(std::span<const Complex> in, std::span<Complex> out) {
  const std::size_t n = grid_.samples();
  if (in.size() != n || out.size() != n)
    throw GridMismatch("field length does not match the propagator grid");
  const std::size_t offset = n / 2;
  Complex *buf = fft_.data();
  std::fill(buf, buf + fft_.size(), Complex{});
  std::copy(in.begin(), in.end(), buf + offset);
  fft_.forward();
  for (std::size_t j = 0; j < fft_.size(); ++j)
    buf[j] *= transfer_[j];
  fft_.backward();
  std::copy(buf + offset, buf + offset + n, out.begin());
}

ComplexField FresnelPropagator::operator()(const ComplexField &field) {
  if (!(field.grid == grid_))
    throw GridMismatch("field grid does not match the propagator grid");
  ComplexField out(grid_);
  propagate(field.amplitudes, out.amplitudes);
  return out;
}

ComplexField fresnel_propagate(const ComplexField &field, double distance, double wavelength) {
  FresnelPropagator p(field.grid, distance, wavelength);
  return p(field);
}

ComplexField apply_mask(const ComplexField &field, const ApertureProfile &aperture) {
  if (!(field.grid == aperture.grid()))
    throw GridMismatch("aperture and field are sampled on different grids");
  ComplexField out(field.grid);
  const auto &t = aperture.transmission();
  for (std::size_t i = 0; i < t.size(); ++i)
    out.amplitudes[i] = field.amplitudes[i] * t[i];
  return out;
}

} // namespace ghostfringe
