#include "ghostfringe/grid.hpp"
#include "ghostfringe/errors.hpp"

#include <cmath>
#include <string>

namespace ghostfringe {

SpatialGrid::SpatialGrid(double window, std::size_t samples)
    : window_(window), samples_(samples), spacing_(window / static_cast<double>(samples)) {
  if (!(window > 0.0) || !std::isfinite(window))
    throw InvalidArgument("grid window must be positive and finite");
  if (samples < min_samples)
    throw InvalidArgument("grid needs at least " + std::to_string(min_samples) + " samples, got " +
                          std::to_string(samples));
}

std::vector<double> SpatialGrid::coordinates() const {
  std::vector<double> x(samples_);
  for (std::size_t i = 0; i < samples_; ++i)
    x[i] = coordinate(i);
  return x;
}

std::size_t SpatialGrid::nearest_index(double x) const {
  const double pos = x / spacing_ + static_cast<double>(samples_ / 2);
  const double idx = std::round(pos);
  if (!std::isfinite(idx) || idx < 0.0 || idx > static_cast<double>(samples_ - 1))
    throw InvalidArgument("position " + std::to_string(x) + " m lies outside the grid window");
  return static_cast<std::size_t>(idx);
}

bool SpatialGrid::has_mirror(std::size_t i) const noexcept {
  return i <= 2 * (samples_ / 2) && mirror(i) < samples_;
}

ComplexField::ComplexField(SpatialGrid g) : grid(g), amplitudes(g.samples()) {}

ComplexField::ComplexField(SpatialGrid g, std::vector<Complex> values)
    : grid(g), amplitudes(std::move(values)) {
  if (amplitudes.size() != grid.samples())
    throw GridMismatch("field has " + std::to_string(amplitudes.size()) +
                       " amplitudes for a grid of " + std::to_string(grid.samples()));
}

double ComplexField::power() const {
  double sum = 0.0;
  for (const auto &e : amplitudes)
    sum += std::norm(e);
  return sum * grid.spacing();
}

std::vector<double> ComplexField::intensity() const {
  std::vector<double> out(amplitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::norm(amplitudes[i]);
  return out;
}

} // namespace ghostfringe
