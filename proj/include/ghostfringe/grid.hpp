#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ghostfringe {

using Complex = std::complex<double>;

/// Uniform 1D transverse sampling centred on x = 0.
///
/// Sample i sits at x_i = (i - N/2) * spacing, so x = 0 is a sample for
/// even N and the grid is mirror symmetric about it.
class SpatialGrid {
public:
  static constexpr std::size_t min_samples = 16;

  SpatialGrid(double window, std::size_t samples);

  double window() const noexcept { return window_; }
  std::size_t samples() const noexcept { return samples_; }
  double spacing() const noexcept { return spacing_; }

  double coordinate(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(samples_ / 2)) *
           spacing_;
  }
  std::vector<double> coordinates() const;

  /// Index of the sample nearest to x; throws when x lies outside the window.
  std::size_t nearest_index(double x) const;

  /// Index of the sample mirrored about x = 0, if it exists on the grid.
  bool has_mirror(std::size_t i) const noexcept;
  std::size_t mirror(std::size_t i) const noexcept { return 2 * (samples_ / 2) - i; }

  bool operator==(const SpatialGrid &) const = default;

private:
  double window_;
  std::size_t samples_;
  double spacing_;
};

/// Complex field amplitudes sampled on a SpatialGrid.
struct ComplexField {
  SpatialGrid grid;
  std::vector<Complex> amplitudes;

  explicit ComplexField(SpatialGrid g);
  ComplexField(SpatialGrid g, std::vector<Complex> values);

  /// Sum |E|^2 * spacing.
  double power() const;
  std::vector<double> intensity() const;
};

} // namespace ghostfringe
