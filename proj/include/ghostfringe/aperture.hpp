#pragma once

#include "ghostfringe/grid.hpp"
#include "ghostfringe/layout.hpp"

#include <variant>
#include <vector>

namespace ghostfringe {

/// Slit width b and centre separation d of the double slit formed by the
/// product of the two arm apertures.
struct DoubleSlitSpec {
  double slit_width;
  double center_separation;

  /// b = 250 um, d = 670 um.
  static DoubleSlitSpec paper_default() { return {250e-6, 670e-6}; }
  void validate() const;

  double inner_edge() const noexcept { return 0.5 * (center_separation - slit_width); }
  double outer_edge() const noexcept { return 0.5 * (center_separation + slit_width); }
};

namespace shape {
struct OuterSlit {
  double width;
};
struct BlockingStrip {
  double inner_width;
  double outer_width;
};
struct DoubleSlit {
  DoubleSlitSpec slit;
};
struct Open {};
struct Custom {};
} // namespace shape

using ApertureShape = std::variant<shape::OuterSlit, shape::BlockingStrip,
                                   shape::DoubleSlit, shape::Open, shape::Custom>;

/// Real transmission in [0, 1] sampled at pixel centres of a grid.
class ApertureProfile {
public:
  ApertureProfile(SpatialGrid grid, std::vector<double> transmission,
                  ApertureShape shape = shape::Custom{});

  const SpatialGrid &grid() const noexcept { return grid_; }
  const std::vector<double> &transmission() const noexcept { return transmission_; }
  const ApertureShape &shape() const noexcept { return shape_; }

  /// Sum t_i * spacing.
  double open_length() const;
  /// Sum t_i^2 * spacing, the integral of A^2.
  double squared_integral() const;

private:
  SpatialGrid grid_;
  std::vector<double> transmission_;
  ApertureShape shape_;
};

struct AperturePair {
  ApertureProfile arm1;
  ApertureProfile arm2;

  const ApertureProfile &operator[](Arm a) const noexcept {
    return a == Arm::one ? arm1 : arm2;
  }
};

/// Samples D(x): 1 for (d-b)/2 < |x| <= (d+b)/2, 0 elsewhere.
/// Requires spacing < b/4.
ApertureProfile sample_double_slit(const DoubleSlitSpec &slit, const SpatialGrid &grid);

ApertureProfile single_slit(double width, const SpatialGrid &grid);
ApertureProfile blocking_strip(double inner_width, double outer_width,
                               const SpatialGrid &grid);
ApertureProfile open_aperture(const SpatialGrid &grid);
ApertureProfile blocked_aperture(const SpatialGrid &grid);

/// Slit-plus-wire decomposition of the double slit: arm 1 gets a single slit
/// of width d+b, arm 2 a blocking strip of width d-b inside an outer support
/// of width w >= d+b. Their pointwise product is sample_double_slit().
AperturePair canonical_aperture_pair(const DoubleSlitSpec &slit, double outer_support,
                                     const SpatialGrid &grid);

/// Pointwise product of two profiles on the same grid.
ApertureProfile aperture_product(const ApertureProfile &a, const ApertureProfile &b);

} // namespace ghostfringe
