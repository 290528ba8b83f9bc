#include "ghostfringe/aperture.hpp"
#include "ghostfringe/errors.hpp"

#include <cmath>
#include <sstream>

namespace ghostfringe {

namespace {

// Pixel-centre rule on |x|: open for inner < |x| <= outer, and for
// |x| <= outer when inner is negative (no central stop).
std::vector<double> sample_band(const SpatialGrid &grid, double inner, double outer) {
  std::vector<double> t(grid.samples(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = std::abs(grid.coordinate(i));
    const bool open = (inner < 0.0 ? true : r > inner) && r <= outer;
    t[i] = open ? 1.0 : 0.0;
  }
  return t;
}

std::string resolution_message(const char *what, double spacing, double limit) {
  std::ostringstream os;
  os << "grid too coarse for " << what << ": spacing " << spacing << " m must be below " << limit
     << " m";
  return os.str();
}

} // namespace

void DoubleSlitSpec::validate() const {
  if (!(slit_width > 0.0) || !std::isfinite(slit_width))
    throw InvalidArgument("slit width must be positive");
  if (!(center_separation > slit_width) || !std::isfinite(center_separation))
    throw InvalidArgument("slit centre separation must exceed the slit width");
}

ApertureProfile::ApertureProfile(SpatialGrid grid, std::vector<double> transmission,
                                 ApertureShape shape)
    : grid_(grid), transmission_(std::move(transmission)), shape_(shape) {
  if (transmission_.size() != grid_.samples())
    throw GridMismatch("aperture has " + std::to_string(transmission_.size()) +
                       " samples for a grid of " + std::to_string(grid_.samples()));
  for (double t : transmission_)
    if (!(t >= 0.0 && t <= 1.0))
      throw InvalidArgument("aperture transmission must lie in [0, 1]");
}

double ApertureProfile::open_length() const {
  double s = 0.0;
  for (double t : transmission_)
    s += t;
  return s * grid_.spacing();
}

double ApertureProfile::squared_integral() const {
  double s = 0.0;
  for (double t : transmission_)
    s += t * t;
  return s * grid_.spacing();
}

ApertureProfile sample_double_slit(const DoubleSlitSpec &slit, const SpatialGrid &grid) {
  slit.validate();
  if (!(grid.spacing() < 0.25 * slit.slit_width))
    throw InvalidArgument(resolution_message("double slit", grid.spacing(), 0.25 * slit.slit_width));
  return ApertureProfile(grid, sample_band(grid, slit.inner_edge(), slit.outer_edge()),
                         shape::DoubleSlit{slit});
}

ApertureProfile single_slit(double width, const SpatialGrid &grid) {
  if (!(width > 0.0))
    throw InvalidArgument("slit width must be positive");
  return ApertureProfile(grid, sample_band(grid, -1.0, 0.5 * width), shape::OuterSlit{width});
}

ApertureProfile blocking_strip(double inner_width, double outer_width, const SpatialGrid &grid) {
  if (!(inner_width > 0.0) || !(outer_width > inner_width))
    throw InvalidArgument("blocking strip needs 0 < inner width < outer width");
  return ApertureProfile(grid, sample_band(grid, 0.5 * inner_width, 0.5 * outer_width),
                         shape::BlockingStrip{inner_width, outer_width});
}

ApertureProfile open_aperture(const SpatialGrid &grid) {
  return ApertureProfile(grid, std::vector<double>(grid.samples(), 1.0), shape::Open{});
}

ApertureProfile blocked_aperture(const SpatialGrid &grid) {
  return ApertureProfile(grid, std::vector<double>(grid.samples(), 0.0), shape::Custom{});
}

AperturePair canonical_aperture_pair(const DoubleSlitSpec &slit, double outer_support,
                                     const SpatialGrid &grid) {
  slit.validate();
  const double full = slit.center_separation + slit.slit_width;
  const double stop = slit.center_separation - slit.slit_width;
  if (!(outer_support >= full))
    throw InvalidArgument("outer support " + std::to_string(outer_support) +
                          " m cannot form the double slit; needs at least d+b = " +
                          std::to_string(full) + " m");
  if (!(grid.spacing() < 0.25 * stop))
    throw InvalidArgument(resolution_message("aperture pair", grid.spacing(), 0.25 * stop));
  return {single_slit(full, grid), blocking_strip(stop, outer_support, grid)};
}

ApertureProfile aperture_product(const ApertureProfile &a, const ApertureProfile &b) {
  if (!(a.grid() == b.grid()))
    throw GridMismatch("aperture product needs a common grid");
  std::vector<double> t(a.transmission().size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = a.transmission()[i] * b.transmission()[i];
  return ApertureProfile(a.grid(), std::move(t));
}

} // namespace ghostfringe
