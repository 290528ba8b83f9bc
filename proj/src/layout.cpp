#include "ghostfringe/layout.hpp"
#include "ghostfringe/errors.hpp"

#include <cmath>
#include <numbers>

namespace ghostfringe {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void check_positive(double v, const char *name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(name) + " must be positive and finite");
}

} // namespace

ExperimentLayout::ExperimentLayout(double wavelength, double source_to_bs, ArmDistances arm1,
                                   ArmDistances arm2)
    : wavelength_(wavelength), wavenumber_(2.0 * std::numbers::pi / wavelength),
      source_to_bs_(source_to_bs), arms_{arm1, arm2} {
  check_positive(wavelength, "wavelength");
  check_positive(source_to_bs, "source_to_bs");
  for (const auto &a : arms_) {
    check_positive(a.bs_to_aperture, "bs_to_aperture");
    check_positive(a.bs_to_detector, "bs_to_detector");
    if (!(a.bs_to_detector > a.bs_to_aperture))
      throw InvalidArgument("detector must lie beyond the aperture in each arm");
  }
}

ExperimentLayout ExperimentLayout::paper_default() {
  return ExperimentLayout(660e-9, 3.4e-2, {4.7e-2, 85.3e-2}, {4.7e-2, 85.3e-2});
}

bool ExperimentLayout::is_symmetric() const noexcept {
  return close(source_to_aperture(Arm::one), source_to_aperture(Arm::two)) &&
         close(aperture_to_detector(Arm::one), aperture_to_detector(Arm::two));
}

ExperimentLayout ExperimentLayout::with_source_to_bs(double d) const {
  return ExperimentLayout(wavelength_, d, arms_[0], arms_[1]);
}

} // namespace ghostfringe
