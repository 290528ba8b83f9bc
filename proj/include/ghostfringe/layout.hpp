#pragma once

#include <array>
#include <cstddef>

namespace ghostfringe {

/// Detection arm behind the beamsplitter.
enum class Arm { one = 1, two = 2 };

constexpr std::size_t arm_index(Arm a) noexcept { return a == Arm::one ? 0 : 1; }
constexpr Arm other_arm(Arm a) noexcept { return a == Arm::one ? Arm::two : Arm::one; }
constexpr int arm_number(Arm a) noexcept { return static_cast<int>(a); }

struct ArmDistances {
  double bs_to_aperture;
  double bs_to_detector;
};

/// Wavelength and propagation distances of the two-arm correlation setup.
///
/// Distances are measured along each arm from the beamsplitter; the field is
/// propagated from the source plane, so the first segment of arm j is
/// source_to_bs + bs_to_aperture_j.
class ExperimentLayout {
public:
  ExperimentLayout(double wavelength, double source_to_bs, ArmDistances arm1,
                   ArmDistances arm2);

  /// 660 nm, source 3.4 cm before the beamsplitter, apertures at 4.7 cm and
  /// detectors at 85.3 cm in both arms.
  static ExperimentLayout paper_default();

  double wavelength() const noexcept { return wavelength_; }
  double wavenumber() const noexcept { return wavenumber_; }
  double source_to_bs() const noexcept { return source_to_bs_; }
  const ArmDistances &arm(Arm a) const noexcept { return arms_[arm_index(a)]; }

  /// L0_j: source plane to aperture.
  double source_to_aperture(Arm a) const noexcept {
    return source_to_bs_ + arm(a).bs_to_aperture;
  }
  /// L_j: aperture to detector.
  double aperture_to_detector(Arm a) const noexcept {
    return arm(a).bs_to_detector - arm(a).bs_to_aperture;
  }

  /// Both segments equal in both arms to 1e-12 relative.
  bool is_symmetric() const noexcept;

  ExperimentLayout with_source_to_bs(double d) const;

private:
  double wavelength_;
  double wavenumber_;
  double source_to_bs_;
  std::array<ArmDistances, 2> arms_;
};

} // namespace ghostfringe
