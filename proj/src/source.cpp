#include "ghostfringe/source.hpp"
#include "ghostfringe/errors.hpp"

#include <cmath>

namespace ghostfringe {

void SourceSpec::validate() const {
  if (!(strength > 0.0) || !std::isfinite(strength))
    throw InvalidArgument("source strength W0 must be positive");
  if (!(correlation_length >= 0.0) || !std::isfinite(correlation_length))
    throw InvalidArgument("source correlation length must be >= 0");
  if (!(envelope_width > 0.0) || !std::isfinite(envelope_width))
    throw InvalidArgument("source envelope width must be positive");
}

double SourceSpec::envelope(double x) const noexcept {
  const double r = envelope_radius();
  return std::exp(-x * x / (r * r));
}

} // namespace ghostfringe
