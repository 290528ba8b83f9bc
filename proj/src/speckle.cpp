#include "ghostfringe/speckle.hpp"
#include "ghostfringe/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace ghostfringe {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Discrete Gaussian smoothing kernel with unit sum * spacing.
std::vector<double> smoothing_kernel(double sigma, double spacing) {
  const auto half = static_cast<long>(std::ceil(6.0 * sigma / spacing));
  std::vector<double> g(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (long j = -half; j <= half; ++j) {
    const double u = static_cast<double>(j) * spacing;
    const double v = std::exp(-0.5 * u * u / (sigma * sigma));
    g[static_cast<std::size_t>(j + half)] = v;
    sum += v;
  }
  for (double &v : g)
    v /= sum * spacing;
  return g;
}

constexpr std::size_t max_grid_samples = std::size_t{1} << 24;
constexpr std::size_t max_matrix_entries = std::size_t{1} << 26;

} // namespace

DetectorRegion DetectorRegion::centred(const SpatialGrid &grid, double half_width) {
  if (!(half_width > 0.0))
    throw InvalidArgument("detector half width must be positive");
  std::size_t first = grid.samples(), last = 0;
  for (std::size_t i = 0; i < grid.samples(); ++i) {
    if (std::abs(grid.coordinate(i)) <= half_width) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == grid.samples())
    throw InvalidArgument("detector region contains no grid sample");
  return {grid, first, last - first + 1};
}

std::vector<double> DetectorRegion::coordinates() const {
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i)
    x[i] = coordinate(i);
  return x;
}

std::size_t DetectorRegion::pixel_of(double x) const {
  const std::size_t i = grid.nearest_index(x);
  if (i < first || i >= first + count)
    throw InvalidArgument("position " + std::to_string(x) + " m is outside the detector");
  return i - first;
}

Scenario Scenario::paper_default() {
  const SpatialGrid grid(0.12288, 49152);
  const auto slit = DoubleSlitSpec::paper_default();
  return Scenario{.layout = ExperimentLayout::paper_default(),
                  .apertures = canonical_aperture_pair(slit, 920e-6, grid),
                  .source = SourceSpec{1.0, 5e-6, 10e-3},
                  .grid = grid};
}

void Scenario::validate() const {
  source.validate();
  if (frames == 0)
    throw InvalidArgument("frames must be at least 1");
  if (grid.samples() > max_grid_samples)
    throw InvalidArgument("grid of " + std::to_string(grid.samples()) +
                          " samples exceeds the supported maximum of " +
                          std::to_string(max_grid_samples));
  if (!(apertures.arm1.grid() == grid) || !(apertures.arm2.grid() == grid))
    throw GridMismatch("apertures must be sampled on the scenario grid");
  for (Arm a : {Arm::one, Arm::two}) {
    for (double z : {layout.source_to_aperture(a), layout.aperture_to_detector(a)}) {
      const double bound = spectral_sampling_bound(z, layout.wavelength(), grid);
      if (grid.spacing() < bound) {
        std::ostringstream os;
        os << "grid spacing " << grid.spacing() << " m violates the Fresnel sampling bound "
           << bound << " m for the " << z << " m segment of arm " << arm_number(a);
        throw SamplingBoundError(os.str(), bound);
      }
    }
  }
  if (!source.is_broadband() && source.correlation_length < 2.0 * grid.spacing()) {
    std::ostringstream os;
    os << "correlation length " << source.correlation_length
       << " m is not resolved; needs at least twice the grid spacing (" << 2.0 * grid.spacing()
       << " m)";
    throw SamplingBoundError(os.str(), 2.0 * grid.spacing());
  }
  const auto det = detector();
  det.pixel_of(probe.position);
  if (matrix_stride > 0) {
    const std::size_t m = (det.count + matrix_stride - 1) / matrix_stride;
    if (m * m > max_matrix_entries)
      throw InvalidArgument("g2 matrix too large; increase matrix_stride");
  }
}

DetectorRegion Scenario::detector() const {
  return DetectorRegion::centred(grid, detector_half_width);
}

AccumulatorConfig Scenario::accumulator_config() const {
  const auto det = detector();
  return AccumulatorConfig{det.coordinates(), det.pixel_of(probe.position), probe.arm,
                           field_diagnostics, matrix_stride};
}

std::uint64_t frame_stream_seed(std::uint64_t master_seed, std::uint64_t frame_index) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(frame_index ^ 0xd1b54a32d192ed03ULL));
}

ComplexField sample_source_field(const SourceSpec &source, const SpatialGrid &grid,
                                 RandomStream &stream) {
  source.validate();
  const std::size_t n = grid.samples();
  const double dx = grid.spacing();
  std::normal_distribution<double> normal(0.0, std::sqrt(source.strength / (2.0 * dx)));
  std::vector<Complex> white(n);
  for (auto &w : white) {
    const double re = normal(stream);
    const double im = normal(stream);
    w = {re, im};
  }

  ComplexField field(grid);
  const double sigma = source.correlation_length / std::sqrt(2.0);
  if (!source.is_broadband() && sigma > 0.25 * dx) {
    const auto g = smoothing_kernel(sigma, dx);
    const long half = static_cast<long>(g.size() / 2);
    const long len = static_cast<long>(n);
    for (long i = 0; i < len; ++i) {
      Complex acc{};
      const long lo = std::max(-half, i - len + 1);
      const long hi = std::min(half, i);
      for (long j = lo; j <= hi; ++j)
        acc += g[static_cast<std::size_t>(j + half)] * white[static_cast<std::size_t>(i - j)];
      field.amplitudes[static_cast<std::size_t>(i)] = acc * dx;
    }
  } else {
    field.amplitudes = std::move(white);
  }
  for (std::size_t i = 0; i < n; ++i)
    field.amplitudes[i] *= source.envelope(grid.coordinate(i));
  return field;
}

FrameSimulator::FrameSimulator(const Scenario &scenario)
    : scenario_(scenario), detector_(scenario.detector()) {
  const auto &layout = scenario.layout;
  const double l01 = layout.source_to_aperture(Arm::one);
  const double l02 = layout.source_to_aperture(Arm::two);
  shared_first_segment_ = l01 == l02;
  to_aperture_.emplace_back(scenario.grid, l01, layout.wavelength());
  if (!shared_first_segment_)
    to_aperture_.emplace_back(scenario.grid, l02, layout.wavelength());
  for (Arm a : {Arm::one, Arm::two})
    to_detector_.emplace_back(scenario.grid, layout.aperture_to_detector(a), layout.wavelength());
}

FrameRecord FrameSimulator::simulate(std::uint64_t frame_index) {
  RandomStream stream(frame_stream_seed(scenario_.master_seed, frame_index));
  const ComplexField source = sample_source_field(scenario_.source, scenario_.grid, stream);
  const std::size_t n = scenario_.grid.samples();

  FrameRecord rec;
  rec.intensity1.resize(detector_.count);
  rec.intensity2.resize(detector_.count);
  if (scenario_.field_diagnostics) {
    rec.field1.resize(detector_.count);
    rec.field2.resize(detector_.count);
  }

  std::vector<Complex> at_aperture(n), work(n);
  to_aperture_[0].propagate(source.amplitudes, at_aperture);
  for (Arm a : {Arm::one, Arm::two}) {
    const std::size_t j = arm_index(a);
    if (a == Arm::two && !shared_first_segment_)
      to_aperture_[1].propagate(source.amplitudes, at_aperture);
    const auto &t = scenario_.apertures[a].transmission();
    for (std::size_t i = 0; i < n; ++i)
      work[i] = at_aperture[i] * t[i];
    to_detector_[j].propagate(work, work);

    auto &intensity = a == Arm::one ? rec.intensity1 : rec.intensity2;
    for (std::size_t p = 0; p < detector_.count; ++p)
      intensity[p] = std::norm(work[detector_.first + p]);
    if (scenario_.field_diagnostics) {
      auto &field = a == Arm::one ? rec.field1 : rec.field2;
      std::copy_n(work.begin() + static_cast<std::ptrdiff_t>(detector_.first), detector_.count,
                  field.begin());
    }
  }
  return rec;
}

FrameRecord simulate_frame(const Scenario &scenario, std::uint64_t frame_index) {
  scenario.validate();
  FrameSimulator sim(scenario);
  return sim.simulate(frame_index);
}

CorrelationAccumulator run_ensemble(const Scenario &scenario, unsigned workers) {
  scenario.validate();
  const AccumulatorConfig config = scenario.accumulator_config();
  const std::size_t blocks = (scenario.frames + ensemble_block_frames - 1) / ensemble_block_frames;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));

  CorrelationAccumulator total(config);
  std::map<std::size_t, CorrelationAccumulator> pending;
  std::size_t next_to_fold = 0;
  std::mutex fold_mutex;
  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    try {
      FrameSimulator sim(scenario);
      for (;;) {
        if (failed.load())
          return;
        const std::size_t b = next_block.fetch_add(1);
        if (b >= blocks)
          return;
        CorrelationAccumulator acc(config);
        const std::size_t begin = b * ensemble_block_frames;
        const std::size_t end = std::min(scenario.frames, begin + ensemble_block_frames);
        for (std::size_t f = begin; f < end; ++f)
          acc.update(sim.simulate(f));

        std::lock_guard lock(fold_mutex);
        pending.emplace(b, std::move(acc));
        for (auto it = pending.find(next_to_fold); it != pending.end();
             it = pending.find(next_to_fold)) {
          total.merge(it->second);
          pending.erase(it);
          ++next_to_fold;
        }
      }
    } catch (...) {
      std::lock_guard lock(fold_mutex);
      if (!failure)
        failure = std::current_exception();
      failed.store(true);
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }
  if (failure)
    std::rethrow_exception(failure);
  return total;
}

} // namespace ghostfringe
