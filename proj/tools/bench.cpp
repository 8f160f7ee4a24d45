// Timing comparison between the serial reference kernels and their OpenMP
// counterparts: batch conventional tip estimation and stream simulation.

#include <chrono>
#include <cstdio>
#include <vector>

#include "fbgtpe/shape_recon.hpp"
#include "fbgtpe/simulator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace fbgtpe;

namespace {

sensor::SensorGeometry nominal_geometry() {
  sensor::SensorGeometry g;
  g.fiber_count = 3;
  g.nodes_per_fiber = 3;
  g.radial_offsets_mm = {0.5, 0.5, 0.5};
  const double third = 2.0 * 3.14159265358979323846 / 3.0;
  g.angular_gaps_rad = {third, third};
  g.node_arc_positions_mm = {9.0, 18.0, 27.0};
  g.base_wavelengths_nm = {1529, 1533, 1537, 1541, 1545, 1549, 1553, 1557, 1561};
  g.strain_optic_coefficient = 0.22;
  g.sensor_length_mm = 35.5;
  g.center_offset_mm = 2.0;
  g.cdm_length_mm = 35.5;
  return g;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both paths run serially\n");
#endif

  const auto geom = nominal_geometry();
  auto scenario = sim::BendingScenario::paper_default(7);
  scenario.duration_s = 30.0;

  std::printf("\n%-34s %10s %10s %8s\n", "kernel", "serial_s", "openmp_s", "speedup");

  {
    auto t0 = std::chrono::steady_clock::now();
    const auto serial = sim::simulate(scenario, geom, Exec::serial);
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto parallel = sim::simulate(scenario, geom, Exec::parallel);
    const double tp = seconds_since(t0);
    bool identical = serial.wavelengths.size() == parallel.wavelengths.size() &&
                     serial.truth.size() == parallel.truth.size();
    for (std::size_t i = 0; identical && i < serial.truth.size(); ++i)
      identical = serial.truth[i].position_mm == parallel.truth[i].position_mm;
    std::printf("%-34s %10.3f %10.3f %7.2fx %s\n", "simulate (streams + truth)", ts, tp,
                ts / tp, identical ? "" : "MISMATCH");

    // batch conventional reconstruction over the generated frames
    std::vector<sensor::WavelengthFrame> frames(serial.wavelengths.begin(),
                                                serial.wavelengths.begin() + 1000);
    recon::EstimatorOptions opts;
    t0 = std::chrono::steady_clock::now();
    const auto tips_serial =
        recon::estimate_tips_batch_serial(frames, serial.estimator_geometry, opts);
    const double rs = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto tips_parallel =
        recon::estimate_tips_batch(frames, serial.estimator_geometry, opts);
    const double rp = seconds_since(t0);
    bool same = tips_serial.size() == tips_parallel.size();
    for (std::size_t i = 0; same && i < tips_serial.size(); ++i)
      same = tips_serial[i] == tips_parallel[i];
    std::printf("%-34s %10.3f %10.3f %7.2fx %s\n", "tip estimation (1000 frames)", rs, rp,
                rs / rp, same ? "" : "MISMATCH");
  }
  return 0;
}
