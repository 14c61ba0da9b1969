// Compares the OpenMP kernels against their serial reference implementations
// on realistic layer shapes. The two paths must produce bit-identical output;
// this harness checks that while timing them.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "symw/channel.hpp"
#include "symw/dof_codec.hpp"
#include "symw/symmetry.hpp"

using namespace symw;

namespace {

double now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now();
    fn();
    best = std::min(best, now() - t0);
  }
  return best;
}

WeightTensor make_input(std::uint32_t c_out, std::uint32_t c_in, std::uint16_t k) {
  WeightTensor w = WeightTensor::zeros(c_out, c_in, k);
  std::mt19937_64 rng(1234);
  for (float& v : w.data) {
    v = static_cast<float>(2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0);
  }
  return w;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   %s\n", name,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = (argc > 1) ? std::atoi(argv[1]) : 5;
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  const WeightTensor w = make_input(256, 128, 5);
  bool all_identical = true;

  for (SymmetryKind kind : {SymmetryKind::CentralEven, SymmetryKind::CentralSkew,
                            SymmetryKind::Rot90, SymmetryKind::Toeplitz}) {
    const OrbitMap map = orbit_map(kind, w.k);

    WeightTensor out_serial, out_parallel;
    const double ts = time_best_of(reps, [&] { out_serial = project_serial(w, map); });
    const double tp = time_best_of(reps, [&] { out_parallel = project(w, map); });
    const bool same = out_serial.data == out_parallel.data;
    all_identical = all_identical && same;
    char label[64];
    std::snprintf(label, sizeof(label), "project/%s", std::string(to_string(kind)).c_str());
    report(label, ts, tp, same);

    std::vector<float> reps_serial, reps_parallel;
    const double es = time_best_of(reps, [&] { reps_serial = extract_dof_serial(w, map); });
    const double ep = time_best_of(reps, [&] { reps_parallel = extract_dof(w, map); });
    const bool esame = reps_serial == reps_parallel;
    all_identical = all_identical && esame;
    std::snprintf(label, sizeof(label), "extract_dof/%s", std::string(to_string(kind)).c_str());
    report(label, es, ep, esame);
  }

  // channel corruption across a few hundred frames
  ChannelConfig cfg;
  cfg.snr_db = 5.0;
  cfg.seed = 99;
  std::vector<std::uint8_t> payload(120000);
  std::mt19937_64 rng(7);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
  const auto packets = packetize(payload, 1, 0, cfg);

  std::vector<Frame> rx_serial, rx_parallel;
  const double cs = time_best_of(reps, [&] { rx_serial = transmit_serial(packets, cfg); });
  const double cp = time_best_of(reps, [&] { rx_parallel = transmit(packets, cfg); });
  const bool csame = rx_serial == rx_parallel;
  all_identical = all_identical && csame;
  report("transmit/snr5", cs, cp, csame);

  if (!all_identical) {
    std::fprintf(stderr, "parallel kernels diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
