// Wall-clock comparison of the OpenMP kernels with their serial references.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "curvyaqm/provisioning.hpp"
#include "curvyaqm/sim.hpp"
#include "curvyaqm/steady_state.hpp"

using namespace curvyaqm;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (s < best) best = s;
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-8s serial %9.4f s  parallel %9.4f s  speedup %5.2fx\n", name,
              serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());

  const auto tm = TrafficModel::reno(12000.0, 0.020);
  const auto dp = DesignPoint::create(0.020, 0.02);
  std::vector<double> us;
  for (int i = 0; i < 32; ++i) us.push_back(0.5 + 0.5 * i);
  const auto grid = log_grid(0.01, 10.0, 4000);

  CurveFamily fam_ser, fam_par;
  const double fs = best_of(
      reps, [&] { fam_ser = generate_family_serial(tm, dp, us, true, grid); });
  const double fp =
      best_of(reps, [&] { fam_par = generate_family(tm, dp, us, true, grid); });
  report("family", fs, fp);
  bool same = fam_ser.points == fam_par.points;

  std::vector<SimConfig> cfgs;
  for (int n : {8, 16, 32, 64}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      SimConfig cfg;
      cfg.traffic = tm;
      cfg.n_flows = n;
      cfg.capacity = required_capacity({tm, dp, static_cast<double>(n)});
      cfg.aqm = anchored_curve(dp, 2.0);
      cfg.seed = seed;
      cfgs.push_back(cfg);
    }
  }
  std::vector<SimResult> ser, par;
  const double bs = best_of(reps, [&] { ser = run_batch_serial(cfgs); });
  const double bp = best_of(reps, [&] { par = run_batch(cfgs); });
  report("batch", bs, bp);
  same = same && ser == par;

  std::printf("results identical: %s\n", same ? "yes" : "no");
  return same ? 0 : 1;
}
