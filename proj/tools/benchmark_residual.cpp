// Times the curvilinear residual with the serial path and with OpenMP worker
// threads, and checks the results are bitwise identical.
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "mhddg/driver.hpp"
#include "mhddg/timeint.hpp"

using namespace mhddg;

int main(int argc, char **argv) {
  int threads = 4;
  int reps = 5;
  int K = 6, N = 3;
  if (argc > 1) threads = std::atoi(argv[1]);
  if (argc > 2) reps = std::atoi(argv[2]);
  if (argc > 3) K = std::atoi(argv[3]);
  if (argc > 4) N = std::atoi(argv[4]);

  MappingSpec spec;
  spec.alpha = 0.075;
  spec.N_geo = 2;
  spec.elems = {K, K, K};
  const CurvMesh mesh = build_mesh(spec, NodeKind::Gauss, N);

  SchemeConfig cfg;
  cfg.nodes = NodeKind::Gauss;
  cfg.N = N;
  cfg.es_surface = true;
  const Field u = random_smooth_field(mesh, cfg.gas, 2024);
  cfg.c_h = compute_ch(u, mesh, cfg.gas);

  auto time_it = [&](int nthreads) {
    Field r;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) r = residual_3d(u, mesh, cfg, nthreads);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
    return std::pair<double, Field>(ms, std::move(r));
  };

  const auto [ms_serial, r_serial] = time_it(1);
  const auto [ms_parallel, r_parallel] = time_it(threads);

  bool identical = true;
  for (size_t i = 0; i < r_serial.data.size() && identical; ++i)
    for (int v = 0; v < kNumVars; ++v)
      if (r_serial.data[i][v] != r_parallel.data[i][v]) {
        identical = false;
        break;
      }

  std::cout << "elements " << mesh.K << ", degree " << N << "\n";
  std::cout << "serial:   " << ms_serial << " ms/residual\n";
  std::cout << "threads=" << threads << ": " << ms_parallel << " ms/residual (speedup "
            << ms_serial / ms_parallel << "x)\n";
  std::cout << "bitwise identical: " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
