// Micro-benchmark comparing the serial reference kernels with the OpenMP
// parallel paths: Pauli trace decomposition, statevector rotations, and
// subspace Hamiltonian assembly.
#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rovib/pauli.hpp"
#include "rovib/qsci.hpp"
#include "rovib/statevector.hpp"
#include "rovib/watson.hpp"

using namespace rovib;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e100;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = clk::now();
    f();
    best = std::min(best, seconds(t0, clk::now()));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string model_path = argc > 1 ? argv[1] : "data/h2o.model";
  const auto model = load_model(model_path);
  const auto frame = derive_frame(model);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup");

  {  // trace decomposition, vmax=3 J=1 -> 8 qubits
    const QubitLayout lay(model.n_modes(), 3, 1);
    const auto H = build_full(model, frame, 3, 1);
    const auto Hq = pad_to_qubit_space(H, lay);
    const double ts = time_best_of(2, [&] {
      pauli_decompose_trace(Hq, lay.nq(), kPauliDropFloorCm1, Exec::Serial);
    });
    const double tp = time_best_of(2, [&] {
      pauli_decompose_trace(Hq, lay.nq(), kPauliDropFloorCm1, Exec::Parallel);
    });
    std::printf("%-34s %10.4f %10.4f %8.2f\n", "pauli_decompose_trace (nq=8)", ts, tp, ts / tp);
  }

  {  // statevector rotations on 18 qubits
    const int nq = 18;
    Statevector s(nq);
    std::mt19937_64 rng(42);
    for (auto& a : s.amp) a = cxd(canonical_u01(rng()) - 0.5, canonical_u01(rng()) - 0.5);
    const double n = s.norm();
    for (auto& a : s.amp) a /= n;
    std::vector<PauliString> ps;
    for (int i = 0; i < 24; ++i) {
      std::uint64_t code = 0;
      for (int j = 0; j < nq; ++j) code |= (rng() & 3ull) << (2 * j);
      ps.push_back({code, nq});
    }
    auto run = [&](Exec ex) {
      Statevector t = s;
      for (const auto& p : ps) apply_pauli_rotation(t, p, 0.1, ex);
    };
    const double ts = time_best_of(3, [&] { run(Exec::Serial); });
    const double tp = time_best_of(3, [&] { run(Exec::Parallel); });
    std::printf("%-34s %10.4f %10.4f %8.2f\n", "apply_pauli_rotation (nq=18,x24)", ts, tp,
                ts / tp);
  }

  {  // subspace Hamiltonian fill, 200 states at vmax=7
    HamiltonianEvaluator ev(model, frame, 7, 0);
    BasisIndexer idx(model.n_modes(), 7, 0);
    BasisSet omega;
    for (int i = 0; i < idx.dim() && omega.size() < 200; i += 2)
      omega.states.push_back(idx.state(i));
    const double ts =
        time_best_of(2, [&] { subspace_hamiltonian(omega, ev, Exec::Serial); });
    const double tp =
        time_best_of(2, [&] { subspace_hamiltonian(omega, ev, Exec::Parallel); });
    std::printf("%-34s %10.4f %10.4f %8.2f\n", "subspace_hamiltonian (|W|=200)", ts, tp,
                ts / tp);
  }

  {  // full dense assembly at vmax=7
    const double ts = time_best_of(2, [&] { build_full(model, frame, 7, 0, Exec::Serial); });
    const double tp = time_best_of(2, [&] { build_full(model, frame, 7, 0, Exec::Parallel); });
    std::printf("%-34s %10.4f %10.4f %8.2f\n", "build_full (vmax=7)", ts, tp, ts / tp);
  }
  return 0;
}
