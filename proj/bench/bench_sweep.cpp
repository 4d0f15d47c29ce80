// Times the OpenMP sweep kernel against the serial reference loop on
// figure-sized grids and checks that the two produce bit-identical rows.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "garouter/analysis.hpp"

using namespace garouter;

namespace {

std::uint64_t bits(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

bool identical(const SweepResult& a, const SweepResult& b) {
  if (a.points.size() != b.points.size()) return false;
  for (size_t i = 0; i < a.points.size(); ++i) {
    const auto& pa = a.points[i].probs;
    const auto& pb = b.points[i].probs;
    if (bits(pa.reflect_a) != bits(pb.reflect_a) ||
        bits(pa.transmit_a) != bits(pb.transmit_a) ||
        bits(pa.transfer_back) != bits(pb.transfer_back) ||
        bits(pa.transfer_fwd) != bits(pb.transfer_fwd) ||
        bits(a.points[i].deviation) != bits(b.points[i].deviation))
      return false;
  }
  return true;
}

template <typename F>
double seconds(F&& f, SweepResult& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void run_case(const char* label, const SweepSpec& spec) {
  SweepResult serial, parallel;
  const double ts = seconds([&] { return run_sweep_serial(spec); }, serial);
  const double tp =
      seconds([&] { return run_sweep(spec, thread_cap_from_env()); }, parallel);
  std::printf("%-34s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   "
              "rows identical: %s\n",
              label, ts, tp, ts / tp, identical(serial, parallel) ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const int steps = argc > 1 ? std::atoi(argv[1]) : 40000;

  SweepSpec closed;
  closed.base.n_sites = closed.base.m_atoms = 8;
  closed.base.j_coupling = 0.01;
  closed.base.g = 1.5;
  closed.axis1 = SweepAxis{AxisKind::Energy, -1.999, 1.999, steps, {}};
  closed.solver = SolverChoice::ClosedForm;
  run_case(("closed form, 1D x " + std::to_string(steps)).c_str(), closed);

  SweepSpec both = closed;
  both.axis1.steps = steps / 20;
  both.solver = SolverChoice::Both;
  run_case(("dual solver, 1D x " + std::to_string(steps / 20)).c_str(), both);

  SweepSpec grid = closed;
  grid.axis1.steps = 801;
  grid.axis2 = SweepAxis{AxisKind::NSites, 2, 20, 19, {}};
  run_case("closed form, 801 x 19 map", grid);
  return 0;
}
