// Compares the OpenMP kernels against the serial reference paths.

#include <chrono>
#include <cstdio>

#include "sl2lab/embed.hpp"
#include "sl2lab/measure.hpp"
#include "sl2lab/tridiag.hpp"

using namespace sl2lab;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double timed(F&& f) {
  auto t0 = clk::now();
  f();
  return seconds(t0, clk::now());
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-18s serial %8.3fs   parallel %8.3fs   speedup %.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
  EnergyFamily anderson = direct_family({-1.0, 1.0}, {0.5, 0.5});
  FiniteMeasure mu = family_measure(anderson, 0.3);

  {
    auto run = [&](Exec ex) { lyapunov_mc(mu, 20000, 400, 7, ex); };
    double ts = timed([&] { run(Exec::serial); });
    double tp = timed([&] { run(Exec::parallel); });
    report("lyapunov_mc", ts, tp);
  }

  {
    std::vector<double> energies;
    for (int i = 0; i <= 40; ++i) energies.push_back(-3.0 + 6.0 * i / 40.0);
    auto run = [&](Exec ex) { finite_ids(anderson, 600, energies, 60, 7, ex); };
    double ts = timed([&] { run(Exec::serial); });
    double tp = timed([&] { run(Exec::parallel); });
    report("finite_ids", ts, tp);
  }

  {
    auto run = [&](Exec ex) { thouless_gap(anderson, 0.3, 700, 40, 7, 1e-12, ex); };
    double ts = timed([&] { run(Exec::serial); });
    double tp = timed([&] { run(Exec::parallel); });
    report("thouless_gap", ts, tp);
  }

  return 0;
}
