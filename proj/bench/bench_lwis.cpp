// Times the serial and OpenMP weighted-run kernels on the piecewise
// regression model and checks that they agree element for element.
#include <chrono>
#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "lazyppl/inference.hpp"
#include "lazyppl/models.hpp"

using namespace lazyppl;

namespace {

template <class F>
double time_ms(F&& f) {
  auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
  auto data = bundled_regression_dataset().points;
  auto model = bind(regress(0.1, piecewise_linear_prior(0.2), data),
                    [](const RealFn& f) { return pure_meas(f(5.0)); });

  std::vector<Weighted<double>> serial, parallel;
  double t_serial = time_ms([&] { serial = weighted_runs_serial(model, n, 7); });
  double t_parallel =
      time_ms([&] { parallel = weighted_runs_parallel(model, n, 7); });

  bool same = serial.size() == parallel.size();
  for (std::size_t i = 0; same && i < serial.size(); ++i) {
    same = serial[i].value == parallel[i].value &&
           serial[i].log_weight == parallel[i].log_weight;
  }
  std::cout << "runs " << n << "  threads " << omp_get_max_threads() << '\n'
            << "serial   " << t_serial << " ms\n"
            << "parallel " << t_parallel << " ms\n"
            << "speedup  " << t_serial / t_parallel << '\n'
            << "identical " << (same ? "yes" : "no") << '\n';
  return same ? 0 : 1;
}
