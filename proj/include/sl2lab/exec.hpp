#pragma once

#include <cstddef>

namespace sl2lab {

// Serial path is the reference implementation; the parallel path must produce
// bit-identical results because every loop body writes only its own index and
// draws only from its own hashed sub-seed.
enum class Exec { serial, parallel };

template <class F>
void for_each_index(std::size_t n, Exec ex, F&& body) {
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < (long long)n; ++i) body((std::size_t)i);
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace sl2lab
