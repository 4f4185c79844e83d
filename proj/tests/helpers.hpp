#pragma once

#include <cstdint>
#include <vector>

#include "covo/grid.hpp"
#include "covo/rng.hpp"

namespace covo::testing {

/// Random subset of the grid [0, side)^d at resolution n, each cell kept
/// with probability ~ fill.
inline PixelSet random_pixel_set(CounterRng& rng, int dim, std::int64_t n,
                                 std::int32_t side, double fill = 0.5) {
  std::vector<Cell> cells;
  std::vector<std::int32_t> k(static_cast<std::size_t>(dim), 0);
  while (true) {
    if (rng.next_double() < fill) cells.push_back(make_cell(k));
    int axis = 0;
    while (axis < dim) {
      const auto u = static_cast<std::size_t>(axis);
      ++k[u];
      if (k[u] < side) break;
      k[u] = 0;
      ++axis;
    }
    if (axis == dim) break;
  }
  return PixelSet(dim, n, std::move(cells));
}

/// Random pixel-aligned box window overlapping [0, side)^d.
inline Window random_window(CounterRng& rng, int dim, std::int64_t n,
                            std::int32_t side) {
  std::vector<std::int32_t> lo(static_cast<std::size_t>(dim));
  std::vector<std::int32_t> hi(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const std::int32_t a =
        static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(side))) - 1;
    const std::int32_t len = 1 + static_cast<std::int32_t>(rng.next_below(
                                     static_cast<std::uint64_t>(side)));
    lo[u] = a;
    hi[u] = a + len;
  }
  return Window::box(n, lo, hi);
}

/// Random grid-aligned shift with |k_i| <= reach cells.
inline Shift random_shift(CounterRng& rng, int dim, std::int64_t n,
                          std::int64_t reach) {
  std::vector<std::int64_t> k(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    k[static_cast<std::size_t>(i)] =
        static_cast<std::int64_t>(rng.next_below(2 * reach + 1)) - reach;
  }
  return Shift::of_cells(k, n);
}

}  // namespace covo::testing
