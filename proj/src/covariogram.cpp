#include "covo/covariogram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace covo {

namespace {

void check_frame(const PixelSet& a, const Window& w, const char* what) {
  if (a.dim() != w.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
  if (a.resolution() != w.resolution()) {
    throw std::invalid_argument(
        std::string(what) + ": resolution mismatch (set n=" +
        std::to_string(a.resolution()) + ", window n=" +
        std::to_string(w.resolution()) + ")");
  }
}

constexpr std::uint64_t kBitmapThreshold = 256;

}  // namespace

namespace detail {

std::uint64_t covariogram_count_direct(const PixelSet& a,
                                       const std::vector<std::int64_t>& off,
                                       const Window& w) {
  std::uint64_t count = 0;
  const int d = a.dim();
  for (const Cell& c : a.cells()) {
    if (!w.contains_cell(c)) continue;
    Cell partner = c;
    bool in_range = true;
    for (int i = 0; i < d; ++i) {
      const std::int64_t v =
          static_cast<std::int64_t>(c[i]) - off[static_cast<std::size_t>(i)];
      if (v < INT32_MIN || v > INT32_MAX) {
        in_range = false;
        break;
      }
      partner[i] = static_cast<std::int32_t>(v);
    }
    if (in_range && a.contains(partner)) ++count;
  }
  return count;
}

std::uint64_t covariogram_count_bitmap(const PixelSet& a,
                                       const std::vector<std::int64_t>& off,
                                       const Window& w) {
  const int d = a.dim();
  std::vector<std::int32_t> lo, hi;
  if (!a.bounds(lo, hi)) return 0;

  // Row-major bitmap over the bounding box of A, rows along the last axis.
  std::vector<std::int64_t> extent(static_cast<std::size_t>(d));
  std::uint64_t rows = 1;
  for (int i = 0; i < d; ++i) {
    const auto u = static_cast<std::size_t>(i);
    extent[u] = static_cast<std::int64_t>(hi[u]) - lo[u];
    if (i + 1 < d) rows *= static_cast<std::uint64_t>(extent[u]);
  }
  const std::int64_t row_len = extent[static_cast<std::size_t>(d - 1)];
  const std::uint64_t words_per_row =
      static_cast<std::uint64_t>((row_len + 63) / 64);

  std::vector<std::uint64_t> bits_a(rows * words_per_row, 0);
  std::vector<std::uint64_t> bits_shift(rows * words_per_row, 0);
  std::vector<std::uint64_t> bits_w(rows * words_per_row, 0);

  auto row_index = [&](const Cell& c) -> std::int64_t {
    std::int64_t r = 0;
    for (int i = 0; i < d - 1; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const std::int64_t v = static_cast<std::int64_t>(c[i]) - lo[u];
      if (v < 0 || v >= extent[u]) return -1;
      r = r * extent[u] + v;
    }
    return r;
  };
  auto set_bit = [&](std::vector<std::uint64_t>& bits, std::int64_t row,
                     std::int64_t col) {
    bits[static_cast<std::uint64_t>(row) * words_per_row +
         static_cast<std::uint64_t>(col / 64)] |= 1ULL << (col % 64);
  };

  for (const Cell& c : a.cells()) {
    const std::int64_t r = row_index(c);
    const std::int64_t col = static_cast<std::int64_t>(c[d - 1]) -
                             lo[static_cast<std::size_t>(d - 1)];
    set_bit(bits_a, r, col);
    if (w.contains_cell(c)) set_bit(bits_w, r, col);
    // Bitmap of off + A, clipped to the same bounding box.
    Cell shifted = c;
    bool ok = true;
    for (int i = 0; i < d; ++i) {
      const std::int64_t v =
          static_cast<std::int64_t>(c[i]) + off[static_cast<std::size_t>(i)];
      if (v < INT32_MIN || v > INT32_MAX) {
        ok = false;
        break;
      }
      shifted[i] = static_cast<std::int32_t>(v);
    }
    if (!ok) continue;
    const std::int64_t rs = row_index(shifted);
    if (rs < 0) continue;
    const std::int64_t cs = static_cast<std::int64_t>(shifted[d - 1]) -
                            lo[static_cast<std::size_t>(d - 1)];
    if (cs < 0 || cs >= row_len) continue;
    set_bit(bits_shift, rs, cs);
  }

  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < bits_a.size(); ++i) {
    count += static_cast<std::uint64_t>(
        std::popcount(bits_a[i] & bits_shift[i] & bits_w[i]));
  }
  return count;
}

}  // namespace detail

std::uint64_t local_covariogram_count(const PixelSet& a, const Shift& y,
                                      const Window& w) {
  check_frame(a, w, "local_covariogram");
  if (y.dim() != a.dim()) {
    throw std::invalid_argument("local_covariogram: shift dimension mismatch");
  }
  const std::vector<std::int64_t> off = y.cell_offsets(a.resolution());
  if (a.size() <= kBitmapThreshold) {
    return detail::covariogram_count_direct(a, off, w);
  }
  return detail::covariogram_count_bitmap(a, off, w);
}

double local_covariogram(const PixelSet& a, const Shift& y, const Window& w) {
  return scaled_count(local_covariogram_count(a, y, w), a.resolution(), a.dim());
}

double local_covariogram(const PixelSet& a, const CovariogramQuery& q) {
  return local_covariogram(a, q.y, q.window);
}

SigmaValue sigma(const PixelSet& a, const Shift& u, const Window& w) {
  check_frame(a, w, "sigma");
  if (u.is_zero()) throw std::invalid_argument("sigma requires u != 0");
  const int axis = u.single_axis();
  if (axis < 0) {
    throw std::invalid_argument("sigma requires an axis-aligned u, got " +
                                u.describe());
  }
  const std::vector<std::int64_t> off = u.cell_offsets(a.resolution());
  const std::int64_t m = off[static_cast<std::size_t>(axis)];

  const Window w_minus = erode_segment_cells(w, axis, -m);  // W - [-u, 0]
  const Window w_plus = erode_segment_cells(w, axis, m);    // W - [0, u]
  const Shift zero = Shift::zero(a.dim());

  const std::int64_t c0m =
      static_cast<std::int64_t>(local_covariogram_count(a, zero, w_minus));
  const std::int64_t cum =
      static_cast<std::int64_t>(local_covariogram_count(a, u, w_minus));
  const std::int64_t c0p =
      static_cast<std::int64_t>(local_covariogram_count(a, zero, w_plus));
  const std::int64_t cup =
      static_cast<std::int64_t>(local_covariogram_count(a, u.negated(), w_plus));

  SigmaValue out;
  out.count = (c0m - cum) + (c0p - cup);
  const std::uint64_t abs_m = static_cast<std::uint64_t>(m < 0 ? -m : m);
  out.denominator = ipow_checked(a.resolution(), a.dim() - 1) * abs_m;
  out.value = static_cast<double>(out.count) / static_cast<double>(out.denominator);
  return out;
}

std::uint64_t boundary_face_count(const PixelSet& a, int axis, const Window& w) {
  check_frame(a, w, "boundary_face_count");
  std::uint64_t count = 0;
  for (const Cell& c : a.cells()) {
    Cell up = c;
    up[axis] += 1;
    if (!a.contains(up) && w.contains_face_center(c, axis)) ++count;
    Cell down = c;
    down[axis] -= 1;
    if (!a.contains(down) && w.contains_face_center(down, axis)) ++count;
  }
  return count;
}

DirectionalVariation directional_variation(const PixelSet& a, int axis,
                                           const Window& w) {
  check_frame(a, w, "directional_variation");
  if (axis < 0 || axis >= a.dim()) {
    throw std::invalid_argument("directional_variation: axis out of range");
  }
  DirectionalVariation out;
  out.face_count = boundary_face_count(a, axis, w);
  out.denominator = ipow_checked(a.resolution(), a.dim() - 1);
  out.value =
      static_cast<double>(out.face_count) / static_cast<double>(out.denominator);

  // Cross-check against the covariogram difference at one cell side. The two
  // integer counts coincide for pixel-aligned data; a mismatch is a defect.
  const SigmaValue s = sigma(
      a, Shift::axis(a.dim(), axis, Rat(1, a.resolution())), w);
  if (s.count < 0 ||
      static_cast<std::uint64_t>(s.count) != out.face_count) {
    throw std::logic_error(
        "directional_variation: face counting and sigma disagree (" +
        std::to_string(out.face_count) + " vs " + std::to_string(s.count) + ")");
  }
  return out;
}

PerimeterValue perimeter_B(const PixelSet& a, const Window& w) {
  PerimeterValue out;
  out.denominator = ipow_checked(a.resolution(), a.dim() - 1);
  std::uint64_t total = 0;
  for (int j = 0; j < a.dim(); ++j) {
    const DirectionalVariation v = directional_variation(a, j, w);
    out.face_count_per_axis.push_back(v.face_count);
    total += v.face_count;
  }
  out.value = static_cast<double>(total) / static_cast<double>(out.denominator);
  return out;
}

double perimeter(const PixelSet& a, const Window& w) {
  // Pixel boundaries are axis-aligned, so the isotropic and anisotropic
  // perimeters coincide.
  return perimeter_B(a, w).value;
}

double beta_weight(std::int64_t m, int d) {
  return std::ldexp(1.0, static_cast<int>(-m)) *
         std::pow(2.0 * static_cast<double>(m), -d);
}

double beta_tail(std::int64_t p, int d, double* remainder_bound) {
  double sum = 0.0;
  std::int64_t m = p + 1;
  double term = beta_weight(m, d);
  // Terms at least halve each step, so the part beyond the last added term
  // is bounded by twice the next term.
  while (term > sum * 1e-20 && term > 1e-320) {
    sum += term;
    ++m;
    term = beta_weight(m, d);
  }
  if (remainder_bound) *remainder_bound = 2.0 * term;
  return sum;
}

namespace {

// Smallest M with closure(A) inside (-M, M)^d; 1 for the empty set.
std::int64_t enclosing_cube_index(const PixelSet& a) {
  std::vector<std::int32_t> lo, hi;
  if (!a.bounds(lo, hi)) return 1;
  std::int64_t extreme = 1;
  for (int i = 0; i < a.dim(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    const std::int64_t alo = lo[u] < 0 ? -static_cast<std::int64_t>(lo[u])
                                       : static_cast<std::int64_t>(lo[u]);
    const std::int64_t ahi = hi[u] < 0 ? -static_cast<std::int64_t>(hi[u])
                                       : static_cast<std::int64_t>(hi[u]);
    extreme = std::max(extreme, std::max(alo, ahi));
  }
  // Strict inclusion: faces at coordinate extreme/n must be interior to U_M.
  return extreme / a.resolution() + 1;
}

}  // namespace

WeightedPerimeterValue weighted_perimeter(const PixelSet& a) {
  WeightedPerimeterValue out;
  const std::int64_t n = a.resolution();
  out.m_star = enclosing_cube_index(a);

  double finite_part = 0.0;
  PerimeterValue total;
  for (std::int64_t m = 1; m <= out.m_star; ++m) {
    const PerimeterValue pm = perimeter_B(a, Window::centered_cube(a.dim(), n, m));
    finite_part += beta_weight(m, a.dim()) * pm.value;
    if (m == out.m_star) total = pm;
  }
  out.tail_coefficient = beta_tail(out.m_star, a.dim(), &out.tail_remainder);
  out.tail_remainder *= total.value;
  out.value = finite_part + out.tail_coefficient * total.value;
  out.face_count_per_axis = total.face_count_per_axis;
  return out;
}

GnpValue g_np(const PixelSet& a, std::int64_t n, std::int64_t p) {
  if (a.resolution() != n) {
    throw std::invalid_argument("g_np: set resolution " +
                                std::to_string(a.resolution()) +
                                " does not match n=" + std::to_string(n));
  }
  if (p < 1) throw std::invalid_argument("g_np: p must be >= 1");
  const int d = a.dim();

  GnpValue out;
  double acc = 0.0;
  for (std::int64_t m = 1; m <= p; ++m) {
    const Window um = Window::centered_cube(d, n, m);
    double dir_sum = 0.0;
    for (int j = 0; j < d; ++j) {
      dir_sum += sigma(a, Shift::axis(d, j, Rat(1, n)), um).value;
    }
    acc += beta_weight(m, d) * dir_sum;
  }

  // Tail window U_n^p = (-p - 1/n, p + 1/n)^d, bounds +-(p*n + 1) in cells.
  const std::int64_t r = p * n + 1;
  std::vector<std::int32_t> lo(static_cast<std::size_t>(d),
                               static_cast<std::int32_t>(-r));
  std::vector<std::int32_t> hi(static_cast<std::size_t>(d),
                               static_cast<std::int32_t>(r));
  const Window unp = Window::box(n, lo, hi);
  double dir_sum = 0.0;
  for (int j = 0; j < d; ++j) {
    dir_sum += sigma(a, Shift::axis(d, j, Rat(1, n)), unp).value;
  }
  out.tail_coefficient = beta_tail(p, d, &out.tail_remainder);
  out.tail_remainder *= dir_sum;
  out.value = acc + out.tail_coefficient * dir_sum;
  return out;
}

double E_np(std::int64_t n, std::int64_t p, int d) {
  const double pd = static_cast<double>(p);
  return 8.0 * d * static_cast<double>(n) * std::ldexp(1.0, static_cast<int>(-p)) *
         std::pow(pd + 1.0, -d) *
         (std::pow(pd + 1.0 / static_cast<double>(n), d) - std::pow(pd, d));
}

ContinuityReport continuity_bounds_check(const PixelSet& a, const PixelSet& b,
                                         const CovariogramQuery& q,
                                         const Window& u) {
  const std::int64_t n = a.resolution();
  const int d = a.dim();
  const Window& w = q.window;

  const double delta_a_u = local_covariogram(a, q.y, u);
  const double delta_a_w = local_covariogram(a, q.y, w);
  const double delta_b_w = local_covariogram(b, q.y, w);

  // L^d(U /\ W): both windows are pixel-aligned, boundary strata are null.
  std::vector<Cell> uc = u.cells();
  std::vector<Cell> wc = w.cells();
  std::vector<Cell> sym;
  std::set_symmetric_difference(uc.begin(), uc.end(), wc.begin(), wc.end(),
                                std::back_inserter(sym));
  const double window_rhs = scaled_count(sym.size(), n, d);

  // 2 L^d((A /\ B) n (W u (-y+W))).
  const Window domain = w.union_with(w.translated(q.y.negated()));
  std::vector<Cell> ab_sym;
  std::set_symmetric_difference(a.cells().begin(), a.cells().end(),
                                b.cells().begin(), b.cells().end(),
                                std::back_inserter(ab_sym));
  std::uint64_t inside = 0;
  for (const Cell& c : ab_sym) {
    if (domain.contains_cell(c)) ++inside;
  }
  const double set_rhs = 2.0 * scaled_count(inside, n, d);

  ContinuityReport rep;
  rep.window_bound.lhs = std::abs(delta_a_u - delta_a_w);
  rep.window_bound.rhs = window_rhs;
  rep.window_bound.margin = rep.window_bound.rhs - rep.window_bound.lhs;

  rep.set_bound.lhs = std::abs(delta_a_w - delta_b_w);
  rep.set_bound.rhs = set_rhs;
  rep.set_bound.margin = rep.set_bound.rhs - rep.set_bound.lhs;

  rep.combined_bound.lhs = std::abs(delta_a_u - delta_b_w);
  rep.combined_bound.rhs = window_rhs + set_rhs;
  rep.combined_bound.margin = rep.combined_bound.rhs - rep.combined_bound.lhs;
  return rep;
}

}  // namespace covo
