#include "covo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace covo {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    fail("dimension must be in [1," + std::to_string(kMaxDim) + "], got " +
         std::to_string(dim));
  }
}

void check_res(std::int64_t n) {
  if (n < 1) fail("resolution must be a positive integer, got " + std::to_string(n));
}

void check_same_frame(int da, std::int64_t na, int db, std::int64_t nb,
                      const char* what) {
  if (da != db) {
    fail(std::string(what) + ": dimension mismatch (" + std::to_string(da) +
         " vs " + std::to_string(db) + ")");
  }
  if (na != nb) {
    fail(std::string(what) + ": resolution mismatch (n=" + std::to_string(na) +
         " vs n=" + std::to_string(nb) + ")");
  }
}

std::int32_t checked_add32(std::int64_t a, std::int64_t b) {
  const std::int64_t s = a + b;
  if (s < std::numeric_limits<std::int32_t>::min() ||
      s > std::numeric_limits<std::int32_t>::max()) {
    fail("cell index overflow");
  }
  return static_cast<std::int32_t>(s);
}

}  // namespace

// ---- Rat -------------------------------------------------------------------

Rat::Rat(std::int64_t n, std::int64_t d) {
  if (d == 0) fail("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = (g != 0) ? n / g : 0;
  den = (g != 0) ? d / g : 1;
}

Rat Rat::parse(const std::string& text) {
  if (text.empty()) fail("empty number");
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = (text[pos] == '-');
    ++pos;
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool any_digit = false;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (seen_dot) fail("malformed number '" + text + "'");
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') fail("malformed number '" + text + "'");
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
    any_digit = true;
  }
  if (!any_digit) fail("malformed number '" + text + "'");
  return Rat(negative ? -num : num, den);
}

// ---- Shift -----------------------------------------------------------------

Shift::Shift(std::vector<Rat> coords) : coords_(std::move(coords)) {
  check_dim(static_cast<int>(coords_.size()));
}

Shift Shift::zero(int dim) {
  check_dim(dim);
  return Shift(std::vector<Rat>(static_cast<std::size_t>(dim)));
}

Shift Shift::of_cells(const std::vector<std::int64_t>& k, std::int64_t n) {
  check_res(n);
  std::vector<Rat> c;
  c.reserve(k.size());
  for (std::int64_t v : k) c.push_back(Rat(v, n));
  return Shift(std::move(c));
}

Shift Shift::axis(int dim, int axis, Rat value) {
  Shift s = zero(dim);
  s.coords_[static_cast<std::size_t>(axis)] = value;
  return s;
}

bool Shift::is_zero() const {
  for (const Rat& r : coords_)
    if (!r.is_zero()) return false;
  return true;
}

Shift Shift::negated() const {
  std::vector<Rat> c;
  c.reserve(coords_.size());
  for (const Rat& r : coords_) c.push_back(r.negated());
  return Shift(std::move(c));
}

bool Shift::aligned_to(std::int64_t n) const {
  for (const Rat& r : coords_) {
    if ((r.num * n) % r.den != 0) return false;
  }
  return true;
}

std::vector<std::int64_t> Shift::cell_offsets(std::int64_t n) const {
  std::vector<std::int64_t> off;
  off.reserve(coords_.size());
  for (const Rat& r : coords_) {
    const std::int64_t scaled = r.num * n;
    if (scaled % r.den != 0) {
      fail("shift " + describe() + " is not aligned to the 1/" +
           std::to_string(n) +
           " grid; refine the set (and window) so every coordinate becomes a "
           "multiple of the cell side");
    }
    off.push_back(scaled / r.den);
  }
  return off;
}

int Shift::single_axis() const {
  int axis = -1;
  for (int i = 0; i < dim(); ++i) {
    if (!coords_[static_cast<std::size_t>(i)].is_zero()) {
      if (axis >= 0) return -1;
      axis = i;
    }
  }
  return axis;
}

std::string Shift::describe() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim(); ++i) {
    if (i) os << ", ";
    const Rat& r = coords_[static_cast<std::size_t>(i)];
    os << r.num;
    if (r.den != 1) os << '/' << r.den;
  }
  os << ')';
  return os.str();
}

Cell make_cell(const std::vector<std::int32_t>& coords) {
  check_dim(static_cast<int>(coords.size()));
  Cell c;
  for (std::size_t i = 0; i < coords.size(); ++i) c.k[i] = coords[i];
  return c;
}

// ---- Window ----------------------------------------------------------------

Window::Window(int dim, std::int64_t resolution, std::vector<Box> boxes)
    : dim_(dim), res_(resolution), boxes_(std::move(boxes)) {
  check_dim(dim_);
  check_res(res_);
  for (const Box& b : boxes_) {
    if (static_cast<int>(b.lo.size()) != dim_ ||
        static_cast<int>(b.hi.size()) != dim_) {
      fail("window box has wrong dimension");
    }
    for (int i = 0; i < dim_; ++i) {
      if (b.lo[static_cast<std::size_t>(i)] >= b.hi[static_cast<std::size_t>(i)])
        fail("window box must have lo < hi in every coordinate");
    }
  }
}

Window Window::box(std::int64_t resolution, const std::vector<std::int32_t>& lo,
                   const std::vector<std::int32_t>& hi) {
  return Window(static_cast<int>(lo.size()), resolution, {Box{lo, hi}});
}

Window Window::unit(int dim, std::int64_t resolution) {
  std::vector<std::int32_t> lo(static_cast<std::size_t>(dim), 0);
  std::vector<std::int32_t> hi(static_cast<std::size_t>(dim),
                               static_cast<std::int32_t>(resolution));
  return box(resolution, lo, hi);
}

Window Window::centered_cube(int dim, std::int64_t resolution, std::int64_t m) {
  const std::int64_t r = m * resolution;
  if (r > std::numeric_limits<std::int32_t>::max()) fail("window too large");
  std::vector<std::int32_t> lo(static_cast<std::size_t>(dim),
                               static_cast<std::int32_t>(-r));
  std::vector<std::int32_t> hi(static_cast<std::size_t>(dim),
                               static_cast<std::int32_t>(r));
  return box(resolution, lo, hi);
}

Window Window::empty(int dim, std::int64_t resolution) {
  return Window(dim, resolution, {});
}

bool Window::contains_cell(const Cell& c) const {
  for (const Box& b : boxes_) {
    bool inside = true;
    for (int i = 0; i < dim_ && inside; ++i) {
      const auto u = static_cast<std::size_t>(i);
      inside = b.lo[u] <= c[i] && c[i] + 1 <= b.hi[u];
    }
    if (inside) return true;
  }
  return false;
}

bool Window::contains_face_center(const Cell& c, int axis) const {
  for (const Box& b : boxes_) {
    bool inside = true;
    for (int i = 0; i < dim_ && inside; ++i) {
      const auto u = static_cast<std::size_t>(i);
      if (i == axis) {
        inside = b.lo[u] <= c[i] && c[i] + 2 <= b.hi[u];
      } else {
        inside = b.lo[u] <= c[i] && c[i] + 1 <= b.hi[u];
      }
    }
    if (inside) return true;
  }
  return false;
}

std::vector<Cell> Window::cells() const {
  std::unordered_set<Cell, CellHash> seen;
  for (const Box& b : boxes_) {
    Cell c;
    for (int i = 0; i < dim_; ++i) c[i] = b.lo[static_cast<std::size_t>(i)];
    while (true) {
      seen.insert(c);
      int axis = 0;
      while (axis < dim_) {
        ++c[axis];
        if (c[axis] < b.hi[static_cast<std::size_t>(axis)]) break;
        c[axis] = b.lo[static_cast<std::size_t>(axis)];
        ++axis;
      }
      if (axis == dim_) break;
    }
  }
  std::vector<Cell> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t Window::cell_count() const { return cells().size(); }

double Window::measure() const { return scaled_count(cell_count(), res_, dim_); }

Window Window::translated(const std::vector<std::int64_t>& cell_offset) const {
  std::vector<Box> out = boxes_;
  for (Box& b : out) {
    for (int i = 0; i < dim_; ++i) {
      const auto u = static_cast<std::size_t>(i);
      b.lo[u] = checked_add32(b.lo[u], cell_offset[u]);
      b.hi[u] = checked_add32(b.hi[u], cell_offset[u]);
    }
  }
  return Window(dim_, res_, std::move(out));
}

Window Window::translated(const Shift& y) const {
  check_same_frame(dim_, res_, y.dim(), res_, "translate window");
  return translated(y.cell_offsets(res_));
}

Window Window::refined(std::int64_t factor) const {
  if (factor < 1) fail("refinement factor must be >= 1");
  std::vector<Box> out = boxes_;
  for (Box& b : out) {
    for (int i = 0; i < dim_; ++i) {
      const auto u = static_cast<std::size_t>(i);
      b.lo[u] = checked_add32(0, static_cast<std::int64_t>(b.lo[u]) * factor);
      b.hi[u] = checked_add32(0, static_cast<std::int64_t>(b.hi[u]) * factor);
    }
  }
  return Window(dim_, res_ * factor, std::move(out));
}

Window Window::union_with(const Window& other) const {
  check_same_frame(dim_, res_, other.dim_, other.res_, "window union");
  std::vector<Box> out = boxes_;
  out.insert(out.end(), other.boxes_.begin(), other.boxes_.end());
  return Window(dim_, res_, std::move(out));
}

bool Window::same_cells(const Window& other) const {
  return dim_ == other.dim_ && res_ == other.res_ && cells() == other.cells();
}

// ---- PixelSet --------------------------------------------------------------

PixelSet::PixelSet(int dim, std::int64_t resolution, std::vector<Cell> cells)
    : dim_(dim), res_(resolution), cells_(std::move(cells)) {
  check_dim(dim_);
  check_res(res_);
  for (Cell& c : cells_) {
    for (int i = dim_; i < kMaxDim; ++i) c[i] = 0;
  }
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

PixelSet PixelSet::empty(int dim, std::int64_t resolution) {
  return PixelSet(dim, resolution, {});
}

bool PixelSet::contains(const Cell& c) const {
  return std::binary_search(cells_.begin(), cells_.end(), c);
}

double PixelSet::measure() const { return scaled_count(size(), res_, dim_); }

bool PixelSet::operator==(const PixelSet& o) const {
  return dim_ == o.dim_ && res_ == o.res_ && cells_ == o.cells_;
}

bool PixelSet::bounds(std::vector<std::int32_t>& lo,
                      std::vector<std::int32_t>& hi) const {
  if (cells_.empty()) return false;
  lo.assign(static_cast<std::size_t>(dim_),
            std::numeric_limits<std::int32_t>::max());
  hi.assign(static_cast<std::size_t>(dim_),
            std::numeric_limits<std::int32_t>::min());
  for (const Cell& c : cells_) {
    for (int i = 0; i < dim_; ++i) {
      const auto u = static_cast<std::size_t>(i);
      lo[u] = std::min(lo[u], c[i]);
      hi[u] = std::max(hi[u], static_cast<std::int32_t>(c[i] + 1));
    }
  }
  return true;
}

// ---- Operations ------------------------------------------------------------

std::uint64_t measure_count(const PixelSet& a, const Window& w) {
  check_same_frame(a.dim(), a.resolution(), w.dim(), w.resolution(), "measure");
  std::uint64_t count = 0;
  for (const Cell& c : a.cells()) {
    if (w.contains_cell(c)) ++count;
  }
  return count;
}

double measure(const PixelSet& a, const Window& w) {
  return scaled_count(measure_count(a, w), a.resolution(), a.dim());
}

PixelSet translate_cells(const PixelSet& a,
                         const std::vector<std::int64_t>& cell_offset) {
  std::vector<Cell> out = a.cells();
  for (Cell& c : out) {
    for (int i = 0; i < a.dim(); ++i) {
      c[i] = checked_add32(c[i], cell_offset[static_cast<std::size_t>(i)]);
    }
  }
  return PixelSet(a.dim(), a.resolution(), std::move(out));
}

PixelSet translate(const PixelSet& a, const Shift& y) {
  check_same_frame(a.dim(), a.resolution(), y.dim(), a.resolution(), "translate");
  return translate_cells(a, y.cell_offsets(a.resolution()));
}

namespace {

// Strata of the grid complex are addressed in doubled coordinates: even
// values are hyperplane positions, odd values the open unit intervals
// between them. An open box (lo,hi) contains stratum t iff 2lo < t < 2hi
// componentwise, so coverage by a union of boxes is a finite check.
bool stratum_covered(const std::vector<std::int64_t>& t,
                     const std::vector<Box>& boxes, int dim) {
  for (const Box& b : boxes) {
    bool inside = true;
    for (int i = 0; i < dim && inside; ++i) {
      const auto u = static_cast<std::size_t>(i);
      inside = 2 * static_cast<std::int64_t>(b.lo[u]) < t[u] &&
               t[u] < 2 * static_cast<std::int64_t>(b.hi[u]);
    }
    if (inside) return true;
  }
  return false;
}

// All strata of a (possibly degenerate) doubled-coordinate range covered?
bool range_covered(const std::vector<std::int64_t>& tlo,
                   const std::vector<std::int64_t>& thi,
                   const std::vector<Box>& boxes, int dim) {
  std::vector<std::int64_t> t = tlo;
  while (true) {
    if (!stratum_covered(t, boxes, dim)) return false;
    int axis = 0;
    while (axis < dim) {
      const auto u = static_cast<std::size_t>(axis);
      ++t[u];
      if (t[u] <= thi[u]) break;
      t[u] = tlo[u];
      ++axis;
    }
    if (axis == dim) return true;
  }
}

// Sweep of the open cell c along [0, (m/n) e_axis], in doubled coordinates.
void swept_cell_range(const Cell& c, int dim, int axis, std::int64_t m,
                      std::vector<std::int64_t>& tlo,
                      std::vector<std::int64_t>& thi) {
  tlo.resize(static_cast<std::size_t>(dim));
  thi.resize(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (i == axis) {
      const std::int64_t lo = c[i] + std::min<std::int64_t>(0, m);
      const std::int64_t hi = c[i] + 1 + std::max<std::int64_t>(0, m);
      tlo[u] = 2 * lo + 1;
      thi[u] = 2 * hi - 1;
    } else {
      tlo[u] = 2 * static_cast<std::int64_t>(c[i]) + 1;
      thi[u] = tlo[u];
    }
  }
}

// Sweep of the open face shared by c and c+e_axis; closed in the sweep axis.
void swept_face_range(const Cell& c, int dim, int axis, std::int64_t m,
                      std::vector<std::int64_t>& tlo,
                      std::vector<std::int64_t>& thi) {
  tlo.resize(static_cast<std::size_t>(dim));
  thi.resize(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (i == axis) {
      const std::int64_t v = c[i] + 1;
      tlo[u] = 2 * (v + std::min<std::int64_t>(0, m));
      thi[u] = 2 * (v + std::max<std::int64_t>(0, m));
    } else {
      tlo[u] = 2 * static_cast<std::int64_t>(c[i]) + 1;
      thi[u] = tlo[u];
    }
  }
}

}  // namespace

Window erode_segment_cells(const Window& w, int axis, std::int64_t m) {
  if (axis < 0 || axis >= w.dim()) fail("erosion axis out of range");
  if (m == 0 || w.is_empty()) return w;

  if (w.boxes().size() == 1) {
    Box b = w.boxes().front();
    const auto u = static_cast<std::size_t>(axis);
    const std::int64_t lo = b.lo[u] - std::min<std::int64_t>(0, m);
    const std::int64_t hi = b.hi[u] - std::max<std::int64_t>(0, m);
    if (lo >= hi) return Window::empty(w.dim(), w.resolution());
    b.lo[u] = checked_add32(0, lo);
    b.hi[u] = checked_add32(0, hi);
    return Window(w.dim(), w.resolution(), {b});
  }

  // Union case: cell k survives iff its sweep stays inside the union, tested
  // stratum by stratum. Surviving cells are packed into runs along the sweep
  // axis; a run may only bridge a face whose own sweep stays inside.
  const int dim = w.dim();
  std::vector<std::int64_t> tlo, thi;
  std::vector<Cell> kept;
  for (const Cell& c : w.cells()) {
    swept_cell_range(c, dim, axis, m, tlo, thi);
    if (range_covered(tlo, thi, w.boxes(), dim)) kept.push_back(c);
  }
  if (kept.empty()) return Window::empty(dim, w.resolution());

  // Sort so the sweep axis varies fastest within a transverse group.
  std::sort(kept.begin(), kept.end(), [&](const Cell& a, const Cell& b) {
    for (int i = 0; i < dim; ++i) {
      if (i == axis) continue;
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return a[axis] < b[axis];
  });

  std::vector<Box> out;
  std::size_t i = 0;
  while (i < kept.size()) {
    std::size_t j = i;
    while (j + 1 < kept.size()) {
      const Cell& cur = kept[j];
      const Cell& nxt = kept[j + 1];
      bool same_row = true;
      for (int t = 0; t < dim && same_row; ++t) {
        if (t != axis && cur[t] != nxt[t]) same_row = false;
      }
      if (!same_row || nxt[axis] != cur[axis] + 1) break;
      swept_face_range(cur, dim, axis, m, tlo, thi);
      if (!range_covered(tlo, thi, w.boxes(), dim)) break;
      ++j;
    }
    Box b;
    b.lo.resize(static_cast<std::size_t>(dim));
    b.hi.resize(static_cast<std::size_t>(dim));
    for (int t = 0; t < dim; ++t) {
      const auto u = static_cast<std::size_t>(t);
      b.lo[u] = kept[i][t];
      b.hi[u] = static_cast<std::int32_t>(kept[t == axis ? j : i][t] + 1);
    }
    out.push_back(std::move(b));
    i = j + 1;
  }
  return Window(dim, w.resolution(), std::move(out));
}

Window erode_segment(const Window& w, const Shift& u) {
  check_same_frame(w.dim(), w.resolution(), u.dim(), w.resolution(),
                   "erode_segment");
  if (u.is_zero()) return w;
  const int axis = u.single_axis();
  if (axis < 0) fail("erode_segment requires an axis-aligned segment, got " + u.describe());
  const std::vector<std::int64_t> off = u.cell_offsets(w.resolution());
  return erode_segment_cells(w, axis, off[static_cast<std::size_t>(axis)]);
}

PixelSet refine(const PixelSet& a, std::int64_t factor) {
  if (factor < 1) fail("refinement factor must be >= 1");
  if (factor == 1) return a;
  const int d = a.dim();
  std::vector<Cell> out;
  out.reserve(a.size() * static_cast<std::uint64_t>(std::pow(
                              static_cast<double>(factor), d)));
  std::vector<std::int64_t> offset(static_cast<std::size_t>(d), 0);
  for (const Cell& c : a.cells()) {
    while (true) {
      Cell fine;
      for (int i = 0; i < d; ++i) {
        fine[i] = checked_add32(static_cast<std::int64_t>(c[i]) * factor,
                                offset[static_cast<std::size_t>(i)]);
      }
      out.push_back(fine);
      int axis = 0;
      while (axis < d) {
        const auto u = static_cast<std::size_t>(axis);
        ++offset[u];
        if (offset[u] < factor) break;
        offset[u] = 0;
        ++axis;
      }
      if (axis == d) break;
    }
  }
  return PixelSet(d, a.resolution() * factor, std::move(out));
}

PixelSet restrict_to(const PixelSet& a, const Window& w) {
  check_same_frame(a.dim(), a.resolution(), w.dim(), w.resolution(),
                   "restrict_to");
  std::vector<Cell> out;
  for (const Cell& c : a.cells()) {
    if (w.contains_cell(c)) out.push_back(c);
  }
  return PixelSet(a.dim(), a.resolution(), std::move(out));
}

PixelSet set_union(const PixelSet& a, const PixelSet& b) {
  check_same_frame(a.dim(), a.resolution(), b.dim(), b.resolution(), "union");
  std::vector<Cell> out;
  std::set_union(a.cells().begin(), a.cells().end(), b.cells().begin(),
                 b.cells().end(), std::back_inserter(out));
  return PixelSet(a.dim(), a.resolution(), std::move(out));
}

PixelSet set_intersection(const PixelSet& a, const PixelSet& b) {
  check_same_frame(a.dim(), a.resolution(), b.dim(), b.resolution(),
                   "intersection");
  std::vector<Cell> out;
  std::set_intersection(a.cells().begin(), a.cells().end(), b.cells().begin(),
                        b.cells().end(), std::back_inserter(out));
  return PixelSet(a.dim(), a.resolution(), std::move(out));
}

std::uint64_t symmetric_difference_count(const PixelSet& a, const PixelSet& b) {
  check_same_frame(a.dim(), a.resolution(), b.dim(), b.resolution(),
                   "symmetric difference");
  std::vector<Cell> out;
  std::set_symmetric_difference(a.cells().begin(), a.cells().end(),
                                b.cells().begin(), b.cells().end(),
                                std::back_inserter(out));
  return out.size();
}

std::uint64_t ipow_checked(std::int64_t n, int k) {
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) {
    r *= static_cast<std::uint64_t>(n);
    if (r > (1ULL << 53)) fail("n^k exceeds exact double range");
  }
  return r;
}

double cell_volume(std::int64_t n, int d) {
  return 1.0 / static_cast<double>(ipow_checked(n, d));
}

double scaled_count(std::uint64_t count, std::int64_t n, int k) {
  return static_cast<double>(count) / static_cast<double>(ipow_checked(n, k));
}

double scaled_count_signed(std::int64_t count, std::int64_t n, int k) {
  return static_cast<double>(count) / static_cast<double>(ipow_checked(n, k));
}

// ---- Text formats ----------------------------------------------------------

namespace {

struct LineReader {
  std::istream& in;
  std::string origin;
  int line_no = 0;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t h = line.find('#');
      if (h != std::string::npos) line.erase(h);
      std::size_t a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      std::size_t b = line.find_last_not_of(" \t\r");
      line = line.substr(a, b - a + 1);
      return true;
    }
    return false;
  }

  [[noreturn]] void error(const std::string& msg) const {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + msg);
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::int64_t parse_int(const std::string& s, const LineReader& r) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    r.error("expected integer, got '" + s + "'");
  }
}

// "key=value" field on a header line.
std::string field(const std::vector<std::string>& tokens, const std::string& key,
                  const LineReader& r) {
  for (const std::string& t : tokens) {
    if (t.rfind(key + "=", 0) == 0) return t.substr(key.size() + 1);
  }
  r.error("missing field '" + key + "='");
}

}  // namespace

std::string write_rams1(const PixelSet& a) {
  std::ostringstream os;
  os << "RAMS1 d=" << a.dim() << " n=" << a.resolution() << "\n";
  for (const Cell& c : a.cells()) {
    for (int i = 0; i < a.dim(); ++i) {
      if (i) os << ' ';
      os << c[i];
    }
    os << "\n";
  }
  return os.str();
}

PixelSet read_rams1(std::istream& in, const std::string& origin) {
  LineReader r{in, origin};
  std::string line;
  if (!r.next(line)) r.error("empty file, expected RAMS1 header");
  std::istringstream head(line);
  std::string tag;
  head >> tag;
  if (tag != "RAMS1") r.error("expected 'RAMS1' header, got '" + tag + "'");
  std::vector<std::string> tokens;
  std::string tok;
  while (head >> tok) tokens.push_back(tok);
  const int d = static_cast<int>(parse_int(field(tokens, "d", r), r));
  const std::int64_t n = parse_int(field(tokens, "n", r), r);
  if (d < 1 || d > kMaxDim) r.error("unsupported dimension " + std::to_string(d));
  if (n < 1) r.error("resolution must be positive");

  std::vector<Cell> cells;
  while (r.next(line)) {
    std::istringstream ls(line);
    std::vector<std::int32_t> coords;
    std::string v;
    while (ls >> v) coords.push_back(static_cast<std::int32_t>(parse_int(v, r)));
    if (static_cast<int>(coords.size()) != d) {
      r.error("expected " + std::to_string(d) + " coordinates, got " +
              std::to_string(coords.size()));
    }
    cells.push_back(make_cell(coords));
  }
  return PixelSet(d, n, std::move(cells));
}

PixelSet read_rams1_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error(path + ": cannot open");
  return read_rams1(f, path);
}

std::string write_win1(const Window& w) {
  std::ostringstream os;
  for (const Box& b : w.boxes()) {
    os << "WIN1 d=" << w.dim() << " n=" << w.resolution() << " lo=";
    for (int i = 0; i < w.dim(); ++i) {
      if (i) os << ',';
      os << b.lo[static_cast<std::size_t>(i)];
    }
    os << " hi=";
    for (int i = 0; i < w.dim(); ++i) {
      if (i) os << ',';
      os << b.hi[static_cast<std::size_t>(i)];
    }
    os << "\n";
  }
  if (w.boxes().empty()) {
    os << "WIN1 d=" << w.dim() << " n=" << w.resolution() << " lo= hi=\n";
  }
  return os.str();
}

Window read_win1(std::istream& in, const std::string& origin) {
  LineReader r{in, origin};
  std::string line;
  int d = -1;
  std::int64_t n = -1;
  std::vector<Box> boxes;
  bool any = false;
  while (r.next(line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != "WIN1") r.error("expected 'WIN1' line, got '" + tag + "'");
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    const int ld = static_cast<int>(parse_int(field(tokens, "d", r), r));
    const std::int64_t ln = parse_int(field(tokens, "n", r), r);
    if (!any) {
      d = ld;
      n = ln;
      any = true;
    } else if (d != ld || n != ln) {
      r.error("inconsistent d/n across WIN1 lines");
    }
    const std::string lo_s = field(tokens, "lo", r);
    const std::string hi_s = field(tokens, "hi", r);
    if (lo_s.empty() && hi_s.empty()) continue;  // empty window marker
    Box b;
    for (const std::string& v : split(lo_s, ','))
      b.lo.push_back(static_cast<std::int32_t>(parse_int(v, r)));
    for (const std::string& v : split(hi_s, ','))
      b.hi.push_back(static_cast<std::int32_t>(parse_int(v, r)));
    if (static_cast<int>(b.lo.size()) != d || static_cast<int>(b.hi.size()) != d)
      r.error("lo/hi must each have " + std::to_string(d) + " integers");
    boxes.push_back(std::move(b));
  }
  if (!any) r.error("no WIN1 lines found");
  return Window(d, n, std::move(boxes));
}

Window read_win1_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error(path + ": cannot open");
  return read_win1(f, path);
}

}  // namespace covo
