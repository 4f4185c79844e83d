#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace covo {

// Dimensions are runtime values; 8 is far beyond anything a subset
// enumeration or a desk-scale grid can hold anyway.
inline constexpr int kMaxDim = 8;

/// Exact rational, the scalar type of grid-aligned shifts.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0 after normalize()

  Rat() = default;
  Rat(std::int64_t n, std::int64_t d);
  static Rat of_int(std::int64_t n) { return Rat(n, 1); }
  /// Parses a decimal literal ("-0.75", "2") exactly.
  static Rat parse(const std::string& text);

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  Rat negated() const { return Rat(-num, den); }
  bool is_zero() const { return num == 0; }
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
};

/// Lattice cell index; coordinates beyond the active dimension stay zero so
/// cells compare and hash uniformly.
struct Cell {
  std::array<std::int32_t, kMaxDim> k{};

  std::int32_t& operator[](int i) { return k[static_cast<std::size_t>(i)]; }
  std::int32_t operator[](int i) const {
    return k[static_cast<std::size_t>(i)];
  }
  bool operator==(const Cell& o) const { return k == o.k; }
  bool operator<(const Cell& o) const { return k < o.k; }
};

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < kMaxDim; ++i) {
      h ^= static_cast<std::uint32_t>(c.k[static_cast<std::size_t>(i)]);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

Cell make_cell(const std::vector<std::int32_t>& coords);

/// Translation vector with exact rational coordinates. Grid operations
/// require every coordinate to be a multiple of 1/n; callers with finer
/// shifts refine the set first.
class Shift {
 public:
  Shift() = default;
  explicit Shift(std::vector<Rat> coords);
  static Shift zero(int dim);
  /// k/n componentwise.
  static Shift of_cells(const std::vector<std::int64_t>& k, std::int64_t n);
  /// value * e_axis in dimension dim.
  static Shift axis(int dim, int axis, Rat value);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Rat& coord(int i) const { return coords_[static_cast<std::size_t>(i)]; }
  double value(int i) const { return coords_[static_cast<std::size_t>(i)].to_double(); }
  bool is_zero() const;
  Shift negated() const;

  /// True when every coordinate lies on the 1/n lattice.
  bool aligned_to(std::int64_t n) const;
  /// Integer cell offsets n*y; throws with refinement guidance if unaligned.
  std::vector<std::int64_t> cell_offsets(std::int64_t n) const;
  /// Nonzero on exactly one axis? Returns the axis, or -1.
  int single_axis() const;

  std::string describe() const;

 private:
  std::vector<Rat> coords_;
};

struct Box {
  std::vector<std::int32_t> lo;  // open box (lo/n, hi/n) componentwise
  std::vector<std::int32_t> hi;  // hi > lo in every coordinate
  bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

class PixelSet;

/// Observation window: a bounded open pixel-aligned set stored as a finite
/// union of open boxes with integer cell bounds. The boxes carry the genuine
/// open-set structure, which matters: (0,1) u (1,2) and (0,2) have the same
/// cells but erode differently.
class Window {
 public:
  Window() = default;
  Window(int dim, std::int64_t resolution, std::vector<Box> boxes);
  static Window box(std::int64_t resolution,
                    const std::vector<std::int32_t>& lo,
                    const std::vector<std::int32_t>& hi);
  /// (0,1)^d at resolution n.
  static Window unit(int dim, std::int64_t resolution);
  /// (-m, m)^d at resolution n.
  static Window centered_cube(int dim, std::int64_t resolution, std::int64_t m);
  static Window empty(int dim, std::int64_t resolution);

  int dim() const { return dim_; }
  std::int64_t resolution() const { return res_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  bool is_empty() const { return boxes_.empty(); }

  bool contains_cell(const Cell& c) const;
  /// Strict interior membership of the center of the face shared by cells
  /// c and c+e_axis.
  bool contains_face_center(const Cell& c, int axis) const;

  std::vector<Cell> cells() const;
  std::uint64_t cell_count() const;
  double measure() const;

  Window translated(const std::vector<std::int64_t>& cell_offset) const;
  Window translated(const Shift& y) const;
  Window refined(std::int64_t factor) const;
  Window union_with(const Window& other) const;

  bool same_cells(const Window& other) const;

 private:
  int dim_ = 0;
  std::int64_t res_ = 1;
  std::vector<Box> boxes_;
};

/// Finite union of grid cells C^n_k at resolution n (cell side 1/n). Cells
/// are closed cubes; every measure is a cell count times n^-d, so boundary
/// overlaps never enter. Immutable value type.
class PixelSet {
 public:
  PixelSet() = default;
  PixelSet(int dim, std::int64_t resolution, std::vector<Cell> cells);
  static PixelSet empty(int dim, std::int64_t resolution);

  int dim() const { return dim_; }
  std::int64_t resolution() const { return res_; }
  const std::vector<Cell>& cells() const { return cells_; }  // sorted, unique
  std::uint64_t size() const { return cells_.size(); }
  bool is_empty() const { return cells_.empty(); }

  bool contains(const Cell& c) const;
  double measure() const;

  bool operator==(const PixelSet& o) const;

  /// Bounding cell range [lo, hi) or false when empty.
  bool bounds(std::vector<std::int32_t>& lo, std::vector<std::int32_t>& hi) const;

 private:
  int dim_ = 0;
  std::int64_t res_ = 1;
  std::vector<Cell> cells_;
};

// ---- Operations -----------------------------------------------------------

/// L^d(A n W) as an exact cell count times n^-d.
std::uint64_t measure_count(const PixelSet& a, const Window& w);
double measure(const PixelSet& a, const Window& w);

/// y + A for a grid-aligned shift; exact index arithmetic.
PixelSet translate(const PixelSet& a, const Shift& y);
PixelSet translate_cells(const PixelSet& a,
                         const std::vector<std::int64_t>& cell_offset);

/// Minkowski erosion by the segment [0, u]: {x : x + [0,u] in W}. u must be
/// axis-aligned with |u| a multiple of 1/n. An empty result is legal.
Window erode_segment(const Window& w, const Shift& u);
Window erode_segment_cells(const Window& w, int axis, std::int64_t cells);

/// Same set as a subset of R^d at resolution n*factor; measure preserved.
PixelSet refine(const PixelSet& a, std::int64_t factor);

/// Cells of A whose closure lies in closure(W).
PixelSet restrict_to(const PixelSet& a, const Window& w);

PixelSet set_union(const PixelSet& a, const PixelSet& b);
PixelSet set_intersection(const PixelSet& a, const PixelSet& b);
std::uint64_t symmetric_difference_count(const PixelSet& a, const PixelSet& b);

double cell_volume(std::int64_t n, int d);
/// n^k as u64; throws if it would not be exact in a double.
std::uint64_t ipow_checked(std::int64_t n, int k);
/// count / n^k, the single canonical conversion from exact counts to reals.
double scaled_count(std::uint64_t count, std::int64_t n, int k);
double scaled_count_signed(std::int64_t count, std::int64_t n, int k);

// ---- Portable text formats -------------------------------------------------

/// RAMS1: header "RAMS1 d=<d> n=<n>", then one cell per line (d integers).
/// '#' starts a comment; blank lines are ignored.
std::string write_rams1(const PixelSet& a);
PixelSet read_rams1(std::istream& in, const std::string& origin = "<input>");
PixelSet read_rams1_file(const std::string& path);

/// WIN1: one line per box, "WIN1 d=<d> n=<n> lo=<i,..> hi=<i,..>".
std::string write_win1(const Window& w);
Window read_win1(std::istream& in, const std::string& origin = "<input>");
Window read_win1_file(const std::string& path);

}  // namespace covo
