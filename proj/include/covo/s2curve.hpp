#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "covo/grid.hpp"

namespace covo {

/// A candidate specific covariogram sampled on the lattice h * Z^d, with
/// optional per-sample standard errors (Monte Carlo curves) and an optional
/// analytic callback that makes the curve evaluable at arbitrary shifts.
/// The sample at 0 must be present before the curve is screened.
class S2Curve {
 public:
  using Callback = std::function<double(const std::vector<double>&)>;

  S2Curve() = default;
  S2Curve(int dim, double step);

  int dim() const { return dim_; }
  double step() const { return step_; }

  void set_sample(const std::vector<std::int32_t>& index, double value,
                  std::optional<double> stderr_value = std::nullopt);
  void set_callback(Callback cb) { callback_ = std::move(cb); }
  bool has_callback() const { return static_cast<bool>(callback_); }

  bool has_index(const Cell& index) const;
  double value_at_index(const Cell& index) const;
  double stderr_at_index(const Cell& index) const;  // 0 when unknown
  bool has_stderr() const { return !stderr_.empty(); }

  const std::vector<Cell>& indices() const { return index_order_; }

  /// Shift -> lattice index; throws when the shift misses the lattice and no
  /// callback is available (no silent interpolation).
  double value_at_shift(const Shift& y) const;
  bool evaluable_at(const Shift& y) const;
  double value_at_point(const std::vector<double>& y) const;

 private:
  std::optional<Cell> locate(const Shift& y) const;

  int dim_ = 1;
  double step_ = 1.0;
  std::unordered_map<Cell, double, CellHash> samples_;
  std::unordered_map<Cell, double, CellHash> stderr_;
  std::vector<Cell> index_order_;  // sorted, rebuilt lazily
  Callback callback_;
};

// ---- Necessary conditions ---------------------------------------------------

struct S2Violation {
  enum class Kind { Range, Evenness, Triangle } kind;
  Cell y{};
  Cell z{};   // triangle / evenness partner (unused for range)
  double lhs = 0.0;
  double rhs = 0.0;
  std::string describe(double step, int dim) const;
};

struct NecessaryConditionOptions {
  double tolerance = 1e-9;   // absolute slack on every comparison
  bool use_stderr = true;    // widen by 3 sigma when the curve carries errors
  std::uint64_t max_pairs = 2'000'000;  // triangle scan budget
  std::uint64_t seed = 1;    // pair subsampling stream when over budget
};

/// Screens the sampled lattice for violations of conditions every specific
/// covariogram satisfies: 0 <= S2(y) <= S2(0) <= 1, evenness, and
/// |S2(y) - S2(z)| <= S2(0) - S2(y-z) for differences on the lattice.
/// An empty result means no violation was found.
std::vector<S2Violation> necessary_conditions(
    const S2Curve& s2, const NecessaryConditionOptions& opts = {});

// ---- Lipschitz constant at the origin ---------------------------------------

struct LipschitzAtZero {
  double sup_quotient = 0.0;        // max over evaluated t of (S2(0)-S2(t e_j))/|t|
  double smallest_t_quotient = 0.0; // quotient at the smallest evaluated |t|
  double smallest_t = 0.0;
  bool unbounded = false;           // quotients kept growing as t shrank
};

/// Difference quotients of S2 at 0 along axis j. Lattice curves are scanned
/// at every sampled multiple of h; curves with a callback are additionally
/// probed at h * 2^-k to expose the limit.
LipschitzAtZero lipschitz_at_zero(const S2Curve& s2, int axis);

// ---- L constants of the stationary ansatz -----------------------------------

/// L_j(gamma, W) = sup over the epsilon grid of sigma_gamma(eps e_j; W) for
/// gamma(y;W) = S2(y) L^d(W). Erosion volumes are exact (the window is
/// refined when an epsilon needs a finer grid).
double L_constant(const S2Curve& s2, int axis, const Window& w,
                  const std::vector<Rat>& eps_grid);

}  // namespace covo
