#include "covo/s2curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "covo/rng.hpp"

namespace covo {

S2Curve::S2Curve(int dim, double step) : dim_(dim), step_(step) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("S2Curve: bad dimension");
  if (!(step > 0.0)) throw std::invalid_argument("S2Curve: step must be > 0");
}

void S2Curve::set_sample(const std::vector<std::int32_t>& index, double value,
                         std::optional<double> stderr_value) {
  const Cell c = make_cell(index);
  if (samples_.insert_or_assign(c, value).second) {
    index_order_.push_back(c);
    std::sort(index_order_.begin(), index_order_.end());
  }
  if (stderr_value) stderr_[c] = *stderr_value;
}

bool S2Curve::has_index(const Cell& index) const {
  return samples_.count(index) > 0;
}

double S2Curve::value_at_index(const Cell& index) const {
  const auto it = samples_.find(index);
  if (it != samples_.end()) return it->second;
  if (callback_) {
    std::vector<double> y(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i)
      y[static_cast<std::size_t>(i)] = index[i] * step_;
    return callback_(y);
  }
  throw std::invalid_argument("S2Curve: no sample at requested lattice index");
}

double S2Curve::stderr_at_index(const Cell& index) const {
  const auto it = stderr_.find(index);
  return it == stderr_.end() ? 0.0 : it->second;
}

std::optional<Cell> S2Curve::locate(const Shift& y) const {
  Cell c;
  for (int i = 0; i < dim_; ++i) {
    const double v = y.value(i) / step_;
    const double r = std::nearbyint(v);
    if (std::abs(v - r) > 1e-6 || std::abs(r) > 2e9) return std::nullopt;
    c[i] = static_cast<std::int32_t>(r);
  }
  return c;
}

bool S2Curve::evaluable_at(const Shift& y) const {
  if (callback_) return true;
  const auto idx = locate(y);
  return idx && samples_.count(*idx) > 0;
}

double S2Curve::value_at_shift(const Shift& y) const {
  if (y.dim() != dim_) throw std::invalid_argument("S2Curve: shift dimension mismatch");
  if (!callback_) {
    const auto idx = locate(y);
    if (!idx || !samples_.count(*idx)) {
      throw std::invalid_argument("S2Curve: shift " + y.describe() +
                                  " is not on the sample lattice and the curve "
                                  "has no analytic form");
    }
    return samples_.at(*idx);
  }
  std::vector<double> v(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) v[static_cast<std::size_t>(i)] = y.value(i);
  return callback_(v);
}

double S2Curve::value_at_point(const std::vector<double>& y) const {
  if (callback_) return callback_(y);
  Cell c;
  for (int i = 0; i < dim_; ++i) {
    const double v = y[static_cast<std::size_t>(i)] / step_;
    const double r = std::nearbyint(v);
    if (std::abs(v - r) > 1e-6) {
      throw std::invalid_argument("S2Curve: point off the sample lattice");
    }
    c[i] = static_cast<std::int32_t>(r);
  }
  return value_at_index(c);
}

// ---- Necessary conditions ----------------------------------------------------

std::string S2Violation::describe(double step, int dim) const {
  std::ostringstream os;
  auto print = [&](const Cell& c) {
    os << '(';
    for (int i = 0; i < dim; ++i) {
      if (i) os << ", ";
      os << c[i] * step;
    }
    os << ')';
  };
  switch (kind) {
    case Kind::Range:
      os << "range violation at y=";
      print(y);
      break;
    case Kind::Evenness:
      os << "evenness violation at y=";
      print(y);
      break;
    case Kind::Triangle:
      os << "triangle bound violation at y=";
      print(y);
      os << ", z=";
      print(z);
      break;
  }
  os << ": lhs=" << lhs << " rhs=" << rhs;
  return os.str();
}

std::vector<S2Violation> necessary_conditions(
    const S2Curve& s2, const NecessaryConditionOptions& opts) {
  std::vector<S2Violation> out;
  const int d = s2.dim();
  const Cell origin{};
  if (!s2.has_index(origin)) {
    throw std::invalid_argument("necessary_conditions: the sample at 0 is required");
  }
  const double s0 = s2.value_at_index(origin);
  const double se0 = s2.has_stderr() && opts.use_stderr
                         ? s2.stderr_at_index(origin)
                         : 0.0;
  const auto slack = [&](double combined_se) {
    return opts.tolerance + 3.0 * combined_se;
  };

  const std::vector<Cell>& idx = s2.indices();

  // Range and evenness.
  for (const Cell& c : idx) {
    const double v = s2.value_at_index(c);
    const double se = s2.has_stderr() && opts.use_stderr ? s2.stderr_at_index(c) : 0.0;
    if (v < -slack(se)) {
      out.push_back({S2Violation::Kind::Range, c, Cell{}, v, 0.0});
    }
    if (v > s0 + slack(se + se0)) {
      out.push_back({S2Violation::Kind::Range, c, Cell{}, v, s0});
    }
    Cell neg = c;
    bool self = true;
    for (int i = 0; i < d; ++i) {
      neg[i] = -c[i];
      if (c[i] != 0) self = false;
    }
    if (self) {
      if (v > 1.0 + slack(se)) {
        out.push_back({S2Violation::Kind::Range, c, Cell{}, v, 1.0});
      }
      continue;
    }
    if (c < neg && s2.has_index(neg)) {
      const double vn = s2.value_at_index(neg);
      const double sen =
          s2.has_stderr() && opts.use_stderr ? s2.stderr_at_index(neg) : 0.0;
      if (std::abs(v - vn) > slack(se + sen)) {
        out.push_back({S2Violation::Kind::Evenness, c, neg, std::abs(v - vn), 0.0});
      }
    }
  }

  // Triangle bound over pairs whose difference is again on the lattice.
  const std::uint64_t total_pairs =
      static_cast<std::uint64_t>(idx.size()) * idx.size();
  CounterRng rng = CounterRng::derive_stream(opts.seed, 0);
  const bool subsample = total_pairs > opts.max_pairs;
  auto check_pair = [&](const Cell& cy, const Cell& cz) {
    Cell diff;
    for (int i = 0; i < d; ++i) diff[i] = cy[i] - cz[i];
    if (!s2.has_index(diff)) return;
    const double vy = s2.value_at_index(cy);
    const double vz = s2.value_at_index(cz);
    const double vd = s2.value_at_index(diff);
    double se = 0.0;
    if (s2.has_stderr() && opts.use_stderr) {
      se = s2.stderr_at_index(cy) + s2.stderr_at_index(cz) +
           s2.stderr_at_index(diff) + se0;
    }
    const double lhs = std::abs(vy - vz);
    const double rhs = s0 - vd;
    if (lhs > rhs + slack(se)) {
      out.push_back({S2Violation::Kind::Triangle, cy, cz, lhs, rhs});
    }
  };
  if (!subsample) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        check_pair(idx[i], idx[j]);
      }
    }
  } else {
    for (std::uint64_t k = 0; k < opts.max_pairs; ++k) {
      const std::size_t i = static_cast<std::size_t>(rng.next_below(idx.size()));
      const std::size_t j = static_cast<std::size_t>(rng.next_below(idx.size()));
      if (i != j) check_pair(idx[i], idx[j]);
    }
  }
  return out;
}

// ---- Lipschitz at zero -------------------------------------------------------

LipschitzAtZero lipschitz_at_zero(const S2Curve& s2, int axis) {
  const int d = s2.dim();
  if (axis < 0 || axis >= d) {
    throw std::invalid_argument("lipschitz_at_zero: axis out of range");
  }
  const Cell origin{};
  const double s0 = s2.value_at_index(origin);

  LipschitzAtZero out;
  out.smallest_t = std::numeric_limits<double>::infinity();
  bool any = false;

  auto consider = [&](double t, double value) {
    const double q = (s0 - value) / std::abs(t);
    if (!any || q > out.sup_quotient) out.sup_quotient = q;
    if (std::abs(t) < out.smallest_t) {
      out.smallest_t = std::abs(t);
      out.smallest_t_quotient = q;
    }
    any = true;
  };

  for (const Cell& c : s2.indices()) {
    bool on_axis = c[axis] != 0;
    for (int i = 0; i < d && on_axis; ++i) {
      if (i != axis && c[i] != 0) on_axis = false;
    }
    if (!on_axis) continue;
    consider(c[axis] * s2.step(), s2.value_at_index(c));
  }

  if (s2.has_callback()) {
    // Dyadic descent exposes the limit; k stops at 16 so the cancellation
    // in S2(0) - S2(t) stays a few orders below the quotient itself.
    std::vector<double> y(static_cast<std::size_t>(d), 0.0);
    double first_q = 0.0;
    double last_q = 0.0;
    for (int k = 0; k <= 16; ++k) {
      const double t = s2.step() * std::ldexp(1.0, -k);
      y[static_cast<std::size_t>(axis)] = t;
      const double value = s2.value_at_point(y);
      consider(t, value);
      last_q = (s0 - value) / t;
      if (k == 0) first_q = last_q;
    }
    out.unbounded = last_q > 100.0 * std::max(1e-30, std::abs(first_q)) &&
                    last_q > 1.0;
  }
  if (!any) {
    throw std::invalid_argument(
        "lipschitz_at_zero: no usable samples along the axis");
  }
  return out;
}

// ---- L constants --------------------------------------------------------------

double L_constant(const S2Curve& s2, int axis, const Window& w,
                  const std::vector<Rat>& eps_grid) {
  if (axis < 0 || axis >= w.dim()) {
    throw std::invalid_argument("L_constant: axis out of range");
  }
  const Cell origin{};
  const double s0 = s2.value_at_index(origin);
  const std::int64_t n = w.resolution();

  double sup = 0.0;
  for (const Rat& eps : eps_grid) {
    if (eps.is_zero()) continue;
    // Refine so that eps is a whole number of cells.
    const std::int64_t scaled = eps.num * n;
    const std::int64_t g = std::gcd(scaled < 0 ? -scaled : scaled, eps.den);
    const std::int64_t mult = eps.den / g;
    const Window fine = mult == 1 ? w : w.refined(mult);
    const std::int64_t m = scaled * mult / eps.den;

    const double vol_minus = erode_segment_cells(fine, axis, -m).measure();
    const double vol_plus = erode_segment_cells(fine, axis, m).measure();
    const Shift ye = Shift::axis(w.dim(), axis, eps);
    const double s_plus = s2.value_at_shift(ye);
    const double s_minus = s2.value_at_shift(ye.negated());
    const double abs_eps = std::abs(eps.to_double());
    const double sg =
        (vol_minus * (s0 - s_plus) + vol_plus * (s0 - s_minus)) / abs_eps;
    sup = std::max(sup, sg);
  }
  return sup;
}

}  // namespace covo
