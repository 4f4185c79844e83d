#include "covo/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "covo/covariogram.hpp"
#include "covo/rng.hpp"

namespace covo {

// ---- IntervalSet ----------------------------------------------------------------

IntervalSet IntervalSet::from_intervals(std::vector<Interval> raw) {
  raw.erase(std::remove_if(raw.begin(), raw.end(),
                           [](const Interval& i) { return !(i.lo < i.hi); }),
            raw.end());
  std::sort(raw.begin(), raw.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (const Interval& i : raw) {
    if (!out.parts_.empty() && i.lo <= out.parts_.back().hi) {
      out.parts_.back().hi = std::max(out.parts_.back().hi, i.hi);
    } else {
      out.parts_.push_back(i);
    }
  }
  return out;
}

double IntervalSet::total_length() const {
  double s = 0.0;
  for (const Interval& i : parts_) s += i.hi - i.lo;
  return s;
}

IntervalSet IntervalSet::translated(double y) const {
  IntervalSet out;
  out.parts_ = parts_;
  for (Interval& i : out.parts_) {
    i.lo += y;
    i.hi += y;
  }
  return out;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < parts_.size() && j < other.parts_.size()) {
    const double lo = std::max(parts_[i].lo, other.parts_[j].lo);
    const double hi = std::min(parts_[i].hi, other.parts_[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (parts_[i].hi < other.parts_[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return from_intervals(std::move(out));
}

IntervalSet IntervalSet::clipped(double lo, double hi) const {
  std::vector<Interval> out;
  for (const Interval& i : parts_) {
    const double a = std::max(i.lo, lo);
    const double b = std::min(i.hi, hi);
    if (a < b) out.push_back({a, b});
  }
  return from_intervals(std::move(out));
}

double IntervalSet::local_covariogram(double y, double a, double b) const {
  double acc = 0.0;
  // Two-pointer walk over X and y+X, clipping overlaps to (a,b).
  std::size_t i = 0, j = 0;
  while (i < parts_.size() && j < parts_.size()) {
    const double lo_j = parts_[j].lo + y;
    const double hi_j = parts_[j].hi + y;
    const double lo = std::max({parts_[i].lo, lo_j, a});
    const double hi = std::min({parts_[i].hi, hi_j, b});
    if (lo < hi) acc += hi - lo;
    if (parts_[i].hi < hi_j) {
      ++i;
    } else {
      ++j;
    }
  }
  return acc;
}

int IntervalSet::perimeter(double a, double b) const {
  int count = 0;
  for (const Interval& i : parts_) {
    if (a < i.lo && i.lo < b) ++count;
    if (a < i.hi && i.hi < b) ++count;
  }
  return count;
}

double IntervalSet::sigma(double eps, double a, double b) const {
  if (eps == 0.0) throw std::invalid_argument("sigma requires eps != 0");
  // Erosions of (a,b) by [-u,0] and [0,u] for u = eps.
  const double lo1 = a + std::max(0.0, eps), hi1 = b + std::min(0.0, eps);
  const double lo2 = a - std::min(0.0, eps), hi2 = b - std::max(0.0, eps);
  double acc = 0.0;
  if (lo1 < hi1) {
    acc += local_covariogram(0.0, lo1, hi1) - local_covariogram(eps, lo1, hi1);
  }
  if (lo2 < hi2) {
    acc += local_covariogram(0.0, lo2, hi2) - local_covariogram(-eps, lo2, hi2);
  }
  return acc / std::abs(eps);
}

double lebesgue_density(const IntervalSet& x, double point) {
  for (const IntervalSet::Interval& i : x.intervals()) {
    if (point == i.lo || point == i.hi) return 0.5;
    if (i.lo < point && point < i.hi) return 1.0;
  }
  return 0.0;
}

std::string write_ivls1(const IntervalSet& x) {
  std::ostringstream os;
  os << "IVLS1\n";
  os.precision(17);
  for (const IntervalSet::Interval& i : x.intervals()) {
    os << i.lo << " " << i.hi << "\n";
  }
  return os.str();
}

IntervalSet read_ivls1(std::istream& in, const std::string& origin) {
  std::string line;
  int line_no = 0;
  auto fail_at = [&](const std::string& msg) -> void {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line)) fail_at("empty file, expected IVLS1 header");
  ++line_no;
  if (line.rfind("IVLS1", 0) != 0) fail_at("expected 'IVLS1' header");
  std::vector<IntervalSet::Interval> parts;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double lo = 0.0, hi = 0.0;
    if (!(ls >> lo >> hi)) fail_at("expected two reals");
    parts.push_back({lo, hi});
  }
  return IntervalSet::from_intervals(std::move(parts));
}

IntervalSet intervals_from_pixels(const PixelSet& a) {
  if (a.dim() != 1) {
    throw std::invalid_argument("intervals_from_pixels requires a 1-D set");
  }
  const double n = static_cast<double>(a.resolution());
  std::vector<IntervalSet::Interval> out;
  const std::vector<Cell>& cells = a.cells();
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j + 1 < cells.size() && cells[j + 1][0] == cells[j][0] + 1) ++j;
    out.push_back({cells[i][0] / n, (cells[j][0] + 1) / n});
    i = j + 1;
  }
  return IntervalSet::from_intervals(std::move(out));
}

PixelSet rasterize_intervals(const IntervalSet& x, std::int64_t n) {
  std::vector<Cell> cells;
  for (const IntervalSet::Interval& i : x.intervals()) {
    const std::int64_t lo = std::llround(i.lo * static_cast<double>(n));
    const std::int64_t hi = std::llround(i.hi * static_cast<double>(n));
    for (std::int64_t k = lo; k < hi; ++k) {
      cells.push_back(make_cell({static_cast<std::int32_t>(k)}));
    }
  }
  return PixelSet(1, n, std::move(cells));
}

// ---- Boolean model, 1-D -----------------------------------------------------------

double BooleanModel1D::grain_bound() const {
  switch (grain) {
    case GrainKind1D::FixedLength:
      return grain_param;
    case GrainKind1D::ExponentialLength:
      return -grain_param * std::log(1e-9);  // 1 - 1e-9 quantile
  }
  return grain_param;
}

double BooleanModel1D::truncation_bias_bound() const {
  if (grain == GrainKind1D::FixedLength) return 0.0;
  // Mean uncovered-by-mistake length from germs left of the dilated window.
  return lambda * grain_param * 1e-9;
}

IntervalSet simulate_raw(const BooleanModel1D& model, double window_lo,
                         double window_hi, std::uint64_t replicate) {
  if (!(model.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  std::vector<IntervalSet::Interval> grains;
  if (model.lambda > 0.0) {
    CounterRng rng = CounterRng::derive_stream(model.seed, replicate);
    double x = window_lo - model.grain_bound();
    while (true) {
      x += rng.next_exponential(model.lambda);
      if (x >= window_hi) break;
      const double len = model.grain == GrainKind1D::FixedLength
                             ? model.grain_param
                             : rng.next_exponential(1.0 / model.grain_param);
      grains.push_back({x, x + len});
    }
  }
  return IntervalSet::from_intervals(std::move(grains));
}

IntervalSet simulate(const BooleanModel1D& model, double window_lo,
                     double window_hi, std::uint64_t replicate) {
  return simulate_raw(model, window_lo, window_hi, replicate)
      .clipped(window_lo, window_hi);
}

// ---- Boolean model, 2-D -----------------------------------------------------------

double BooleanModel2D::grain_bound() const {
  // Square side and disk radius both bound the reach of a grain.
  return grain_param;
}

PixelSet simulate(const BooleanModel2D& model, const Window& window,
                  std::uint64_t replicate) {
  if (window.dim() != 2) throw std::invalid_argument("2-D model needs a 2-D window");
  if (window.resolution() != model.resolution) {
    throw std::invalid_argument("window resolution must match the model");
  }
  const std::int64_t n = model.resolution;

  // Real bounding box of the window, dilated so every grain that can touch
  // it has its germ inside the region.
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const Box& b : window.boxes()) {
    for (int i = 0; i < 2; ++i) {
      const auto u = static_cast<std::size_t>(i);
      lo[i] = std::min(lo[i], b.lo[u] / static_cast<double>(n));
      hi[i] = std::max(hi[i], b.hi[u] / static_cast<double>(n));
    }
  }
  double germ_lo[2], germ_hi[2];
  for (int i = 0; i < 2; ++i) {
    if (model.grain == GrainKind2D::Square) {
      germ_lo[i] = lo[i] - model.grain_param;  // grain is [x, x+s]^2
      germ_hi[i] = hi[i];
    } else {
      germ_lo[i] = lo[i] - model.grain_param;
      germ_hi[i] = hi[i] + model.grain_param;
    }
  }

  CounterRng rng = CounterRng::derive_stream(model.seed, replicate);
  const double area = (germ_hi[0] - germ_lo[0]) * (germ_hi[1] - germ_lo[1]);
  const std::uint64_t n_germs = rng.next_poisson(model.lambda * area);
  std::vector<std::pair<double, double>> germs;
  germs.reserve(n_germs);
  for (std::uint64_t i = 0; i < n_germs; ++i) {
    const double gx = germ_lo[0] + (germ_hi[0] - germ_lo[0]) * rng.next_double();
    const double gy = germ_lo[1] + (germ_hi[1] - germ_lo[1]) * rng.next_double();
    germs.emplace_back(gx, gy);
  }

  std::vector<Cell> covered;
  for (const Cell& c : window.cells()) {
    const double cx = (c[0] + 0.5) / static_cast<double>(n);
    const double cy = (c[1] + 0.5) / static_cast<double>(n);
    bool hit = false;
    for (const auto& [gx, gy] : germs) {
      if (model.grain == GrainKind2D::Square) {
        hit = gx <= cx && cx <= gx + model.grain_param && gy <= cy &&
              cy <= gy + model.grain_param;
      } else {
        const double dx = cx - gx, dy = cy - gy;
        hit = dx * dx + dy * dy <= model.grain_param * model.grain_param;
      }
      if (hit) break;
    }
    if (hit) covered.push_back(c);
  }
  return PixelSet(2, n, std::move(covered));
}

PixelSet rasterize_disk(double radius, std::int64_t n) {
  const std::int64_t reach =
      static_cast<std::int64_t>(std::ceil(radius * static_cast<double>(n))) + 1;
  std::vector<Cell> cells;
  for (std::int64_t i = -reach; i < reach; ++i) {
    for (std::int64_t j = -reach; j < reach; ++j) {
      const double cx = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      const double cy = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      if (cx * cx + cy * cy <= radius * radius) {
        cells.push_back(make_cell({static_cast<std::int32_t>(i),
                                   static_cast<std::int32_t>(j)}));
      }
    }
  }
  return PixelSet(2, n, std::move(cells));
}

// ---- Estimators ---------------------------------------------------------------------

namespace {

EstimateStats reduce(const std::vector<double>& values) {
  EstimateStats out;
  out.replicates = static_cast<std::uint32_t>(values.size());
  if (values.empty()) return out;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  out.mean = sum.value() / static_cast<double>(values.size());
  if (values.size() >= 2) {
    CompensatedSum sq;
    for (double v : values) {
      const double d = v - out.mean;
      sq.add(d * d);
    }
    const double var = sq.value() / static_cast<double>(values.size() - 1);
    out.stderr_of_mean = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

}  // namespace

S2Estimate estimate_specific_covariogram(const BooleanModel1D& model,
                                         double step,
                                         const std::vector<std::int32_t>& indices,
                                         std::uint32_t replicates) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  std::vector<std::int32_t> idx = indices;
  if (std::find(idx.begin(), idx.end(), 0) == idx.end()) idx.push_back(0);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

  double y_max = 0.0;
  for (std::int32_t i : idx) y_max = std::max(y_max, std::abs(i * step));

  // One realization serves every shift: the evaluation needs X on
  // (0,1) u (-y, 1-y) for each y, all inside the dilated raw window.
  std::vector<std::vector<double>> values(idx.size());
  for (auto& v : values) v.reserve(replicates);
  for (std::uint32_t r = 0; r < replicates; ++r) {
    const IntervalSet x = simulate_raw(model, -y_max, 1.0 + y_max, r);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      values[s].push_back(x.local_covariogram(idx[s] * step, 0.0, 1.0));
    }
  }

  S2Estimate out;
  out.curve = S2Curve(1, step);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const EstimateStats stats = reduce(values[s]);
    out.curve.set_sample({idx[s]}, stats.mean,
                         replicates >= 2 ? std::optional<double>(stats.stderr_of_mean)
                                         : std::nullopt);
    out.shifts.push_back(idx[s] * step);
    if (idx[s] == 0) out.volume_fraction = stats;
  }
  return out;
}

EstimateStats estimate_specific_perimeter(const BooleanModel1D& model,
                                          std::uint32_t replicates) {
  std::vector<double> values;
  values.reserve(replicates);
  for (std::uint32_t r = 0; r < replicates; ++r) {
    const IntervalSet x = simulate_raw(model, 0.0, 1.0, r);
    values.push_back(static_cast<double>(x.perimeter(0.0, 1.0)));
  }
  return reduce(values);
}

EstimateStats estimate_specific_perimeter(const BooleanModel2D& model,
                                          std::uint32_t replicates) {
  const Window unit = Window::unit(2, model.resolution);
  std::vector<double> values;
  values.reserve(replicates);
  for (std::uint32_t r = 0; r < replicates; ++r) {
    const PixelSet x = simulate(model, unit, r);
    values.push_back(perimeter_B(x, unit).value);
  }
  return reduce(values);
}

EstimateStats estimate_sigma(const BooleanModel1D& model, double eps,
                             std::uint32_t replicates) {
  std::vector<double> values;
  values.reserve(replicates);
  const double pad = std::abs(eps);
  for (std::uint32_t r = 0; r < replicates; ++r) {
    const IntervalSet x = simulate_raw(model, -pad, 1.0 + pad, r);
    values.push_back(x.sigma(eps, 0.0, 1.0));
  }
  return reduce(values);
}

// ---- Closed forms --------------------------------------------------------------------

double boolean1d_volume_fraction(double lambda, double ell) {
  return 1.0 - std::exp(-lambda * ell);
}

double boolean1d_s2(double lambda, double ell, double y) {
  const double shadow = ell + std::min(std::abs(y), ell);
  return 1.0 - 2.0 * std::exp(-lambda * ell) + std::exp(-lambda * shadow);
}

double boolean1d_specific_perimeter(double lambda, double ell) {
  return 2.0 * lambda * std::exp(-lambda * ell);
}

S2Curve boolean1d_closed_form_curve(double lambda, double ell, double step,
                                    std::int32_t max_index) {
  S2Curve curve(1, step);
  for (std::int32_t i = -max_index; i <= max_index; ++i) {
    curve.set_sample({i}, boolean1d_s2(lambda, ell, i * step));
  }
  curve.set_callback([lambda, ell](const std::vector<double>& y) {
    return boolean1d_s2(lambda, ell, y[0]);
  });
  return curve;
}

}  // namespace covo
