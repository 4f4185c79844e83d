#include "covo/polytope.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "covo/rng.hpp"

namespace covo {

// ---- Functional ---------------------------------------------------------------

Functional::Functional(int dim, std::int64_t resolution, double constant,
                       std::vector<FunctionalTerm> terms)
    : dim_(dim), res_(resolution), constant_(constant), terms_(std::move(terms)) {
  Window dom = Window::empty(dim_, res_);
  for (const FunctionalTerm& t : terms_) {
    if (t.window.dim() != dim_ || t.shift.dim() != dim_) {
      throw std::invalid_argument("functional term dimension mismatch");
    }
    if (t.window.resolution() != res_) {
      throw std::invalid_argument("functional term window resolution mismatch");
    }
    if (!t.shift.aligned_to(res_)) {
      throw std::invalid_argument("functional term shift " + t.shift.describe() +
                                  " is not aligned to the 1/" +
                                  std::to_string(res_) + " grid");
    }
    if (!t.window.is_empty()) {
      dom = dom.union_with(t.window);
      dom = dom.union_with(t.window.translated(t.shift.negated()));
    }
  }
  domain_ = std::move(dom);
}

double Functional::evaluate(const PixelSet& a) const {
  std::vector<double> coeffs;
  std::vector<std::uint64_t> counts;
  coeffs.reserve(terms_.size());
  counts.reserve(terms_.size());
  for (const FunctionalTerm& t : terms_) {
    coeffs.push_back(t.coefficient);
    counts.push_back(local_covariogram_count(a, t.shift, t.window));
  }
  return functional_value_from_counts(constant_, coeffs, counts, res_, dim_);
}

Functional Functional::shifted_constant(double delta) const {
  return Functional(dim_, res_, constant_ + delta, terms_);
}

double functional_value_from_counts(double constant,
                                    const std::vector<double>& coefficients,
                                    const std::vector<std::uint64_t>& counts,
                                    std::int64_t n, int d) {
  double v = constant;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    v += coefficients[i] * scaled_count(counts[i], n, d);
  }
  return v;
}

// ---- BetaMatrix -----------------------------------------------------------------

BetaMatrix::BetaMatrix(int dim, std::int64_t res, double constant,
                       std::vector<Cell> cells, std::vector<Entry> entries)
    : dim_(dim),
      res_(res),
      constant_(constant),
      cells_(std::move(cells)),
      entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
}

double BetaMatrix::evaluate(const PixelSet& a) const {
  if (a.dim() != dim_ || a.resolution() != res_) {
    throw std::invalid_argument("beta evaluate: frame mismatch");
  }
  std::vector<char> member(cells_.size(), 0);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    member[i] = a.contains(cells_[i]) ? 1 : 0;
  }
  double sum = 0.0;
  for (const Entry& e : entries_) {
    if (member[e.row] && member[e.col]) sum += e.value;
  }
  return constant_ + sum * cell_volume(res_, dim_);
}

BetaMatrix beta_matrix(const Functional& g) {
  const std::vector<Cell> cells = g.domain_cells();
  std::unordered_map<Cell, std::uint32_t, CellHash> index;
  index.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    index[cells[i]] = static_cast<std::uint32_t>(i);
  }

  // beta_{k,l} = n^-d sum_i a_i [l = k - n y_i][cell k inside closure(W_i)];
  // the n^-d stays factored out of the stored entries.
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> acc;
  for (const FunctionalTerm& t : g.terms()) {
    const std::vector<std::int64_t> off = t.shift.cell_offsets(g.resolution());
    for (const Cell& k : t.window.cells()) {
      const auto row_it = index.find(k);
      if (row_it == index.end()) continue;
      Cell l = k;
      bool ok = true;
      for (int i = 0; i < g.dim() && ok; ++i) {
        const std::int64_t v = static_cast<std::int64_t>(k[i]) -
                               off[static_cast<std::size_t>(i)];
        if (v < INT32_MIN || v > INT32_MAX) ok = false;
        l[i] = static_cast<std::int32_t>(v);
      }
      if (!ok) continue;
      const auto col_it = index.find(l);
      if (col_it == index.end()) continue;
      acc[{row_it->second, col_it->second}] += t.coefficient;
    }
  }
  std::vector<BetaMatrix::Entry> entries;
  entries.reserve(acc.size());
  for (const auto& [key, value] : acc) {
    entries.push_back({key.first, key.second, value});
  }
  return BetaMatrix(g.dim(), g.resolution(), g.constant(), cells,
                    std::move(entries));
}

// ---- Minimization -----------------------------------------------------------------

namespace {

// Pair-count bookkeeping for one term: indices of the cells inside the term
// window, and the +-n y_i partner of every domain cell (or -1).
struct TermPlan {
  double coefficient = 0.0;
  bool zero_shift = false;
  std::vector<char> in_window;
  std::vector<std::int32_t> partner_down;  // index of cell - n y
  std::vector<std::int32_t> partner_up;    // index of cell + n y
};

std::vector<TermPlan> build_plans(const Functional& g,
                                  const std::vector<Cell>& cells) {
  std::unordered_map<Cell, std::int32_t, CellHash> index;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    index[cells[i]] = static_cast<std::int32_t>(i);
  }
  std::vector<TermPlan> plans;
  plans.reserve(g.terms().size());
  for (const FunctionalTerm& t : g.terms()) {
    TermPlan plan;
    plan.coefficient = t.coefficient;
    const std::vector<std::int64_t> off = t.shift.cell_offsets(g.resolution());
    plan.zero_shift =
        std::all_of(off.begin(), off.end(), [](std::int64_t v) { return v == 0; });
    plan.in_window.resize(cells.size());
    plan.partner_down.assign(cells.size(), -1);
    plan.partner_up.assign(cells.size(), -1);
    for (std::size_t x = 0; x < cells.size(); ++x) {
      plan.in_window[x] = t.window.contains_cell(cells[x]) ? 1 : 0;
      Cell down = cells[x];
      Cell up = cells[x];
      bool ok = true;
      for (int i = 0; i < g.dim() && ok; ++i) {
        const std::int64_t d64 = static_cast<std::int64_t>(cells[x][i]) -
                                 off[static_cast<std::size_t>(i)];
        const std::int64_t u64 = static_cast<std::int64_t>(cells[x][i]) +
                                 off[static_cast<std::size_t>(i)];
        if (d64 < INT32_MIN || d64 > INT32_MAX || u64 < INT32_MIN ||
            u64 > INT32_MAX) {
          ok = false;
        } else {
          down[i] = static_cast<std::int32_t>(d64);
          up[i] = static_cast<std::int32_t>(u64);
        }
      }
      if (!ok) continue;
      const auto dit = index.find(down);
      if (dit != index.end()) plan.partner_down[x] = dit->second;
      const auto uit = index.find(up);
      if (uit != index.end()) plan.partner_up[x] = uit->second;
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

// Pair-count change from adding cell x to the base set (x not in base):
// new pairs (x, x - ny) and (x + ny, x). Exact integers, no drift.
template <typename HasBit>
std::int64_t count_delta(const TermPlan& plan, std::size_t x, HasBit has) {
  std::int64_t delta = 0;
  if (plan.in_window[x]) {
    const std::int32_t pd = plan.partner_down[x];
    if (pd >= 0 &&
        (plan.zero_shift || has(static_cast<std::size_t>(pd)))) {
      ++delta;
    }
  }
  if (!plan.zero_shift) {
    const std::int32_t pu = plan.partner_up[x];
    if (pu >= 0 && has(static_cast<std::size_t>(pu)) &&
        plan.in_window[static_cast<std::size_t>(pu)]) {
      ++delta;
    }
  }
  return delta;
}

std::vector<Cell> mask_to_cells(std::uint64_t mask,
                                const std::vector<Cell>& cells) {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (mask & (1ULL << i)) out.push_back(cells[i]);
  }
  return out;
}

// Ascending index sequences compared lexicographically, on raw masks (bits
// ordered by cell index). At the lowest differing bit i, the side holding i
// wins unless the other side is a strict prefix, i.e. has no bits above i.
bool mask_lex_smaller(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t diff = a ^ b;
  if (diff == 0) return false;
  const int i = std::countr_zero(diff);
  const std::uint64_t above = ~((2ULL << i) - 1);
  if (a & (1ULL << i)) {
    return (b & above) != 0;
  }
  return (a & above) == 0;
}

MinimizeResult minimize_exact(const Functional& g,
                              const std::vector<Cell>& cells) {
  const std::size_t n_cells = cells.size();
  const std::vector<TermPlan> plans = build_plans(g, cells);
  std::vector<double> coeffs;
  coeffs.reserve(plans.size());
  for (const TermPlan& p : plans) coeffs.push_back(p.coefficient);
  std::vector<std::uint64_t> counts(plans.size(), 0);

  std::uint64_t mask = 0;
  double best = functional_value_from_counts(g.constant(), coeffs, counts,
                                             g.resolution(), g.dim());
  std::uint64_t best_mask = 0;
  std::uint64_t evaluations = 1;

  const std::uint64_t total = 1ULL << n_cells;
  for (std::uint64_t t = 1; t < total; ++t) {
    const int bit = std::countr_zero(t);
    const std::uint64_t bit_mask = 1ULL << bit;
    const std::uint64_t base = mask & ~bit_mask;
    const bool adding = (mask & bit_mask) == 0;
    auto has = [&](std::size_t i) { return (base >> i) & 1ULL; };
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const std::int64_t d = count_delta(plans[i], static_cast<std::size_t>(bit), has);
      counts[i] = adding ? counts[i] + static_cast<std::uint64_t>(d)
                         : counts[i] - static_cast<std::uint64_t>(d);
    }
    mask ^= bit_mask;
    ++evaluations;
    const double value = functional_value_from_counts(
        g.constant(), coeffs, counts, g.resolution(), g.dim());
    if (value < best) {
      best = value;
      best_mask = mask;
    } else if (value == best && mask_lex_smaller(mask, best_mask)) {
      best_mask = mask;
    }
  }

  MinimizeResult r;
  r.value = best;
  r.argmin = PixelSet(g.dim(), g.resolution(), mask_to_cells(best_mask, cells));
  r.exact = true;
  r.evaluations = evaluations;
  return r;
}

MinimizeResult minimize_heuristic(const Functional& g,
                                  const std::vector<Cell>& cells,
                                  std::uint64_t budget) {
  const std::size_t n_cells = cells.size();
  const std::vector<TermPlan> plans = build_plans(g, cells);
  std::vector<double> coeffs;
  for (const TermPlan& p : plans) coeffs.push_back(p.coefficient);

  std::uint64_t evaluations = 0;
  double best = g.constant();
  std::vector<char> best_member(n_cells, 0);
  bool have_best = false;

  CounterRng rng = CounterRng::derive_stream(0x9e3779b9, 1);
  const int n_starts = 10;
  for (int start = 0; start < n_starts; ++start) {
    std::vector<char> member(n_cells, 0);
    if (start == 1) member.assign(n_cells, 1);
    if (start >= 2) {
      for (std::size_t i = 0; i < n_cells; ++i) {
        member[i] = (rng.next_u64() & 1ULL) ? 1 : 0;
      }
    }
    std::vector<std::uint64_t> counts(plans.size(), 0);
    for (std::size_t i = 0; i < plans.size(); ++i) {
      // Recount from scratch for the start configuration.
      std::int64_t c = 0;
      for (std::size_t x = 0; x < n_cells; ++x) {
        if (!member[x] || !plans[i].in_window[x]) continue;
        const std::int32_t pd = plans[i].partner_down[x];
        if (pd >= 0 && member[static_cast<std::size_t>(pd)]) ++c;
      }
      counts[i] = static_cast<std::uint64_t>(c);
    }
    double value = functional_value_from_counts(g.constant(), coeffs, counts,
                                                g.resolution(), g.dim());
    ++evaluations;

    bool improved = true;
    while (improved && evaluations < budget) {
      improved = false;
      double best_gain = 0.0;
      std::size_t best_x = 0;
      std::vector<std::int64_t> best_deltas;
      for (std::size_t x = 0; x < n_cells; ++x) {
        auto has = [&](std::size_t i) { return i != x && member[i]; };
        std::vector<std::int64_t> deltas(plans.size());
        double gain = 0.0;
        for (std::size_t i = 0; i < plans.size(); ++i) {
          deltas[i] = count_delta(plans[i], x, has);
          const double contribution =
              coeffs[i] *
              scaled_count(static_cast<std::uint64_t>(std::abs(deltas[i])),
                           g.resolution(), g.dim()) *
              (deltas[i] < 0 ? -1.0 : 1.0);
          gain += member[x] ? -contribution : contribution;
        }
        ++evaluations;
        if (gain < best_gain - 1e-15) {
          best_gain = gain;
          best_x = x;
          best_deltas = deltas;
        }
      }
      if (best_gain < 0.0) {
        const bool adding = !member[best_x];
        for (std::size_t i = 0; i < plans.size(); ++i) {
          counts[i] = adding
                          ? counts[i] + static_cast<std::uint64_t>(best_deltas[i])
                          : counts[i] - static_cast<std::uint64_t>(best_deltas[i]);
        }
        member[best_x] = adding ? 1 : 0;
        value = functional_value_from_counts(g.constant(), coeffs, counts,
                                             g.resolution(), g.dim());
        improved = true;
      }
    }
    if (!have_best || value < best) {
      best = value;
      best_member = member;
      have_best = true;
    }
  }

  std::vector<Cell> argmin_cells;
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (best_member[i]) argmin_cells.push_back(cells[i]);
  }
  MinimizeResult r;
  r.value = best;
  r.argmin = PixelSet(g.dim(), g.resolution(), std::move(argmin_cells));
  r.exact = false;
  r.evaluations = evaluations;
  return r;
}

}  // namespace

MinimizeResult minimize_functional(const Functional& g, std::uint64_t budget) {
  const std::vector<Cell> cells = g.domain_cells();
  if (cells.empty()) {
    MinimizeResult r;
    r.value = g.constant();
    r.argmin = PixelSet::empty(g.dim(), g.resolution());
    r.exact = true;
    r.evaluations = 1;
    return r;
  }
  if (cells.size() < 64 && (1ULL << cells.size()) <= budget) {
    return minimize_exact(g, cells);
  }
  return minimize_heuristic(g, cells, budget);
}

NonnegativityResult is_nonnegative(const Functional& g, std::uint64_t budget) {
  const MinimizeResult m = minimize_functional(g, budget);
  NonnegativityResult r;
  r.min_value = m.value;
  r.exact = m.exact;
  if (m.value < 0.0) {
    r.status = NonnegativityResult::Status::Witness;
    r.witness = m.argmin;
  } else if (m.exact) {
    r.status = NonnegativityResult::Status::Certificate;
  } else {
    r.status = NonnegativityResult::Status::Inconclusive;
  }
  return r;
}

double apply_to_s2(const Functional& g, const S2Curve& s2) {
  if (s2.dim() != g.dim()) {
    throw std::invalid_argument("apply_to_s2: dimension mismatch");
  }
  double phi = g.constant();
  for (const FunctionalTerm& t : g.terms()) {
    phi += t.coefficient * s2.value_at_shift(t.shift) * t.window.measure();
  }
  return phi;
}

// ---- Realisability screening ------------------------------------------------------

namespace {

struct ProbeOutcome {
  bool violated = false;
  FunctionalWitness witness;
};

// Checks Phi(g) >= min_A g(A) - tol; on failure records the probe shifted so
// that its minimum is zero and Phi is negative.
ProbeOutcome run_probe(const Functional& g, const S2Curve& s2,
                       const std::string& family, const ProbeScale& scale,
                       double tol, std::uint64_t budget) {
  ProbeOutcome out;
  const MinimizeResult m = minimize_functional(g, budget);
  if (!m.exact) return out;  // only exact minima yield sound witnesses
  const double phi = apply_to_s2(g, s2);
  if (phi < m.value - tol) {
    const Functional normalized = g.shifted_constant(-m.value);
    out.violated = true;
    out.witness.probe = normalized;
    out.witness.min_value = 0.0;
    out.witness.phi = phi - m.value;
    out.witness.family = family;
    out.witness.scale = scale;
  }
  return out;
}

// Grid shifts k/n with |k_i| <= span_i / divisor, restricted to shifts the
// curve can evaluate (callback, or on the sample lattice). The cap keeps the
// probe domains W u (-y+W) small enough for exact enumeration.
std::vector<std::vector<std::int64_t>> lattice_shift_pool(const S2Curve& s2,
                                                          const ProbeScale& scale,
                                                          int dim, int divisor) {
  std::vector<std::int64_t> cap(static_cast<std::size_t>(dim), 0);
  for (const Box& b : scale.window.boxes()) {
    for (int i = 0; i < dim; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const std::int64_t span = b.hi[u] - b.lo[u];
      cap[u] = std::max<std::int64_t>(cap[u],
                                      std::max<std::int64_t>(1, span / divisor));
    }
  }
  std::vector<std::vector<std::int64_t>> pool;
  std::vector<std::int64_t> k(static_cast<std::size_t>(dim), 0);
  for (int i = 0; i < dim; ++i) {
    k[static_cast<std::size_t>(i)] = -cap[static_cast<std::size_t>(i)];
  }
  const auto reset = k;
  while (true) {
    bool nonzero = false;
    for (std::int64_t v : k) nonzero |= (v != 0);
    if (nonzero) {
      const Shift y = Shift::of_cells(k, scale.n);
      if (s2.evaluable_at(y) && s2.evaluable_at(y.negated())) pool.push_back(k);
    }
    int axis = 0;
    while (axis < dim) {
      const auto u = static_cast<std::size_t>(axis);
      ++k[u];
      if (k[u] <= cap[u]) break;
      k[u] = reset[u];
      ++axis;
    }
    if (axis == dim) break;
  }
  return pool;
}

}  // namespace

std::vector<ProbeScale> default_scales(int dim,
                                       const std::vector<std::int64_t>& ns,
                                       std::int64_t max_cells) {
  std::vector<ProbeScale> scales;
  for (std::int64_t n : ns) {
    // Per-axis extent of (0, L)^d with at most max_cells cells.
    std::int64_t cells_per_axis = 1;
    while (true) {
      std::int64_t total = 1;
      for (int i = 0; i < dim; ++i) total *= (cells_per_axis + 1);
      if (total > max_cells) break;
      ++cells_per_axis;
    }
    std::vector<std::int32_t> lo(static_cast<std::size_t>(dim), 0);
    std::vector<std::int32_t> hi(static_cast<std::size_t>(dim),
                                 static_cast<std::int32_t>(cells_per_axis));
    scales.push_back({n, Window::box(n, lo, hi)});
  }
  return scales;
}

RealisabilityReport realisability_report(const S2Curve& s2,
                                         const RealisabilityOptions& opts) {
  RealisabilityReport rep;
  rep.notes =
      "Necessary-condition screening only: REJECTED carries a recheckable "
      "witness; CONSISTENT does not construct a realizing random set.";
  rep.probe_families = {"zero-pair", "corner", "shift-triangle", "sigma",
                        "perimeter-mix", "random-sparse"};

  rep.lattice_violations = necessary_conditions(s2, opts.lattice);
  if (!rep.lattice_violations.empty()) rep.rejected = true;

  for (int j = 0; j < s2.dim(); ++j) {
    rep.lipschitz.push_back(lipschitz_at_zero(s2, j));
    rep.per_s_lower_bound += 2.0 * rep.lipschitz.back().sup_quotient;
  }

  const int d = s2.dim();
  CounterRng rng = CounterRng::derive_stream(opts.probe_seed, 42);

  for (const ProbeScale& scale : opts.scales) {
    rep.scales_tested.push_back(scale);
    const std::int64_t n = scale.n;
    const Window& w = scale.window;
    const auto pool = lattice_shift_pool(s2, scale, d, 2);
    const auto small_pool = lattice_shift_pool(s2, scale, d, 3);
    if (pool.empty()) continue;

    auto check = [&](const Functional& g, const char* family) {
      ++rep.probes_evaluated;
      const ProbeOutcome o = run_probe(g, s2, family, scale, opts.tolerance,
                                       opts.budget);
      if (o.violated) {
        rep.rejected = true;
        rep.functional_witnesses.push_back(o.witness);
      }
    };

    const Shift zero = Shift::zero(d);
    // zero-pair and corner probes over the whole pool.
    for (const auto& k : pool) {
      const Shift y = Shift::of_cells(k, n);
      check(Functional(d, n, 0.0,
                       {{1.0, zero, w}, {-1.0, y, w}}),
            "zero-pair");
      check(Functional(d, n, w.measure(),
                       {{-1.0, zero, w},
                        {-1.0, zero, w.translated(y.negated())},
                        {1.0, y, w}}),
            "corner");
    }

    // shift-triangle probes over sampled pairs of small shifts (the domain
    // spans three window translates).
    const std::size_t n_pairs =
        small_pool.empty()
            ? 0
            : std::min<std::size_t>(small_pool.size() * 2,
                                    static_cast<std::size_t>(
                                        opts.random_probes_per_scale));
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const auto& ky = small_pool[rng.next_below(small_pool.size())];
      const auto& kz = small_pool[rng.next_below(small_pool.size())];
      std::vector<std::int64_t> kdiff(static_cast<std::size_t>(d));
      bool same = true;
      for (int t = 0; t < d; ++t) {
        kdiff[static_cast<std::size_t>(t)] = kz[static_cast<std::size_t>(t)] -
                                             ky[static_cast<std::size_t>(t)];
        same &= kdiff[static_cast<std::size_t>(t)] == 0;
      }
      if (same) continue;
      const Shift y = Shift::of_cells(ky, n);
      const Shift z = Shift::of_cells(kz, n);
      const Shift zmy = Shift::of_cells(kdiff, n);
      if (!s2.evaluable_at(zmy)) continue;
      const Window wy = w.translated(y.negated());
      check(Functional(d, n, 0.0,
                       {{1.0, zero, wy},
                        {-1.0, zmy, wy},
                        {-1.0, y, w},
                        {1.0, z, w}}),
            "shift-triangle");
    }

    // sigma probes: unnormalized four-term differences per axis.
    for (int axis = 0; axis < d; ++axis) {
      for (std::int64_t m = 1; m <= 2; ++m) {
        const Shift u = Shift::axis(d, axis, Rat(m, n));
        if (!s2.evaluable_at(u)) continue;
        const Window w_minus = erode_segment_cells(w, axis, -m);
        const Window w_plus = erode_segment_cells(w, axis, m);
        std::vector<FunctionalTerm> terms;
        if (!w_minus.is_empty()) {
          terms.push_back({1.0, zero, w_minus});
          terms.push_back({-1.0, u, w_minus});
        }
        if (!w_plus.is_empty()) {
          terms.push_back({1.0, zero, w_plus});
          terms.push_back({-1.0, u.negated(), w_plus});
        }
        if (terms.empty()) continue;
        check(Functional(d, n, 0.0, std::move(terms)), "sigma");
      }
    }

    // perimeter-mix: beta-weighted positive combination of sigma forms.
    {
      std::vector<FunctionalTerm> terms;
      for (std::int64_t m = 1; m <= 2; ++m) {
        const double bw = beta_weight(m, d);
        for (int axis = 0; axis < d; ++axis) {
          const Shift u = Shift::axis(d, axis, Rat(m, n));
          if (!s2.evaluable_at(u)) continue;
          const Window w_minus = erode_segment_cells(w, axis, -m);
          const Window w_plus = erode_segment_cells(w, axis, m);
          if (!w_minus.is_empty()) {
            terms.push_back({bw, zero, w_minus});
            terms.push_back({-bw, u, w_minus});
          }
          if (!w_plus.is_empty()) {
            terms.push_back({bw, zero, w_plus});
            terms.push_back({-bw, u.negated(), w_plus});
          }
        }
      }
      if (!terms.empty()) {
        check(Functional(d, n, 0.0, std::move(terms)), "perimeter-mix");
      }
    }

    // random sparse functionals with small integer coefficients; the shifted
    // window is kept inside the scale window so the domain stays small.
    const Box& frame = w.boxes().front();
    for (int probe = 0; probe < opts.random_probes_per_scale; ++probe) {
      const int q = 2 + static_cast<int>(rng.next_below(3));
      std::vector<FunctionalTerm> terms;
      bool ok = true;
      for (int t = 0; t < q && ok; ++t) {
        std::vector<std::int32_t> lo(static_cast<std::size_t>(d));
        std::vector<std::int32_t> hi(static_cast<std::size_t>(d));
        std::vector<std::int64_t> k(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
          const auto u = static_cast<std::size_t>(i);
          const std::int64_t span = frame.hi[u] - frame.lo[u];
          const std::int64_t a = frame.lo[u] +
                                 static_cast<std::int64_t>(rng.next_below(
                                     static_cast<std::uint64_t>(span)));
          const std::int64_t len = 1 + static_cast<std::int64_t>(rng.next_below(
                                           static_cast<std::uint64_t>(
                                               frame.hi[u] - a)));
          lo[u] = static_cast<std::int32_t>(a);
          hi[u] = static_cast<std::int32_t>(a + len);
          // shift range keeping -y + W_t inside the frame
          const std::int64_t kmin = lo[u] - frame.hi[u] + len;
          const std::int64_t kmax = lo[u] - frame.lo[u];
          k[u] = kmin + static_cast<std::int64_t>(
                            rng.next_below(static_cast<std::uint64_t>(
                                kmax - kmin + 1)));
        }
        const Shift y = Shift::of_cells(k, n);
        if (!s2.evaluable_at(y)) {
          ok = false;
          break;
        }
        double a = 0.0;
        while (a == 0.0) {
          a = static_cast<double>(static_cast<std::int64_t>(rng.next_below(7)) - 3);
        }
        terms.push_back({a, y, Window::box(n, lo, hi)});
      }
      if (!ok) continue;
      check(Functional(d, n, 0.0, std::move(terms)), "random-sparse");
    }
  }
  return rep;
}

}  // namespace covo
