#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covo/covariogram.hpp"
#include "covo/grid.hpp"
#include "covo/s2curve.hpp"

namespace covo {

/// One covariogram term a * delta_{y;W}. Shift and window must be aligned to
/// the functional's resolution.
struct FunctionalTerm {
  double coefficient = 0.0;
  Shift shift;
  Window window;
};

/// g = c + sum_i a_i delta_{y_i;W_i} with grid-aligned data. The domain is
/// the union of the W_i and their -y_i translates: g(A) = g(A n dom(g)) for
/// every measurable A.
class Functional {
 public:
  Functional() : Functional(1, 1, 0.0, {}) {}
  Functional(int dim, std::int64_t resolution, double constant,
             std::vector<FunctionalTerm> terms);

  int dim() const { return dim_; }
  std::int64_t resolution() const { return res_; }
  double constant() const { return constant_; }
  const std::vector<FunctionalTerm>& terms() const { return terms_; }

  const Window& domain() const { return domain_; }
  std::vector<Cell> domain_cells() const { return domain_.cells(); }

  double evaluate(const PixelSet& a) const;

  /// g - shift (adjusts the constant term only).
  Functional shifted_constant(double delta) const;

 private:
  int dim_;
  std::int64_t res_;
  double constant_;
  std::vector<FunctionalTerm> terms_;
  Window domain_;
};

/// Canonical conversion from exact per-term counts to the functional value;
/// the enumerator, the naive oracle and Functional::evaluate all call this,
/// so equal counts give bit-identical doubles.
double functional_value_from_counts(double constant,
                                    const std::vector<double>& coefficients,
                                    const std::vector<std::uint64_t>& counts,
                                    std::int64_t n, int d);

/// Sparse coefficients beta_{k,l} with
///   g(A) = c + sum_{k,l in I_A} beta_{k,l}
/// for every pixel set A inside dom(g): the quadratic form over binary cell
/// indicators whose feasible set is the correlation polytope. Entries are
/// stored unscaled (the common factor n^-d is applied at evaluation), so
/// integer-coefficient functionals reconstruct exactly.
class BetaMatrix {
 public:
  struct Entry {
    std::uint32_t row = 0;  // index into cells()
    std::uint32_t col = 0;
    double value = 0.0;  // unscaled: multiply by n^-d
  };

  BetaMatrix(int dim, std::int64_t res, double constant, std::vector<Cell> cells,
             std::vector<Entry> entries);

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Entry>& entries() const { return entries_; }  // sorted
  double constant() const { return constant_; }
  std::int64_t resolution() const { return res_; }
  int dim() const { return dim_; }

  double evaluate(const PixelSet& a) const;

 private:
  int dim_;
  std::int64_t res_;
  double constant_;
  std::vector<Cell> cells_;
  std::vector<Entry> entries_;
};

BetaMatrix beta_matrix(const Functional& g);

// ---- Minimization ------------------------------------------------------------

/// Exact minimization over all measurable sets: the infimum of any
/// grid-aligned covariogram functional is attained on a pixel set inside its
/// domain, so enumerating binary cell vectors suffices. Subsets are walked
/// in Gray-code order with exact integer updates of the per-term pair
/// counts; ties go to the lexicographically smallest index set.
struct MinimizeResult {
  double value = 0.0;
  PixelSet argmin;
  bool exact = false;   // false: best value found by greedy descent only
  std::uint64_t evaluations = 0;
};

/// budget caps the number of evaluated subsets; above it a multi-start local
/// descent runs instead and the result is labeled non-exact.
MinimizeResult minimize_functional(const Functional& g,
                                   std::uint64_t budget = 1ULL << 24);

struct NonnegativityResult {
  enum class Status { Certificate, Witness, Inconclusive } status;
  double min_value = 0.0;
  PixelSet witness;  // meaningful for Witness
  bool exact = false;
};

/// Sound in both directions at the functional's resolution: a certificate
/// means min over all measurable sets is >= 0; a witness set evaluates below
/// zero. Full admissibility would require this at every resolution
/// (refinement only makes the test stricter). Minima are attained by pixel
/// unions, which are closed sets, so verdicts over measurable sets and over
/// closed sets coincide; the one-dimensional interval representative
/// exercises this in the tests.
NonnegativityResult is_nonnegative(const Functional& g,
                                   std::uint64_t budget = 1ULL << 24);

/// Phi(g) = c + sum_i a_i S2(y_i) L^d(W_i): the value of g under the
/// stationary ansatz gamma(y;W) = S2(y) L^d(W). Phi(1) = 1 by construction.
/// Rejects shifts the curve cannot evaluate.
double apply_to_s2(const Functional& g, const S2Curve& s2);

// ---- Realisability screening ---------------------------------------------------

struct ProbeScale {
  std::int64_t n = 1;
  Window window;  // at resolution n
};

struct FunctionalWitness {
  Functional probe;       // normalized so its exact minimum is 0
  double min_value = 0.0; // minimum of the normalized probe (0 up to float)
  double phi = 0.0;       // Phi(probe) < 0 exhibits the violation
  std::string family;
  ProbeScale scale;
};

struct RealisabilityOptions {
  std::vector<ProbeScale> scales;
  std::uint64_t probe_seed = 7;
  int random_probes_per_scale = 120;
  double tolerance = 1e-9;
  std::uint64_t budget = 1ULL << 24;
  NecessaryConditionOptions lattice;
};

/// The screening is one-sided: REJECTED comes with a recheckable witness,
/// while CONSISTENT only says no necessary condition failed at the tested
/// scales. No realizing random set is ever constructed.
struct RealisabilityReport {
  bool rejected = false;
  std::vector<S2Violation> lattice_violations;
  std::vector<FunctionalWitness> functional_witnesses;
  std::vector<LipschitzAtZero> lipschitz;  // per axis
  double per_s_lower_bound = 0.0;          // 2 * sum_j Lip_j lattice estimate
  std::vector<ProbeScale> scales_tested;
  std::vector<std::string> probe_families;
  std::uint64_t probes_evaluated = 0;
  std::string notes;
};

RealisabilityReport realisability_report(const S2Curve& s2,
                                         const RealisabilityOptions& opts);

/// Default probe scales for dimension d: resolutions ns with windows
/// (0, cells/n)^d holding at most max_cells cells.
std::vector<ProbeScale> default_scales(int dim, const std::vector<std::int64_t>& ns,
                                       std::int64_t max_cells);

}  // namespace covo
