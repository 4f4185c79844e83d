#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "covo/grid.hpp"
#include "covo/s2curve.hpp"

namespace covo {

/// Finite union of disjoint nonempty closed intervals [a_{2i-1}, a_{2i}],
/// a_1 < a_2 < ... strictly. The perimeter in (a,b) is the number of
/// interval endpoints inside (a,b); the one-dimensional closed
/// representative of any finite-perimeter set has this shape.
class IntervalSet {
 public:
  struct Interval {
    double lo = 0.0;
    double hi = 0.0;  // lo <= hi; degenerate intervals are kept out
  };

  IntervalSet() = default;
  /// Merges overlapping or touching inputs into the canonical disjoint form.
  static IntervalSet from_intervals(std::vector<Interval> raw);

  const std::vector<Interval>& intervals() const { return parts_; }
  bool is_empty() const { return parts_.empty(); }
  double total_length() const;

  IntervalSet translated(double y) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet clipped(double lo, double hi) const;

  /// L^1(X n (y+X) n (a,b)); exact interval arithmetic.
  double local_covariogram(double y, double a, double b) const;
  /// Endpoints strictly inside (a,b) = Per(X;(a,b)).
  int perimeter(double a, double b) const;
  /// Four-term covariogram difference over the window (a,b).
  double sigma(double eps, double a, double b) const;

 private:
  std::vector<Interval> parts_;
};

/// {0, 1/2, 1}: value of the Lebesgue density of the closed representative.
double lebesgue_density(const IntervalSet& x, double point);

/// IVLS1 text format: header line "IVLS1", then one "lo hi" pair per line.
std::string write_ivls1(const IntervalSet& x);
IntervalSet read_ivls1(std::istream& in, const std::string& origin = "<input>");

/// Maximal runs of consecutive cells of a 1-D pixel set, as closed intervals.
IntervalSet intervals_from_pixels(const PixelSet& a);
/// Endpoints snapped to the nearest multiple of 1/n; exact once the grid
/// resolves all endpoints.
PixelSet rasterize_intervals(const IntervalSet& x, std::int64_t n);

// ---- Boolean models -----------------------------------------------------------

enum class GrainKind1D { FixedLength, ExponentialLength };

/// Stationary Boolean model on the line: Poisson germs of intensity lambda,
/// each growing a segment [x, x+L] with L fixed or exponential. Simulation
/// windows are dilated on the left by the grain bound (the exact length, or
/// the 1 - 1e-9 quantile for exponential grains) so the law inside the
/// window is stationary; the truncation bias bound is reported.
struct BooleanModel1D {
  double lambda = 1.0;
  GrainKind1D grain = GrainKind1D::FixedLength;
  double grain_param = 1.0;  // length, or mean length
  std::uint64_t seed = 1;

  double grain_bound() const;
  double truncation_bias_bound() const;  // missed-germ probability mass per run
};

enum class GrainKind2D { Square, Disk };

/// Planar Boolean model rasterized to a pixel set: cells whose center is
/// covered by some grain. Germs are Poisson in the window dilated by the
/// grain diameter.
struct BooleanModel2D {
  double lambda = 1.0;
  GrainKind2D grain = GrainKind2D::Square;
  double grain_param = 1.0;  // square side, or disk radius
  std::int64_t resolution = 16;
  std::uint64_t seed = 1;

  double grain_bound() const;
};

/// One realization restricted to [window_lo, window_hi]; a fixed seed and
/// replicate index give a bit-identical result.
IntervalSet simulate(const BooleanModel1D& model, double window_lo,
                     double window_hi, std::uint64_t replicate = 0);
/// Realization on the dilated window, not clipped (estimator building block).
IntervalSet simulate_raw(const BooleanModel1D& model, double window_lo,
                         double window_hi, std::uint64_t replicate = 0);

PixelSet simulate(const BooleanModel2D& model, const Window& window,
                  std::uint64_t replicate = 0);

/// Cells whose center lies within radius of the origin-centered disk.
PixelSet rasterize_disk(double radius, std::int64_t n);

// ---- Estimators ----------------------------------------------------------------

struct EstimateStats {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::uint32_t replicates = 0;
};

struct S2Estimate {
  S2Curve curve;                       // samples with standard errors
  std::vector<double> shifts;          // h * index, for convenience
  EstimateStats volume_fraction;       // the y = 0 entry
};

/// Monte Carlo mean of delta_{y;(0,1)}(X) over R replicates, one realization
/// per replicate shared across all shifts. Shifts are index * step.
S2Estimate estimate_specific_covariogram(const BooleanModel1D& model,
                                         double step,
                                         const std::vector<std::int32_t>& indices,
                                         std::uint32_t replicates);

/// Monte Carlo mean of the endpoint count in (0,1).
EstimateStats estimate_specific_perimeter(const BooleanModel1D& model,
                                          std::uint32_t replicates);

/// Face-count estimate of the pixelized model's anisotropic perimeter per
/// unit area (window (0,1)^2).
EstimateStats estimate_specific_perimeter(const BooleanModel2D& model,
                                          std::uint32_t replicates);

/// Monte Carlo mean of sigma_{eps;(0,1)}(X); used by the monotone-in-eps and
/// bounded-by-perimeter diagnostics.
EstimateStats estimate_sigma(const BooleanModel1D& model, double eps,
                             std::uint32_t replicates);

// ---- Closed-form references -----------------------------------------------------

/// Coverage probability of the fixed-length model: 1 - exp(-lambda ell).
double boolean1d_volume_fraction(double lambda, double ell);
/// Two-point function: 1 - 2 e^{-lambda ell} + e^{-lambda (ell + min(|y|, ell))},
/// from the vacancy of the two germ shadows.
double boolean1d_s2(double lambda, double ell, double y);
/// Mean endpoint count per unit length: 2 lambda e^{-lambda ell}.
double boolean1d_specific_perimeter(double lambda, double ell);

S2Curve boolean1d_closed_form_curve(double lambda, double ell, double step,
                                    std::int32_t max_index);

}  // namespace covo
