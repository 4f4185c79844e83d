#pragma once

#include <cstdint>
#include <vector>

#include "covo/grid.hpp"

namespace covo {

/// A (shift, window) query for the local covariogram
/// delta_{y;W}(A) = L^d(A n (y+A) n W). Evaluation depends only on
/// A n (W u (-y+W)).
struct CovariogramQuery {
  Shift y;
  Window window;
};

/// Exact cell count behind delta_{y;W}(A): the value is count * n^-d.
/// Two evaluation paths exist (direct index lookups, and a dense bitmap
/// AND-popcount over the bounding box); they agree on integers and the
/// faster one is picked by set size.
std::uint64_t local_covariogram_count(const PixelSet& a, const Shift& y,
                                      const Window& w);
double local_covariogram(const PixelSet& a, const CovariogramQuery& q);
double local_covariogram(const PixelSet& a, const Shift& y, const Window& w);

namespace detail {
std::uint64_t covariogram_count_direct(const PixelSet& a,
                                       const std::vector<std::int64_t>& off,
                                       const Window& w);
std::uint64_t covariogram_count_bitmap(const PixelSet& a,
                                       const std::vector<std::int64_t>& off,
                                       const Window& w);
}  // namespace detail

/// Four-term covariogram difference
///   sigma_{u;W}(A) = (1/|u|) [ delta_{0;W-[-u,0]} - delta_{u;W-[-u,0]}
///                            + delta_{0;W-[0,u]}  - delta_{-u;W-[0,u]} ](A).
/// Always in [0, V_u(A;W)]; for pixel data it is constant in |u| on (0, 1/n]
/// and equals the directional variation at |u| = 1/n.
struct SigmaValue {
  std::int64_t count = 0;        // exact integer combination of the 4 counts
  std::uint64_t denominator = 1; // n^(d-1) * |m| where u = (m/n) e_j
  double value = 0.0;            // count / denominator
};
SigmaValue sigma(const PixelSet& a, const Shift& u, const Window& w);

/// Directional variation V_{e_j}(A;W) of a pixel set: the total area of
/// boundary faces orthogonal to e_j whose center lies strictly inside W.
/// Computed by face counting and cross-checked against sigma at |u| = 1/n;
/// the two integer counts must agree.
struct DirectionalVariation {
  std::uint64_t face_count = 0;
  std::uint64_t denominator = 1;  // n^(d-1)
  double value = 0.0;
};
DirectionalVariation directional_variation(const PixelSet& a, int axis,
                                           const Window& w);
/// Face counting alone, no sigma cross-check (used as the independent path).
std::uint64_t boundary_face_count(const PixelSet& a, int axis, const Window& w);

/// Anisotropic perimeter Per_B(A;W) = sum_j V_{e_j}(A;W). For pixel sets the
/// boundary is axis-aligned, so the isotropic perimeter Per(A;W) coincides
/// with Per_B(A;W) and the general bound Per <= Per_B <= sqrt(d) Per holds
/// with equality on the left.
struct PerimeterValue {
  std::vector<std::uint64_t> face_count_per_axis;
  std::uint64_t denominator = 1;  // n^(d-1)
  double value = 0.0;
};
PerimeterValue perimeter_B(const PixelSet& a, const Window& w);
double perimeter(const PixelSet& a, const Window& w);

/// Weights of the weighted anisotropic perimeter: beta_m = 2^-m (2m)^-d,
/// normalized so that sum_m beta_m L^d(U_m) = 1 with U_m = (-m,m)^d.
double beta_weight(std::int64_t m, int d);
/// sum_{m > p} beta_m by convergent partial summation; *remainder_bound (if
/// given) receives a rigorous bound on the truncated part, which is at or
/// below machine precision relative to the sum.
double beta_tail(std::int64_t p, int d, double* remainder_bound = nullptr);

/// Per_B^beta(A) = sum_{m>=1} beta_m Per_B(A;U_m). Per_B(A;U_m) is constant
/// once U_m contains closure(A), so the series reduces to a finite sum plus
/// beta_tail times the total perimeter.
struct WeightedPerimeterValue {
  double value = 0.0;
  double tail_coefficient = 0.0;   // sum of beta_m beyond the explicit terms
  double tail_remainder = 0.0;     // bound on the ignored part of the series
  std::int64_t m_star = 0;         // first m with U_m containing closure(A)
  std::vector<std::uint64_t> face_count_per_axis;  // total, in any U_m >= m_star
};
WeightedPerimeterValue weighted_perimeter(const PixelSet& a);

/// Truncation parameters for g_{n,p}; beta weights are fixed by beta_weight.
struct WeightedPerimeterParams {
  std::int64_t resolution = 1;
  std::int64_t depth = 1;  // p
};

/// The covariogram functional that agrees with Per_B^beta on every pixel set
/// inside (-p,p)^d:
///   g_{n,p}(A) = sum_{m=1}^{p} beta_m sum_j sigma_{e_j/n; U_m}(A)
///              + (sum_{m>p} beta_m) sum_j sigma_{e_j/n; U_n^p}(A),
/// with U_n^p = (-p-1/n, p+1/n)^d. Window convention, pinned deliberately:
/// the sigma window in the finite sum varies with the summation index m,
/// and the tail term uses the fixed window U_n^p. A tempting shorthand
/// writes these as U_n and U_p; that reading breaks the identity with
/// Per_B^beta and is not what this function computes.
struct GnpValue {
  double value = 0.0;
  double tail_coefficient = 0.0;
  double tail_remainder = 0.0;
};
GnpValue g_np(const PixelSet& a, std::int64_t n, std::int64_t p);

/// Clipping error bound: |g_{n,p}(A) - g_{n,p}(A n (-p,p)^d)| <= E_{n,p}
///   E_{n,p} = 8 d n 2^-p (p+1)^-d ((p + 1/n)^d - p^d).
double E_np(std::int64_t n, std::int64_t p, int d);

/// Margins of the continuity bounds; each margin = rhs - lhs must be >= 0.
///   window bound:  |delta_{y;U}(A) - delta_{y;W}(A)| <= L^d(U /\ W)
///   set bound:     |delta_{y;W}(A) - delta_{y;W}(B)| <= 2 L^d((A /\ B) n (W u (-y+W)))
///   combined:      |delta_{y;U}(A) - delta_{y;W}(B)| <= both added
struct ContinuityBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};
struct ContinuityReport {
  ContinuityBound window_bound;
  ContinuityBound set_bound;
  ContinuityBound combined_bound;
};
ContinuityReport continuity_bounds_check(const PixelSet& a, const PixelSet& b,
                                         const CovariogramQuery& q,
                                         const Window& u);

}  // namespace covo
