#pragma once

// Finite-difference eigensolver for H = -d^2/dx^2 + V(x) with complex V on
// a Dirichlet box [-L, L]. It serves as the independent check of every
// analytic level produced by the spectra module.

#include <optional>
#include <span>
#include <vector>

#include "pcs/core_model.hpp"

namespace pcs {

/// N interior nodes x_j = -L + (j + 1) h, h = 2L / (N + 1).
struct Grid {
  double L = 12.0;
  int N = 4000;

  double h() const noexcept { return 2.0 * L / (N + 1); }
  /// Node j, computed so that x(j) == -x(N - 1 - j) exactly.
  double x(int j) const noexcept { return (j + 1 - 0.5 * (N + 1)) * h(); }
  /// Same box, spacing halved: N' + 1 = 2 (N + 1).
  Grid refined() const noexcept { return {L, 2 * N + 1}; }
};

void validate(const Grid& g);

/// Second-order central differences of -d^2/dx^2 + V - e0.
///
/// The matrix is tridiagonal and complex symmetric: both off-diagonals equal
/// -1/h^2 and diag[j] = 2/h^2 + V(x_j) - e0.
struct DiscretizedOperator {
  std::vector<Complex> diag;
  double offdiag = 0.0;
  Grid grid;

  std::size_t size() const noexcept { return diag.size(); }
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  /// Max absolute row sum.
  double norm_inf() const noexcept;
};

DiscretizedOperator discretize(const PotentialCoefficients& v, const Grid& grid);

/// Smallest residual ||H psi - E psi|| / ||psi|| that double precision can
/// certify for this operator: 32 eps ||H||_inf.
double residual_floor(const DiscretizedOperator& op) noexcept;

struct EigenResult {
  Complex energy;
  /// ||H psi - E psi|| / ||psi||.
  double residual = 0.0;
  /// max |psi| over the outermost 5% of nodes on either side, over max |psi|.
  double boundary_leak = 0.0;
  int iterations = 0;
  /// |psi^T psi| / ||psi||^2; tends to zero at an exceptional point.
  double c_norm = 0.0;
  /// Unit-norm eigenvector.
  std::vector<Complex> state;
};

/// Shifted inverse iteration with partial-pivoting tridiagonal LU, switching
/// to Rayleigh-quotient shifts once the residual is small.
///
/// Starts from the normalized all-ones vector. Converged when the residual is
/// at most max(tol, residual_floor(op)). A shift that makes the factorization
/// exactly singular is moved by tol (1 + i). Throws NoConvergence.
EigenResult eigen_near(const DiscretizedOperator& op, Complex shift, double tol = 1e-10, int max_iter = 200);

/// Default tolerances.
inline constexpr double kEigenTol = 1e-10;
inline constexpr double kMatchTol = 1e-6;
inline constexpr double kDedupTol = 1e-8;
inline constexpr double kLeakTol = 1e-8;

struct SeedFailure {
  Complex shift;
  int max_iter = 0;
};

struct BoundSpectrum {
  /// Sorted by (Re, Im). Duplicates closer than max(kDedupTol,
  /// 4 (r1 + r2) / c_norm) are merged, keeping the smaller residual.
  std::vector<EigenResult> levels;
  std::vector<SeedFailure> failures;
  int scanned_shifts = 0;
};

struct BoundSpectrumOptions {
  double tol = kEigenTol;
  int max_iter = 200;
  /// Also scan a lattice of shifts over the rectangle spanned by the seeds.
  bool fallback_scan = true;
  /// Lattice spacing of the fallback scan.
  double scan_step = 0.5;
  /// Iteration cap for scan shifts; shifts near the box continuum rarely
  /// converge and are dropped.
  int scan_max_iter = 40;
};

/// Every eigenvalue whose eigenfunction decays into the box, i.e.
/// Re sqrt(-E) > 8 / L. For real E this is E < -64 / L^2.
///
/// Each prediction seeds inverse iteration at E and E +/- i d, E +/- d with
/// d = h / 4, so the two members of a split exceptional pair are both found.
/// The fallback scan covers [min Re - 1, max(0, max Re)] x [-|Im|max - 1,
/// |Im|max + 1]. Seeds run concurrently; the result is deterministic.
/// Throws DomainTooSmall when a bound state has boundary_leak > kLeakTol.
BoundSpectrum bound_spectrum(const PotentialCoefficients& v, const Grid& grid,
                             std::span<const Complex> predictions,
                             const BoundSpectrumOptions& options = {});

/// One level of the Richardson-extrapolated spectrum.
struct NumericLevel {
  Complex energy;
  /// 2 when a pair on both grids collapses like O(h): the discrete splitting
  /// of a defective (exceptional-point) eigenvalue. The pair mean is used.
  int multiplicity = 1;
  Complex coarse_energy;
  Complex fine_energy;
  double residual = 0.0;
  double boundary_leak = 0.0;
  double c_norm = 0.0;
  /// False when no partner was found on the refined grid.
  bool extrapolated = true;
};

struct NumericSpectrum {
  Grid coarse;
  Grid fine;
  std::vector<NumericLevel> levels;
  int failed_seeds = 0;
};

/// bound_spectrum on grid and on grid.refined(), levels paired and combined
/// as (4 E_fine - E_coarse) / 3.
NumericSpectrum extrapolated_spectrum(const PotentialCoefficients& v, const Grid& grid,
                                      std::span<const Complex> predictions,
                                      const BoundSpectrumOptions& options = {});

/// Box and spacing sized from the predicted levels: L = max(12, 26 / kappa_min)
/// / alpha-scaled, h small enough that extrapolated levels are good to
/// well under kMatchTol.
Grid recommended_grid(const PotentialCoefficients& v, std::span<const Complex> predictions);

struct LevelMatch {
  Complex analytic;
  int analytic_multiplicity = 1;
  Complex numeric;
  int numeric_multiplicity = 1;
  double delta = 0.0;
};

struct MatchReport {
  std::vector<LevelMatch> matched;
  std::vector<Complex> unmatched_analytic;
  std::vector<Complex> unmatched_numeric;
  double max_delta = 0.0;
  int multiplicity_mismatches = 0;
  bool pass = false;
};

/// Greedy nearest pairing of analytic and numeric levels.
///
/// Analytic duplicates closer than kDedupTol merge into one level with a
/// multiplicity. Pairs farther apart than 1000 tol_match are never
/// associated. PASS iff nothing is unmatched, max |dE| <= tol_match and the
/// multiplicities agree.
MatchReport match_levels(std::span<const Complex> analytic, std::span<const NumericLevel> numeric,
                         double tol_match);

struct BranchVerification {
  Branch branch = Branch::plus;
  std::vector<Complex> analytic;
  NumericSpectrum numeric;
  MatchReport match;
};

struct VerificationReport {
  SusyParams params;
  double tol_match = kMatchTol;
  /// One entry for C == 0 (both branches coincide), two otherwise.
  std::vector<BranchVerification> branches;
  /// Numeric plus vs conj(numeric minus); zero when only one branch exists.
  double branch_conjugation_gap = 0.0;
  bool pass = false;
};

/// Compares the analytic two-series spectrum against extrapolated_spectrum.
/// Uses recommended_grid when grid is empty. Propagates DomainTooSmall.
VerificationReport verify_spectrum(const SusyParams& p, std::optional<Grid> grid = std::nullopt,
                                   double tol_match = kMatchTol, const BoundSpectrumOptions& options = {});

}  // namespace pcs
