#include "pcs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pcs/errors.hpp"
#include "pcs/parallel.hpp"
#include "pcs/spectra.hpp"

namespace pcs {
namespace {

double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

// LU of (T - shift I) with row interchanges, as in LAPACK xGTTRF: U has two
// superdiagonals (du, du2) and L is stored as multipliers in dl.
class ShiftedTridiagonalLU {
 public:
  // False when a pivot is exactly zero.
  bool factor(const DiscretizedOperator& op, Complex shift) {
    const std::size_t n = op.size();
    d_.resize(n);
    for (std::size_t i = 0; i < n; ++i) d_[i] = op.diag[i] - shift;
    dl_.assign(n > 0 ? n - 1 : 0, Complex(op.offdiag));
    du_.assign(n > 0 ? n - 1 : 0, Complex(op.offdiag));
    du2_.assign(n > 1 ? n - 2 : 0, Complex(0.0));
    swapped_.assign(n > 0 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (abs1(d_[i]) >= abs1(dl_[i])) {
        if (d_[i] != 0.0) {
          const Complex fact = dl_[i] / d_[i];
          dl_[i] = fact;
          d_[i + 1] -= fact * du_[i];
        }
      } else {
        const Complex fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const Complex temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swapped_[i] = 1;
      }
    }
    return std::none_of(d_.begin(), d_.end(), [](Complex z) { return z == 0.0; });
  }

  void solve(std::span<Complex> b) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const Complex temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t k = n; k-- > 2;) {
      const std::size_t i = k - 2;
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }
  }

 private:
  std::vector<Complex> dl_, d_, du_, du2_;
  std::vector<unsigned char> swapped_;
};

double boundary_leak(std::span<const Complex> psi) {
  const std::size_t n = psi.size();
  const std::size_t edge = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * n)));
  double peak = 0.0;
  double outer = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(psi[j]);
    peak = std::max(peak, a);
    if (j < edge || j + edge >= n) outer = std::max(outer, a);
  }
  return peak > 0.0 ? outer / peak : 1.0;
}

bool decays_in_box(Complex energy, double L) { return std::sqrt(-energy).real() > 8.0 / L; }

struct Candidate {
  std::optional<EigenResult> result;
  Complex shift;
  int max_iter = 0;
};

// Two converged pairs describe the same eigenvalue when they agree within
// kDedupTol or within their perturbation radius residual / c_norm, the
// eigenvalue condition number of a complex symmetric matrix.
bool same_eigenvalue(const EigenResult& a, const EigenResult& b) {
  const double c = std::max(std::min(a.c_norm, b.c_norm), 1e-12);
  const double radius = std::max(kDedupTol, 4.0 * (a.residual + b.residual) / c);
  return std::abs(a.energy - b.energy) <= radius;
}

// Keeps the first-seen representative of every eigenvalue, replacing it by a
// later one only when that has a smaller residual.
void dedup_into(std::vector<EigenResult>& kept, EigenResult&& r) {
  for (auto& k : kept) {
    if (same_eigenvalue(k, r)) {
      if (r.residual < k.residual) k = std::move(r);
      return;
    }
  }
  kept.push_back(std::move(r));
}

void sort_results(std::vector<EigenResult>& v) {
  std::sort(v.begin(), v.end(), [](const EigenResult& a, const EigenResult& b) {
    if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
    return a.energy.imag() < b.energy.imag();
  });
}

struct Assignment {
  std::vector<int> partner;  // index into the second list, -1 when unpaired
};

// Global greedy nearest pairing of two point sets, restricted to pairs no
// farther apart than radius.
Assignment greedy_pairing(std::span<const Complex> a, std::span<const Complex> b, double radius) {
  struct Pair {
    double d;
    int i;
    int j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
      const double d = std::abs(a[i] - b[j]);
      if (d <= radius) pairs.push_back({d, i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  Assignment out{std::vector<int>(a.size(), -1)};
  std::vector<bool> taken(b.size(), false);
  for (const Pair& p : pairs) {
    if (out.partner[p.i] >= 0 || taken[p.j]) continue;
    out.partner[p.i] = p.j;
    taken[p.j] = true;
  }
  return out;
}

}  // namespace

void validate(const Grid& g) {
  if (!(g.L > 0.0) || !std::isfinite(g.L)) throw InvalidArgument("grid half-width L must be positive");
  if (g.N < 3) throw InvalidArgument("grid needs N >= 3 interior points, got " + std::to_string(g.N));
}

void DiscretizedOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t n = diag.size();
  if (n == 1) {
    out[0] = diag[0] * in[0];
    return;
  }
  out[0] = diag[0] * in[0] + offdiag * in[1];
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = offdiag * (in[j - 1] + in[j + 1]) + diag[j] * in[j];
  out[n - 1] = offdiag * in[n - 2] + diag[n - 1] * in[n - 1];
}

double DiscretizedOperator::norm_inf() const noexcept {
  double best = 0.0;
  for (const Complex& z : diag) best = std::max(best, std::abs(z));
  return best + 2.0 * std::abs(offdiag);
}

DiscretizedOperator discretize(const PotentialCoefficients& v, const Grid& grid) {
  validate(grid);
  const double h = grid.h();
  const double kinetic = 1.0 / (h * h);
  DiscretizedOperator op;
  op.grid = grid;
  op.offdiag = -kinetic;
  op.diag.resize(static_cast<std::size_t>(grid.N));
  for (int j = 0; j < grid.N; ++j) op.diag[j] = 2.0 * kinetic + v.shape(grid.x(j));
  return op;
}

double residual_floor(const DiscretizedOperator& op) noexcept {
  return 32.0 * std::numeric_limits<double>::epsilon() * op.norm_inf();
}

EigenResult eigen_near(const DiscretizedOperator& op, Complex shift, double tol, int max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("eigen_near: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("eigen_near: max_iter must be positive");
  const std::size_t n = op.size();
  const double target = std::max(tol, residual_floor(op));

  ShiftedTridiagonalLU lu;
  Complex sigma = shift;
  auto refactor = [&] {
    for (int attempt = 0; !lu.factor(op, sigma); ++attempt) {
      if (attempt > 8) throw NoConvergence("eigen_near: shift stays singular after perturbation", max_iter);
      sigma += Complex(tol, tol);
    }
  };
  refactor();

  std::vector<Complex> x(n, Complex(1.0 / std::sqrt(static_cast<double>(n))));
  std::vector<Complex> tx(n);
  bool rayleigh = false;
  for (int it = 1; it <= max_iter; ++it) {
    lu.solve(x);
    const double nrm = norm2(x);
    if (!std::isfinite(nrm) || nrm == 0.0) {
      // Overflow from a shift that sits on an eigenvalue; nudge and restart.
      sigma += Complex(tol, tol);
      refactor();
      std::fill(x.begin(), x.end(), Complex(1.0 / std::sqrt(static_cast<double>(n))));
      continue;
    }
    for (Complex& z : x) z /= nrm;
    op.apply(x, tx);
    Complex theta{};
    for (std::size_t j = 0; j < n; ++j) theta += std::conj(x[j]) * tx[j];
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::norm(tx[j] - theta * x[j]);
    r = std::sqrt(r);

    if (r <= target) {
      EigenResult out;
      out.iterations = it;
      out.energy = theta;
      out.residual = r;
      Complex xtx{};
      for (const Complex& z : x) xtx += z * z;
      out.c_norm = std::abs(xtx);
      out.boundary_leak = boundary_leak(x);
      out.state = std::move(x);
      return out;
    }
    if (!rayleigh && ((it >= 3 && r <= 1e-2 * (1.0 + std::abs(theta))) || it >= 20)) rayleigh = true;
    if (rayleigh) {
      sigma = theta;
      refactor();
    }
  }
  throw NoConvergence("eigen_near: no convergence within " + std::to_string(max_iter) +
                          " iterations from shift (" + std::to_string(shift.real()) + ", " +
                          std::to_string(shift.imag()) + ")",
                      max_iter);
}

BoundSpectrum bound_spectrum(const PotentialCoefficients& v, const Grid& grid,
                             std::span<const Complex> predictions, const BoundSpectrumOptions& options) {
  const DiscretizedOperator op = discretize(v, grid);
  const double d = 0.25 * grid.h();

  std::vector<Complex> shifts;
  for (const Complex& p : predictions) {
    for (Complex offset : {Complex(0.0), Complex(0.0, d), Complex(0.0, -d), Complex(d), Complex(-d)}) {
      shifts.push_back(p + offset);
    }
  }
  int scanned = 0;
  if (options.fallback_scan) {
    double re_lo = -1.0;
    double re_hi = 0.0;
    double im_max = 0.0;
    for (const Complex& p : predictions) {
      re_lo = std::min(re_lo, p.real() - 1.0);
      re_hi = std::max(re_hi, p.real());
      im_max = std::max(im_max, std::abs(p.imag()));
    }
    const double step = options.scan_step;
    const int nre = static_cast<int>(std::ceil((re_hi - re_lo) / step)) + 1;
    const int nim = static_cast<int>(std::ceil(2.0 * (im_max + 1.0) / step)) + 1;
    for (int i = 0; i < nre; ++i) {
      for (int k = 0; k < nim; ++k) {
        const double re = std::min(re_lo + i * step, re_hi);
        const double im = std::min(-(im_max + 1.0) + k * step, im_max + 1.0);
        shifts.emplace_back(re, im);
        ++scanned;
      }
    }
  }

  std::vector<Candidate> candidates = parallel_map(shifts.size(), [&](std::size_t i) {
    Candidate c;
    c.shift = shifts[i];
    try {
      const bool seeded = i < predictions.size() * 5;
      EigenResult r = eigen_near(op, shifts[i], options.tol, seeded ? options.max_iter : options.scan_max_iter);
      if (decays_in_box(r.energy, grid.L)) c.result = std::move(r);
    } catch (const NoConvergence& e) {
      c.max_iter = e.max_iter();
    }
    return c;
  });

  BoundSpectrum out;
  out.scanned_shifts = scanned;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].result) {
      dedup_into(out.levels, std::move(*candidates[i].result));
    } else if (candidates[i].max_iter > 0 && i < predictions.size() * 5) {
      out.failures.push_back({candidates[i].shift, candidates[i].max_iter});
    }
  }
  sort_results(out.levels);
  for (const EigenResult& r : out.levels) {
    if (r.boundary_leak > kLeakTol) {
      throw DomainTooSmall("bound state at E = (" + std::to_string(r.energy.real()) + ", " +
                               std::to_string(r.energy.imag()) + ") has boundary leak " +
                               std::to_string(r.boundary_leak) + " > 1e-8 at L = " + std::to_string(grid.L) +
                               "; enlarge L",
                           r.boundary_leak);
    }
  }
  return out;
}

NumericSpectrum extrapolated_spectrum(const PotentialCoefficients& v, const Grid& grid,
                                      std::span<const Complex> predictions, const BoundSpectrumOptions& options) {
  NumericSpectrum out;
  out.coarse = grid;
  out.fine = grid.refined();

  const BoundSpectrum coarse = bound_spectrum(v, out.coarse, predictions, options);
  std::vector<Complex> ec;
  for (const auto& r : coarse.levels) ec.push_back(r.energy);
  BoundSpectrumOptions fine_options = options;
  fine_options.fallback_scan = false;
  const BoundSpectrum fine = bound_spectrum(v, out.fine, ec, fine_options);
  std::vector<Complex> ef;
  for (const auto& r : fine.levels) ef.push_back(r.energy);
  out.failed_seeds = static_cast<int>(coarse.failures.size() + fine.failures.size());

  const Assignment pairing = greedy_pairing(ec, ef, std::numeric_limits<double>::infinity());

  // A pair whose separation halves with h is the O(h) splitting of one
  // defective eigenvalue; a genuine pair keeps its separation.
  const std::size_t nc = ec.size();
  std::vector<std::size_t> root(nc);
  std::iota(root.begin(), root.end(), std::size_t{0});
  auto find = [&root](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = i + 1; j < nc; ++j) {
      if (pairing.partner[i] < 0 || pairing.partner[j] < 0) continue;
      const double sep_c = std::abs(ec[i] - ec[j]);
      const double sep_f = std::abs(ef[pairing.partner[i]] - ef[pairing.partner[j]]);
      if (sep_c < 0.1 * (1.0 + std::abs(ec[i])) && sep_f > 0.0 && sep_c / sep_f > 1.6) {
        root[find(j)] = find(i);
      }
    }
  }

  std::vector<bool> fine_used(ef.size(), false);
  for (std::size_t i = 0; i < nc; ++i) {
    if (find(i) != i) continue;
    NumericLevel level;
    level.multiplicity = 0;
    level.c_norm = std::numeric_limits<double>::infinity();
    Complex sum_c{};
    Complex sum_f{};
    bool all_paired = true;
    for (std::size_t k = 0; k < nc; ++k) {
      if (find(k) != i) continue;
      ++level.multiplicity;
      sum_c += ec[k];
      level.residual = std::max(level.residual, coarse.levels[k].residual);
      level.boundary_leak = std::max(level.boundary_leak, coarse.levels[k].boundary_leak);
      level.c_norm = std::min(level.c_norm, coarse.levels[k].c_norm);
      if (const int j = pairing.partner[k]; j >= 0) {
        sum_f += ef[j];
        fine_used[j] = true;
        level.residual = std::max(level.residual, fine.levels[j].residual);
        level.boundary_leak = std::max(level.boundary_leak, fine.levels[j].boundary_leak);
      } else {
        all_paired = false;
      }
    }
    const double m = level.multiplicity;
    level.coarse_energy = sum_c / m;
    if (all_paired) {
      level.fine_energy = sum_f / m;
      level.energy = (4.0 * level.fine_energy - level.coarse_energy) / 3.0;
    } else {
      level.fine_energy = level.coarse_energy;
      level.energy = level.coarse_energy;
      level.extrapolated = false;
    }
    out.levels.push_back(level);
  }
  for (std::size_t j = 0; j < ef.size(); ++j) {
    if (fine_used[j]) continue;
    NumericLevel level;
    level.energy = level.coarse_energy = level.fine_energy = ef[j];
    level.residual = fine.levels[j].residual;
    level.boundary_leak = fine.levels[j].boundary_leak;
    level.c_norm = fine.levels[j].c_norm;
    level.extrapolated = false;
    out.levels.push_back(level);
  }
  std::sort(out.levels.begin(), out.levels.end(), [](const NumericLevel& a, const NumericLevel& b) {
    if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
    return a.energy.imag() < b.energy.imag();
  });
  return out;
}

Grid recommended_grid(const PotentialCoefficients& v, std::span<const Complex> predictions) {
  const double alpha = v.alpha;
  double kappa_min = std::numeric_limits<double>::infinity();
  double deepest = 0.0;
  for (const Complex& e : predictions) {
    const double kappa = std::sqrt(-e).real();
    if (kappa > 0.0) kappa_min = std::min(kappa_min, kappa);
    deepest = std::max(deepest, std::abs(e));
  }
  double L = 12.0 / alpha;
  if (std::isfinite(kappa_min)) L = std::max(L, 26.0 / kappa_min);
  // Local wavenumber scale of the deepest oscillation in the well.
  const double k = std::sqrt(std::abs(v.t2) + std::abs(v.st) + deepest + alpha * alpha);
  const double h = std::min(0.06 / k, 0.05 / alpha);
  const double n = std::ceil(2.0 * L / h) - 1.0;
  constexpr double kMaxN = 400000.0;
  return {L, static_cast<int>(std::clamp(n, 3.0, kMaxN))};
}

MatchReport match_levels(std::span<const Complex> analytic, std::span<const NumericLevel> numeric,
                         double tol_match) {
  std::vector<Complex> a_levels;
  std::vector<int> a_mult;
  for (const Complex& e : analytic) {
    bool merged = false;
    for (std::size_t k = 0; k < a_levels.size(); ++k) {
      if (std::abs(a_levels[k] - e) <= kDedupTol) {
        ++a_mult[k];
        merged = true;
        break;
      }
    }
    if (!merged) {
      a_levels.push_back(e);
      a_mult.push_back(1);
    }
  }
  std::vector<Complex> n_levels;
  for (const auto& l : numeric) n_levels.push_back(l.energy);

  const Assignment pairing = greedy_pairing(a_levels, n_levels, 1000.0 * tol_match);
  MatchReport out;
  std::vector<bool> n_used(n_levels.size(), false);
  for (std::size_t i = 0; i < a_levels.size(); ++i) {
    const int j = pairing.partner[i];
    if (j < 0) {
      out.unmatched_analytic.push_back(a_levels[i]);
      continue;
    }
    n_used[j] = true;
    LevelMatch m{a_levels[i], a_mult[i], n_levels[j], numeric[j].multiplicity, std::abs(a_levels[i] - n_levels[j])};
    out.max_delta = std::max(out.max_delta, m.delta);
    if (m.analytic_multiplicity != m.numeric_multiplicity) ++out.multiplicity_mismatches;
    out.matched.push_back(m);
  }
  for (std::size_t j = 0; j < n_levels.size(); ++j) {
    if (!n_used[j]) out.unmatched_numeric.push_back(n_levels[j]);
  }
  std::sort(out.matched.begin(), out.matched.end(), [](const LevelMatch& x, const LevelMatch& y) {
    if (x.analytic.real() != y.analytic.real()) return x.analytic.real() < y.analytic.real();
    return x.analytic.imag() < y.analytic.imag();
  });
  out.pass = out.unmatched_analytic.empty() && out.unmatched_numeric.empty() && out.max_delta <= tol_match &&
             out.multiplicity_mismatches == 0;
  return out;
}

VerificationReport verify_spectrum(const SusyParams& p, std::optional<Grid> grid, double tol_match,
                                   const BoundSpectrumOptions& options) {
  validate(p);
  if (!(tol_match > 0.0)) throw InvalidArgument("tol_match must be positive");
  if (grid) validate(*grid);
  VerificationReport report;
  report.params = p;
  report.tol_match = tol_match;
  std::vector<Branch> branches{Branch::plus};
  if (p.C != 0.0) branches.push_back(Branch::minus);
  for (Branch b : branches) {
    BranchVerification bv;
    bv.branch = b;
    bv.analytic = two_series_spectrum(p, b).all_energies();
    sort_energies(bv.analytic);
    const PotentialCoefficients v = pcs_partner_coefficients(p, b);
    const Grid g = grid.value_or(recommended_grid(v, bv.analytic));
    bv.numeric = extrapolated_spectrum(v, g, bv.analytic, options);
    bv.match = match_levels(bv.analytic, bv.numeric.levels, tol_match);
    report.branches.push_back(std::move(bv));
  }
  report.pass = std::all_of(report.branches.begin(), report.branches.end(),
                            [](const BranchVerification& bv) { return bv.match.pass; });
  if (report.branches.size() == 2) {
    std::vector<Complex> plus;
    std::vector<Complex> minus;
    for (const auto& l : report.branches[0].numeric.levels) plus.push_back(l.energy);
    for (const auto& l : report.branches[1].numeric.levels) minus.push_back(l.energy);
    report.branch_conjugation_gap = conjugate_pairing_gap(plus, minus);
    report.pass = report.pass && report.branch_conjugation_gap <= 2.0 * tol_match;
  }
  return report;
}

}  // namespace pcs
