#include "pcs/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcs/errors.hpp"
#include "pcs/parallel.hpp"

namespace pcs {
namespace {

// Guards against absurd inputs such as A = 1e12 with alpha = 1.
constexpr std::size_t kMaxLevels = 100000;

}  // namespace

std::string_view to_string(SeriesLabel s) noexcept {
  return s == SeriesLabel::series1 ? "series1" : "series2";
}

LadderStep shape_invariance_step(const Superpotential& w) {
  if (w.lam.real() < w.alpha) {
    throw LadderExhausted("ladder exhausted: Re(lam) = " + std::to_string(w.lam.real()) +
                          " < alpha = " + std::to_string(w.alpha));
  }
  const Complex next_lam = w.lam - w.alpha;
  LadderStep out;
  out.next = make_superpotential(next_lam, w.mu, w.alpha);
  out.energy_shift = w.lam * w.lam - next_lam * next_lam;
  return out;
}

SpectrumSeries ladder_series(const Superpotential& w, SeriesLabel label, Branch branch) {
  SpectrumSeries s;
  s.label = label;
  s.branch = branch;
  s.factorization_energy = w.factorization_energy;
  Superpotential rung = w;
  while (rung.lam.real() > 0.0) {
    if (s.energies.size() >= kMaxLevels) {
      throw InvalidArgument("ladder exceeds " + std::to_string(kMaxLevels) + " levels");
    }
    s.ladder_params.push_back({rung.lam, rung.mu});
    s.energies.push_back(rung.factorization_energy);
    if (rung.lam.real() < rung.alpha) break;
    rung = shape_invariance_step(rung).next;
  }
  return s;
}

std::vector<Complex> SeriesPair::all_energies() const {
  std::vector<Complex> out = s1.energies;
  out.insert(out.end(), s2.energies.begin(), s2.energies.end());
  return out;
}

SeriesPair two_series_spectrum(const ComplexSusyParams& p, Branch branch) {
  validate(p);
  const DualSuperpotentials duals = dual_superpotentials(p);
  return {ladder_series(duals.w, SeriesLabel::series1, branch),
          ladder_series(duals.wprime, SeriesLabel::series2, branch)};
}

SeriesPair two_series_spectrum(const SusyParams& p, Branch branch) {
  validate(p);
  return two_series_spectrum(complexify(p, branch), branch);
}

BrokenSpectrum broken_spectrum(const SusyParams& p) {
  validate(p);
  if (p.C == 0.0) throw InvalidArgument("broken_spectrum requires C != 0");
  return {two_series_spectrum(p, Branch::plus), two_series_spectrum(p, Branch::minus)};
}

bool BifurcationPoint::any_empty_series() const noexcept {
  return series_plus.s1.empty() || series_plus.s2.empty() || series_minus.s1.empty() ||
         series_minus.s2.empty();
}

std::vector<BifurcationPoint> bifurcation_scan(const SusyParams& p0, std::span<const double> c_grid) {
  validate(p0);
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (!std::isfinite(c_grid[i])) throw InvalidArgument("C grid contains a non-finite value");
    if (i > 0 && c_grid[i] < c_grid[i - 1]) throw InvalidArgument("C grid must be sorted ascending");
  }
  return parallel_map(c_grid.size(), [&](std::size_t i) {
    SusyParams p = p0;
    p.C = c_grid[i];
    BifurcationPoint point;
    point.C = p.C;
    point.series_plus = two_series_spectrum(p, Branch::plus);
    point.series_minus = two_series_spectrum(p, Branch::minus);
    point.energies_plus = point.series_plus.all_energies();
    point.energies_minus = point.series_minus.all_energies();
    sort_energies(point.energies_plus);
    sort_energies(point.energies_minus);
    return point;
  });
}

void sort_energies(std::vector<Complex>& energies) {
  std::sort(energies.begin(), energies.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

double conjugate_pairing_gap(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& z : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = b.size();
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(z - std::conj(b[k]));
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    used[best_k] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace pcs
