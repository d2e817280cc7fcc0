#pragma once

// Analytic bound-state spectra generated by shape invariance.
//
// Energies are measured from the |x| -> infinity value of V-, so bound
// states of the real (C = 0) problem are negative.

#include <span>
#include <string_view>
#include <vector>

#include "pcs/core_model.hpp"

namespace pcs {

enum class SeriesLabel { series1, series2 };

std::string_view to_string(SeriesLabel s) noexcept;

struct LadderRung {
  Complex lam;
  Complex mu;
};

struct SpectrumSeries {
  SeriesLabel label = SeriesLabel::series1;
  Branch branch = Branch::plus;
  std::vector<LadderRung> ladder_params;
  std::vector<Complex> energies;
  /// -lam_0^2 of the generating superpotential, present even for an empty series.
  Complex factorization_energy;

  bool empty() const noexcept { return energies.empty(); }
};

struct LadderStep {
  Superpotential next;
  Complex energy_shift;
};

/// V+(lam, mu) = V-(lam - alpha, mu) + [lam^2 - (lam - alpha)^2].
///
/// Throws LadderExhausted when Re(lam) < alpha, i.e. when the next
/// superpotential would have Re(lam) < 0.
LadderStep shape_invariance_step(const Superpotential& w);

/// Climbs the ladder from w while Re(lam_n) > 0.
SpectrumSeries ladder_series(const Superpotential& w, SeriesLabel label, Branch branch);

struct SeriesPair {
  /// Generated by W: E_n = -(calA - n alpha)^2.
  SpectrumSeries s1;
  /// Generated by W': E_n = -(calB - alpha/2 - n alpha)^2.
  SpectrumSeries s2;

  std::vector<Complex> all_energies() const;
};

SeriesPair two_series_spectrum(const ComplexSusyParams& p, Branch branch);
SeriesPair two_series_spectrum(const SusyParams& p, Branch branch);

struct BrokenSpectrum {
  SeriesPair plus;
  SeriesPair minus;
};

/// Both branches for C != 0; minus-branch energies are the conjugates of the
/// plus-branch energies level by level. Throws InvalidArgument when C == 0.
BrokenSpectrum broken_spectrum(const SusyParams& p);

struct BifurcationPoint {
  double C = 0.0;
  /// Union of both series, sorted by (Re, Im).
  std::vector<Complex> energies_plus;
  std::vector<Complex> energies_minus;
  SeriesPair series_plus;
  SeriesPair series_minus;

  bool any_empty_series() const noexcept;
};

/// Spectra of both branches for every C in c_grid (finite, ascending), with
/// A, B and alpha taken from p0. Output order follows the grid.
std::vector<BifurcationPoint> bifurcation_scan(const SusyParams& p0, std::span<const double> c_grid);

/// Sorts by real part, ties by imaginary part.
void sort_energies(std::vector<Complex>& energies);

/// Largest |a_k - conj(b_k)| under greedy nearest pairing; +inf when the
/// sizes differ.
double conjugate_pairing_gap(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace pcs
