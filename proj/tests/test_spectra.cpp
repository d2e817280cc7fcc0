#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "oracles.hpp"
#include "pcs/errors.hpp"
#include "pcs/spectra.hpp"

using pcs::Branch;
using pcs::Complex;
using pcs::SusyParams;

namespace {

std::vector<Complex> sorted(std::vector<Complex> v) {
  pcs::sort_energies(v);
  return v;
}

void check_energies(const std::vector<Complex>& got, std::initializer_list<Complex> want, double tol) {
  REQUIRE(got.size() == want.size());
  std::size_t k = 0;
  for (const Complex& w : want) {
    CHECK(std::abs(got[k] - w) <= tol);
    ++k;
  }
}

}  // namespace

TEST_CASE("one ladder step") {
  const auto w = pcs::make_superpotential(2.5, 3.2, 1.0);
  const auto step = pcs::shape_invariance_step(w);
  CHECK(step.next.lam == Complex(1.5));
  CHECK(step.next.mu == Complex(3.2));
  CHECK(step.energy_shift == Complex(4.0));

  // V+(lam, mu) - V-(lam - alpha, mu) sampled directly from W.
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k <= 2000; ++k) {
    const double x = -10.0 + 0.01 * k;
    const Complex d = oracle::partner(2.5, 3.2, 1.0, x, +1) - oracle::partner(1.5, 3.2, 1.0, x, -1);
    CHECK(std::abs(d.imag()) <= 1e-12);
    lo = std::min(lo, d.real());
    hi = std::max(hi, d.real());
  }
  CHECK(hi - lo <= 1e-12);
  // The constant equals the step's energy shift.
  CHECK(std::abs(lo - 4.0) <= 1e-12);
}

TEST_CASE("ladder ends at lam = 0") {
  const auto w = pcs::make_superpotential(1.0, 0.7, 1.0);
  const auto step = pcs::shape_invariance_step(w);
  CHECK(step.next.lam == Complex(0.0));
  CHECK_THROWS_AS(pcs::shape_invariance_step(step.next), pcs::LadderExhausted);
  CHECK_THROWS_AS(pcs::shape_invariance_step(pcs::make_superpotential(0.5, 1.0, 1.0)), pcs::LadderExhausted);
}

TEST_CASE("two series at A=2.5 B=3.2") {
  const auto pair = pcs::two_series_spectrum(SusyParams{2.5, 3.2, 0, 1}, Branch::plus);
  check_energies(pair.s1.energies, {-6.25, -2.25, -0.25}, 1e-14);
  // Third level of the second tower is -(2.7 - 2)^2 = -0.49.
  check_energies(pair.s2.energies, {-7.29, -2.89, -0.49}, 1e-14);
  CHECK(pair.s1.factorization_energy == Complex(-6.25));
  CHECK(std::abs(pair.s2.factorization_energy - Complex(-7.29)) <= 1e-14);
  CHECK(pair.s1.label == pcs::SeriesLabel::series1);
  CHECK(pair.s2.label == pcs::SeriesLabel::series2);
}

TEST_CASE("second series is empty when B = alpha/2") {
  const auto pair = pcs::two_series_spectrum(SusyParams{2.5, 0.5, 0, 1}, Branch::plus);
  check_energies(pair.s1.energies, {-6.25, -2.25, -0.25}, 1e-14);
  CHECK(pair.s2.empty());
  CHECK(pair.s2.factorization_energy == Complex(0.0));
}

TEST_CASE("exchange fixed point gives coincident series") {
  const auto pair = pcs::two_series_spectrum(SusyParams{2, 2.5, 0, 1}, Branch::plus);
  check_energies(pair.s1.energies, {-4.0, -1.0}, 1e-15);
  check_energies(pair.s2.energies, {-4.0, -1.0}, 1e-15);
}

TEST_CASE("broken phase at A=2 B=3 C=0.5") {
  const auto b = pcs::broken_spectrum(SusyParams{2, 3, 0.5, 1});
  CHECK(std::abs(b.plus.s1.energies[0] - Complex(-3.75, -2.0)) <= 1e-14);
  CHECK(std::abs(b.plus.s2.energies[0] - Complex(-6.0, 2.5)) <= 1e-14);
  CHECK(std::abs(b.minus.s1.energies[0] - Complex(-3.75, 2.0)) <= 1e-14);
  CHECK(std::abs(b.minus.s2.energies[0] - Complex(-6.0, -2.5)) <= 1e-14);
  CHECK(std::abs(b.plus.s1.energies[1] - Complex(-0.75, -1.0)) <= 1e-14);
  for (const auto* pair : {&b.plus, &b.minus}) {
    for (std::size_t n = 0; n < pair->s1.energies.size(); ++n) {
      CHECK(b.minus.s1.energies[n] == std::conj(b.plus.s1.energies[n]));
    }
  }
  CHECK_THROWS_AS(pcs::broken_spectrum(SusyParams{2, 3, 0, 1}), pcs::InvalidArgument);
}

TEST_CASE("energies are continuous as C goes to zero") {
  const auto at0 = sorted(pcs::two_series_spectrum(SusyParams{2, 3, 0, 1}, Branch::plus).all_energies());
  for (double c : {1e-4, 1e-6, 1e-8}) {
    for (Branch b : {Branch::plus, Branch::minus}) {
      const auto e = sorted(pcs::two_series_spectrum(SusyParams{2, 3, c, 1}, b).all_energies());
      REQUIRE(e.size() == at0.size());
      for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(e[k] - at0[k]) <= 20.0 * c);
    }
  }
}

TEST_CASE("bifurcation scan") {
  const SusyParams p0{2, 3, 0, 1};
  SUBCASE("unbroken point") {
    const std::vector<double> grid{0.0};
    const auto pts = pcs::bifurcation_scan(p0, grid);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].energies_plus == pts[0].energies_minus);
    for (const Complex& z : pts[0].energies_plus) CHECK(z.imag() == 0.0);
  }
  SUBCASE("pairing at C = 0.5") {
    const std::vector<double> grid{0.0, 0.5};
    const auto pts = pcs::bifurcation_scan(p0, grid);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].C == 0.5);
    CHECK(pcs::conjugate_pairing_gap(pts[1].energies_plus, pts[1].energies_minus) == 0.0);
    const auto& ep = pts[1].energies_plus;
    CHECK(std::find(ep.begin(), ep.end(), Complex(-3.75, -2.0)) != ep.end());
  }
  SUBCASE("C -> -C swaps the branches") {
    const std::vector<double> grid{-0.7, 0.0, 0.7};
    const auto pts = pcs::bifurcation_scan(p0, grid);
    CHECK(pts[0].energies_plus == pts[2].energies_minus);
    CHECK(pts[0].energies_minus == pts[2].energies_plus);
  }
  SUBCASE("input checks") {
    const std::vector<double> unsorted{0.5, 0.1};
    CHECK_THROWS_AS(pcs::bifurcation_scan(p0, unsorted), pcs::InvalidArgument);
    const std::vector<double> bad{0.0, std::nan("")};
    CHECK_THROWS_AS(pcs::bifurcation_scan(p0, bad), pcs::InvalidArgument);
  }
}

TEST_CASE("bifurcation output does not depend on the worker count") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.05 * i);
  const SusyParams p0{3.1, 4.4, 0, 1};
  setenv("PCS_SPECTRA_THREADS", "1", 1);
  const auto serial = pcs::bifurcation_scan(p0, grid);
  setenv("PCS_SPECTRA_THREADS", "4", 1);
  const auto threaded = pcs::bifurcation_scan(p0, grid);
  unsetenv("PCS_SPECTRA_THREADS");
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].C == grid[i]);
    CHECK(serial[i].C == threaded[i].C);
    CHECK(serial[i].energies_plus == threaded[i].energies_plus);
    CHECK(serial[i].energies_minus == threaded[i].energies_minus);
  }
}

TEST_CASE("series properties on random draws") {
  oracle::Draws draws(31);
  for (int i = 0; i < 1000; ++i) {
    SusyParams p = draws.next();
    if (i % 2 == 0) p.C = 0.0;
    for (Branch b : {Branch::plus, Branch::minus}) {
      const auto pair = pcs::two_series_spectrum(p, b);
      for (const auto* s : {&pair.s1, &pair.s2}) {
        for (std::size_t n = 0; n < s->energies.size(); ++n) {
          const Complex lam = s->ladder_params[n].lam;
          // Ladder consistency: successive gaps are the step shifts.
          if (n + 1 < s->energies.size()) {
            const auto step = pcs::shape_invariance_step(pcs::make_superpotential(lam, s->ladder_params[n].mu, p.alpha));
            const Complex gap = s->energies[n + 1] - s->energies[n];
            REQUIRE(std::abs(gap - step.energy_shift) <= 1e-12 * std::max(1.0, std::norm(lam)));
            if (p.C == 0.0) REQUIRE(s->energies[n + 1].real() > s->energies[n].real());
          }
          REQUIRE(lam.real() > 0.0);
          if (p.C == 0.0) REQUIRE(s->energies[n].imag() == 0.0);
        }
        // No admissible level is left out.
        if (!s->empty()) REQUIRE(s->ladder_params.back().lam.real() <= p.alpha);
      }
    }
    if (p.C != 0.0) {
      const auto plus = sorted(pcs::two_series_spectrum(p, Branch::plus).all_energies());
      const auto minus = sorted(pcs::two_series_spectrum(p, Branch::minus).all_energies());
      const double scale = std::max({1.0, p.A * p.A, p.B * p.B, p.C * p.C});
      REQUIRE(pcs::conjugate_pairing_gap(plus, minus) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("exchange swaps the two series") {
  oracle::Draws draws(32);
  for (int i = 0; i < 1000; ++i) {
    const SusyParams p = draws.next_dyadic();
    for (Branch b : {Branch::plus, Branch::minus}) {
      const auto before = pcs::two_series_spectrum(p, b);
      const auto after = pcs::two_series_spectrum(pcs::exchange_map(p), b);
      REQUIRE(after.s1.energies == before.s2.energies);
      REQUIRE(after.s2.energies == before.s1.energies);
    }
  }
}
