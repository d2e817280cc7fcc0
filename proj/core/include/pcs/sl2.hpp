#pragma once

// The sl(2) potential-algebra family
//
//   V_m = (1/4 - m^2) F' + 2 m G' + G^2,  F = tanh(ax),  G = b sech(ax),
//
// and its correspondence with the SUSY parameters (A, B, C) of V-.

#include <array>
#include <vector>

#include "pcs/core_model.hpp"

namespace pcs {

struct Sl2Params {
  Complex m;
  Complex b;
  double alpha = 1.0;
};

/// t2 = b^2 + alpha (1/4 - m^2), st = -2 alpha m b, e0 = 0.
PotentialCoefficients build_sl2_potential(const Sl2Params& s);

/// LHS - RHS of the four real matching conditions between V_m and the V-
/// shape of the given branch, in the order (Re sech^2, Im sech^2,
/// Re sech tanh, Im sech tanh).
std::array<double, 4> correspondence_residuals(const Sl2Params& s, const SusyParams& p, Branch branch);

/// m recovered from b through the sech tanh conditions, written out in
/// terms of (A, B, C) with the branch sign. Requires b != 0.
Complex m_from_b(const SusyParams& p, Branch branch, Complex b);

/// m_R^2 - m_I^2 and m_R m_I as closed expressions in (b_R, b_I, A, B, C).
double m_square_difference(const SusyParams& p, Branch branch, Complex b);
double m_product(const SusyParams& p, Branch branch, Complex b);

/// Sorts by (Re b^2, Im b^2), then Re b >= 0 first, then Im b >= 0 first.
void canonicalize(std::vector<Sl2Params>& solutions);

struct ClosedFormRoute {
  std::vector<Sl2Params> solutions;
  /// A root b^2 = 0 was dropped (st = 0).
  bool degenerate_b = false;
  /// The two b^2 roots coincide to 1e-6 relative; merged into one.
  bool repeated_b2 = false;
};

/// Eliminates m from -2 alpha m b = st and b^2 + alpha (1/4 - m^2) = t2:
/// b^4 - (t2 - alpha/4) b^2 - st^2 / (4 alpha) = 0, both square roots of each
/// root, m = -st / (2 alpha b).
ClosedFormRoute closed_form_correspondence(const SusyParams& p, Branch branch);

struct NewtonRoute {
  std::vector<Sl2Params> solutions;
  int divergences = 0;
};

/// Damped Newton on the first two matching conditions in (b_R, b_I), with m
/// eliminated through m_from_b. Up to 108 fixed starts around the expected root magnitudes; roots already found are
/// deflated away so later starts converge elsewhere.
NewtonRoute newton_correspondence(const SusyParams& p, Branch branch);

struct CorrespondenceResult {
  /// Closed-form solutions in canonical order.
  std::vector<Sl2Params> solutions;
  std::vector<Sl2Params> newton_solutions;
  /// Max |residual| over all solutions and all four conditions.
  double max_residual = 0.0;
  /// Max distance between paired solutions of the two routes; +inf when the
  /// counts differ.
  double route_mismatch = 0.0;
  bool routes_agree = false;
  bool degenerate_b = false;
  bool repeated_b2 = false;
  int newton_divergences = 0;
};

/// Both routes; solutions are taken from the closed form and cross-checked
/// against Newton to 1e-8, or to 1e-6 relative at a repeated b^2 root where
/// Newton only converges linearly.
CorrespondenceResult solve_correspondence(const SusyParams& p, Branch branch);

}  // namespace pcs
