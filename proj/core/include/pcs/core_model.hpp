#pragma once

// Closed-form algebra of the complexified Scarf II potential in the
// (tanh, sech) basis: superpotentials, partner potentials, the PT
// constraint and the parameter-exchange map.
//
// Units: hbar = 2m = 1, so H = -d^2/dx^2 + V(x).

#include <complex>
#include <string_view>
#include <vector>

namespace pcs {

using Complex = std::complex<double>;

/// Absolute tolerance on |C (2(A - B) + alpha)|.
inline constexpr double kConstraintTol = 1e-10;

/// V(x) = -V1 sech^2(ax) - i V2 sech(ax) tanh(ax).
struct PcsPhysicalParams {
  double V1 = 0.0;
  double V2 = 0.0;
  double alpha = 1.0;
};

/// Real parameters of W(x) = (A +/- iC) tanh(ax) + (+/-C + iB) sech(ax).
struct SusyParams {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double alpha = 1.0;

  friend bool operator==(const SusyParams&, const SusyParams&) = default;
};

enum class Branch { plus, minus };

/// +1 for plus, -1 for minus.
int sign(Branch b) noexcept;
std::string_view to_string(Branch b) noexcept;
Branch parse_branch(std::string_view text);

/// calA = A +/- iC and calB with i*calB = +/-C + iB, i.e. calB = B -/+ iC.
struct ComplexSusyParams {
  Complex calA;
  Complex calB;
  double alpha = 1.0;

  friend bool operator==(const ComplexSusyParams&, const ComplexSusyParams&) = default;
};

/// W(x) = lam tanh(ax) + i mu sech(ax).
struct Superpotential {
  Complex lam;
  Complex mu;
  double alpha = 1.0;
  /// -lam^2 measured from the |x| -> infinity limit of V-.
  Complex factorization_energy;

  Complex value(double x) const;
  Complex derivative(double x) const;
  /// W(-x)^* == -W(x) for all x, which holds iff lam and mu are real.
  bool is_pt_antisymmetric() const noexcept;
};

/// Builds a superpotential with its factorization energy -lam^2 filled in.
Superpotential make_superpotential(Complex lam, Complex mu, double alpha);

/// V(x) = t2 sech^2(ax) + st sech(ax) tanh(ax) + e0.
///
/// e0 is kept explicitly; it is the value of V at infinity.
struct PotentialCoefficients {
  Complex t2;
  Complex st;
  Complex e0;
  double alpha = 1.0;

  Complex value(double x) const;
  /// V(x) - e0.
  Complex shape(double x) const;
  /// V(-x)^* == V(x) up to |.| <= tol on each coefficient condition.
  bool is_pt_symmetric(double tol = kConstraintTol) const noexcept;
};

struct PartnerPair {
  PotentialCoefficients vminus;
  PotentialCoefficients vplus;
};

/// V+/- = W^2 +/- W', expanded over the (sech^2, sech tanh, 1) basis.
PartnerPair partner_potentials(const Superpotential& w);

ComplexSusyParams complexify(const SusyParams& p, Branch branch);

/// The superpotential W^{+/-} of the given branch.
Superpotential branch_superpotential(const SusyParams& p, Branch branch);

/// Coefficients of V-^{+/-}, including the offset (A +/- iC)^2.
PotentialCoefficients pcs_partner_coefficients(const SusyParams& p, Branch branch);

struct PtConstraint {
  bool pt_symmetric = false;
  double constraint_residual = 0.0;
  /// C != 0 but A = B - alpha/2: PT-symmetric without C vanishing.
  bool degenerate_branch = false;
};

PtConstraint pt_constraint_check(const SusyParams& p, double tol = kConstraintTol);

/// (A, B, C) -> (B - alpha/2, A + alpha/2, -C).
///
/// The sign flip of C keeps the V- shape invariant off the C = 0 line; it is
/// the real-parameter image of the complex swap calA + alpha/2 <-> calB.
SusyParams exchange_map(const SusyParams& p);
/// (calA, calB) -> (calB - alpha/2, calA + alpha/2).
ComplexSusyParams exchange_map(const ComplexSusyParams& p);

struct DualSuperpotentials {
  /// lam = calA, mu = calB, E = -calA^2.
  Superpotential w;
  /// lam = calB - alpha/2, mu = calA + alpha/2, E' = -(calB - alpha/2)^2.
  Superpotential wprime;
};

DualSuperpotentials dual_superpotentials(const ComplexSusyParams& p);
DualSuperpotentials dual_superpotentials(const SusyParams& p, Branch branch);

/// Candidate (A, B, C = 0) reproducing a physical potential.
///
/// sign_convention = +1 uses V2 = -B(2A + alpha); -1 uses V2 = +B(2A + alpha),
/// which is the same family with B negated.
struct FactorizationCandidate {
  SusyParams params;
  int sign_convention = 1;
};

/// All real C = 0 factorizations of the physical potential, with A >= -alpha/2.
///
/// a = A + alpha/2 and B have squares equal to the two roots of
/// t^2 - (V1 + alpha^2/4) t + V2^2/4; swapping the roots is the exchange map.
/// Throws NoRealFactorization when the roots are complex or negative.
std::vector<FactorizationCandidate> physical_to_susy(const PcsPhysicalParams& phys);

/// Inverse direction for C = 0 under the +1 convention.
PcsPhysicalParams susy_to_physical(const SusyParams& p);

void validate(const SusyParams& p);
void validate(const ComplexSusyParams& p);
void validate(const PcsPhysicalParams& p);

}  // namespace pcs
