#include "pcs/core_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pcs/errors.hpp"

namespace pcs {
namespace {

constexpr Complex kI{0.0, 1.0};

double sech(double z) { return 1.0 / std::cosh(z); }

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be positive and finite, got " + std::to_string(alpha));
  }
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

int sign(Branch b) noexcept { return b == Branch::plus ? 1 : -1; }

std::string_view to_string(Branch b) noexcept { return b == Branch::plus ? "plus" : "minus"; }

Branch parse_branch(std::string_view text) {
  if (text == "plus" || text == "+") return Branch::plus;
  if (text == "minus" || text == "-") return Branch::minus;
  throw InvalidArgument("branch must be 'plus' or 'minus', got '" + std::string(text) + "'");
}

void validate(const SusyParams& p) {
  require_alpha(p.alpha);
  if (!std::isfinite(p.A) || !std::isfinite(p.B) || !std::isfinite(p.C)) {
    throw InvalidArgument("A, B and C must be finite");
  }
}

void validate(const ComplexSusyParams& p) {
  require_alpha(p.alpha);
  if (!finite(p.calA) || !finite(p.calB)) throw InvalidArgument("calA and calB must be finite");
}

void validate(const PcsPhysicalParams& p) {
  require_alpha(p.alpha);
  if (!std::isfinite(p.V1) || !std::isfinite(p.V2)) throw InvalidArgument("V1 and V2 must be finite");
}

Complex Superpotential::value(double x) const {
  const double z = alpha * x;
  return lam * std::tanh(z) + kI * mu * sech(z);
}

Complex Superpotential::derivative(double x) const {
  const double z = alpha * x;
  const double s = sech(z);
  return alpha * (lam * s * s - kI * mu * s * std::tanh(z));
}

bool Superpotential::is_pt_antisymmetric() const noexcept {
  return lam.imag() == 0.0 && mu.imag() == 0.0;
}

Superpotential make_superpotential(Complex lam, Complex mu, double alpha) {
  return Superpotential{lam, mu, alpha, -(lam * lam)};
}

Complex PotentialCoefficients::shape(double x) const {
  const double z = alpha * x;
  const double s = sech(z);
  return t2 * (s * s) + st * (s * std::tanh(z));
}

Complex PotentialCoefficients::value(double x) const { return shape(x) + e0; }

bool PotentialCoefficients::is_pt_symmetric(double tol) const noexcept {
  return std::abs(t2.imag()) <= tol && std::abs(st.real()) <= tol && std::abs(e0.imag()) <= tol;
}

// W^2 = lam^2 - (lam^2 + mu^2) sech^2 + 2i lam mu sech tanh
// W'  = alpha lam sech^2 - i alpha mu sech tanh
PartnerPair partner_potentials(const Superpotential& w) {
  const Complex lam = w.lam;
  const Complex mu = w.mu;
  const double a = w.alpha;
  PartnerPair out;
  out.vminus = {-(lam * (lam + a) + mu * mu), kI * mu * (2.0 * lam + a), lam * lam, a};
  out.vplus = {-(lam * (lam - a) + mu * mu), kI * mu * (2.0 * lam - a), lam * lam, a};
  return out;
}

ComplexSusyParams complexify(const SusyParams& p, Branch branch) {
  const double s = sign(branch);
  return {Complex(p.A, s * p.C), Complex(p.B, -s * p.C), p.alpha};
}

Superpotential branch_superpotential(const SusyParams& p, Branch branch) {
  const ComplexSusyParams c = complexify(p, branch);
  return make_superpotential(c.calA, c.calB, c.alpha);
}

PotentialCoefficients pcs_partner_coefficients(const SusyParams& p, Branch branch) {
  return partner_potentials(branch_superpotential(p, branch)).vminus;
}

PtConstraint pt_constraint_check(const SusyParams& p, double tol) {
  const double gap = 2.0 * (p.A - p.B) + p.alpha;
  PtConstraint out;
  out.constraint_residual = std::abs(p.C * gap);
  out.pt_symmetric = out.constraint_residual <= tol;
  out.degenerate_branch = p.C != 0.0 && std::abs(gap) <= tol;
  return out;
}

SusyParams exchange_map(const SusyParams& p) {
  const double half = 0.5 * p.alpha;
  return {p.B - half, p.A + half, p.C == 0.0 ? p.C : -p.C, p.alpha};
}

ComplexSusyParams exchange_map(const ComplexSusyParams& p) {
  const double half = 0.5 * p.alpha;
  return {p.calB - half, p.calA + half, p.alpha};
}

DualSuperpotentials dual_superpotentials(const ComplexSusyParams& p) {
  const double half = 0.5 * p.alpha;
  return {make_superpotential(p.calA, p.calB, p.alpha),
          make_superpotential(p.calB - half, p.calA + half, p.alpha)};
}

DualSuperpotentials dual_superpotentials(const SusyParams& p, Branch branch) {
  return dual_superpotentials(complexify(p, branch));
}

std::vector<FactorizationCandidate> physical_to_susy(const PcsPhysicalParams& phys) {
  validate(phys);
  const double alpha = phys.alpha;
  const double sum = phys.V1 + 0.25 * alpha * alpha;
  const double product = 0.25 * phys.V2 * phys.V2;
  double disc = sum * sum - 4.0 * product;
  // A double root (the exchange fixed point) may round to a tiny negative value.
  const double slack = 16.0 * std::numeric_limits<double>::epsilon() * sum * sum;
  if (disc < 0.0 && disc >= -slack) disc = 0.0;
  if (sum < 0.0 || disc < 0.0) {
    throw NoRealFactorization("no real C = 0 factorization: roots of t^2 - (V1 + alpha^2/4) t + V2^2/4 "
                              "are not both real and nonnegative (V1 = " +
                              std::to_string(phys.V1) + ", V2 = " + std::to_string(phys.V2) + ")");
  }
  const double big = 0.5 * (sum + std::sqrt(disc));
  const double small = big > 0.0 ? product / big : 0.0;

  std::vector<FactorizationCandidate> out;
  auto push_unique = [&out](const FactorizationCandidate& c) {
    for (const auto& e : out) {
      if (e.params == c.params) return;
    }
    out.push_back(c);
  };
  for (int assignment = 0; assignment < 2; ++assignment) {
    const double a_sq = assignment == 0 ? small : big;
    const double b_sq = assignment == 0 ? big : small;
    const double a = std::sqrt(a_sq);
    for (int s : {1, -1}) {
      // s * V2 = -B (2A + alpha) = -2 a B
      double b = 0.0;
      if (a > 0.0) {
        b = -s * phys.V2 / (2.0 * a);
      } else {
        b = s * std::sqrt(b_sq);
      }
      push_unique({SusyParams{a - 0.5 * alpha, b, 0.0, alpha}, s});
    }
  }
  return out;
}

PcsPhysicalParams susy_to_physical(const SusyParams& p) {
  validate(p);
  if (p.C != 0.0) throw InvalidArgument("susy_to_physical requires C = 0");
  return {p.A * (p.A + p.alpha) + p.B * p.B, -p.B * (2.0 * p.A + p.alpha), p.alpha};
}

}  // namespace pcs
