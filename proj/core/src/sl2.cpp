#include "pcs/sl2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pcs/errors.hpp"

namespace pcs {
namespace {

constexpr double kRouteTol = 1e-8;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Shorthand for the recurring combinations P = A - B + alpha/2 and
// Q = AB + C^2 + alpha B / 2.
// Roots of u^2 - c1 u - c0 = 0 with u = b^2.
struct B2Roots {
  Complex c1;
  Complex big;
  Complex small;
  bool repeated;
};

B2Roots b2_roots(const PotentialCoefficients& v, double alpha) {
  const Complex c1 = v.t2 - 0.25 * alpha;
  const Complex c0 = v.st * v.st / (4.0 * alpha);
  const Complex root = std::sqrt(c1 * c1 + 4.0 * c0);
  // Pick the sign that avoids cancellation, then Vieta for the partner root.
  const Complex big = 0.5 * ((std::real(std::conj(c1) * root) >= 0.0) ? c1 + root : c1 - root);
  const Complex small = big != 0.0 ? -c0 / big : Complex(0.0);
  return {c1, big, small, big != 0.0 && std::abs(big - small) <= 1e-6 * std::abs(big)};
}

// Route agreement tolerance; wider at a repeated b^2 root.
double route_tol(bool repeated, Complex b) { return repeated ? 1e-6 * std::max(1.0, std::abs(b)) : kRouteTol; }

struct Combos {
  double P;
  double Q;
  double s;
};

Combos combos(const SusyParams& p, Branch branch) {
  return {p.A - p.B + 0.5 * p.alpha, p.A * p.B + p.C * p.C + 0.5 * p.alpha * p.B, static_cast<double>(sign(branch))};
}

// First two matching conditions with m eliminated.
Vec2 reduced_residual(const SusyParams& p, Branch branch, Vec2 b) {
  const auto r = correspondence_residuals(Sl2Params{m_from_b(p, branch, {b.x, b.y}), {b.x, b.y}, p.alpha}, p, branch);
  return {r[0], r[1]};
}

// Root magnitudes of b^4 - c1 b^2 - c0: about sqrt|c1| for the large pair
// and sqrt(|c0| / |c1|) for the small one; (|c0|)^(1/4) when they meet.
struct RootScales {
  double large;
  double small;
  double mid;
};

RootScales root_scales(const SusyParams& p, Branch branch) {
  const PotentialCoefficients v = pcs_partner_coefficients(p, branch);
  const double c1 = std::abs(v.t2 - 0.25 * p.alpha);
  const double c0 = std::norm(v.st) / (4.0 * p.alpha);
  constexpr double tiny = 1e-6;
  const double large = std::max(std::sqrt(c1), tiny);
  const double small = c1 > 0.0 ? std::max(std::sqrt(c0 / c1), tiny) : large;
  return {large, small, std::max(std::sqrt(std::sqrt(c0)), tiny)};
}

bool same_solution(const Sl2Params& a, const Sl2Params& b, double tol) {
  const double scale = std::max({1.0, std::abs(a.b), std::abs(a.m)});
  return std::abs(a.b - b.b) <= tol * scale && std::abs(a.m - b.m) <= tol * scale;
}

}  // namespace

PotentialCoefficients build_sl2_potential(const Sl2Params& s) {
  return {s.b * s.b + s.alpha * (0.25 - s.m * s.m), -2.0 * s.alpha * s.m * s.b, Complex(0.0), s.alpha};
}

std::array<double, 4> correspondence_residuals(const Sl2Params& s, const SusyParams& p, Branch branch) {
  const double mr = s.m.real();
  const double mi = s.m.imag();
  const double br = s.b.real();
  const double bi = s.b.imag();
  const double a = p.alpha;
  const double sg = sign(branch);
  const double gap = (2.0 * p.A - 2.0 * p.B + a) * p.C;
  return {
      br * br - bi * bi - a * (mr * mr - mi * mi) + 0.25 * a +
          (p.A * p.A + p.B * p.B - 2.0 * p.C * p.C + a * p.A),
      2.0 * br * bi - 2.0 * a * mr * mi + sg * gap,
      -2.0 * a * (mr * br - mi * bi) - sg * gap,
      -2.0 * a * (mr * bi + mi * br) - (2.0 * p.A * p.B + 2.0 * p.C * p.C + a * p.B),
  };
}

Complex m_from_b(const SusyParams& p, Branch branch, Complex b) {
  const double br = b.real();
  const double bi = b.imag();
  const double b2 = br * br + bi * bi;
  if (b2 == 0.0) throw DegenerateB("m is undefined for b = 0");
  const auto [P, Q, s] = combos(p, branch);
  const double denom = p.alpha * b2;
  return {(-s * br * P * p.C - bi * Q) / denom, (s * bi * P * p.C - br * Q) / denom};
}

double m_square_difference(const SusyParams& p, Branch branch, Complex b) {
  const double br = b.real();
  const double bi = b.imag();
  const double b2 = br * br + bi * bi;
  if (b2 == 0.0) throw DegenerateB("m is undefined for b = 0");
  const auto [P, Q, s] = combos(p, branch);
  const double cp2 = p.C * p.C * P * P;
  return ((br * br - bi * bi) * (cp2 - Q * Q) + s * 4.0 * br * bi * p.C * P * Q) /
         (p.alpha * p.alpha * b2 * b2);
}

double m_product(const SusyParams& p, Branch branch, Complex b) {
  const double br = b.real();
  const double bi = b.imag();
  const double b2 = br * br + bi * bi;
  if (b2 == 0.0) throw DegenerateB("m is undefined for b = 0");
  const auto [P, Q, s] = combos(p, branch);
  const double cp2 = p.C * p.C * P * P;
  return (s * p.C * (br * br - bi * bi) * P * Q - br * bi * (cp2 - Q * Q)) / (p.alpha * p.alpha * b2 * b2);
}

void canonicalize(std::vector<Sl2Params>& solutions) {
  std::sort(solutions.begin(), solutions.end(), [](const Sl2Params& x, const Sl2Params& y) {
    const Complex ux = x.b * x.b;
    const Complex uy = y.b * y.b;
    if (ux.real() != uy.real()) return ux.real() < uy.real();
    if (ux.imag() != uy.imag()) return ux.imag() < uy.imag();
    const bool xr = x.b.real() >= 0.0;
    const bool yr = y.b.real() >= 0.0;
    if (xr != yr) return xr;
    return x.b.imag() >= 0.0 && y.b.imag() < 0.0;
  });
}

ClosedFormRoute closed_form_correspondence(const SusyParams& p, Branch branch) {
  validate(p);
  const PotentialCoefficients v = pcs_partner_coefficients(p, branch);
  const double alpha = p.alpha;
  const B2Roots r = b2_roots(v, alpha);
  const Complex c1 = r.c1;
  std::vector<Complex> us{r.big, r.small};
  if (r.repeated) us = {0.5 * (r.big + r.small)};

  ClosedFormRoute out;
  out.repeated_b2 = r.repeated;
  const double zero_tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(c1));
  for (const Complex& u : us) {
    if (std::abs(u) <= zero_tol) {
      out.degenerate_b = true;
      continue;
    }
    const Complex b = std::sqrt(u);
    for (const Complex& bb : {b, -b}) {
      Sl2Params s{-v.st / (2.0 * alpha * bb), bb, alpha};
      const bool dup = std::any_of(out.solutions.begin(), out.solutions.end(),
                                   [&](const Sl2Params& e) { return same_solution(e, s, 1e-12); });
      if (!dup) out.solutions.push_back(s);
    }
  }
  canonicalize(out.solutions);
  return out;
}

NewtonRoute newton_correspondence(const SusyParams& p, Branch branch) {
  validate(p);
  const RootScales rs = root_scales(p, branch);
  const double scale = std::max({rs.large, rs.mid, 1e-3});
  const double f_tol = 1e-13 * std::max(1.0, scale * scale);
  // Polar lattice: 12 directions, offset from the axes, at radii around each
  // expected root magnitude.
  std::vector<Vec2> lattice;
  for (double base : {rs.large, rs.small, rs.mid}) {
    for (double factor : {1.0, 0.5, 2.0}) {
      for (int k = 0; k < 12; ++k) {
        const double phi = (k + 0.37) * std::numbers::pi / 6.0;
        lattice.push_back({factor * base * std::cos(phi), factor * base * std::sin(phi)});
      }
    }
  }

  NewtonRoute out;
  std::vector<Vec2> found;
  const bool repeated = b2_roots(pcs_partner_coefficients(p, branch), p.alpha).repeated;

  auto raw = [&](Vec2 b) { return reduced_residual(p, branch, b); };
  auto deflated = [&](Vec2 b) {
    Vec2 f = raw(b);
    double factor = 1.0;
    for (const Vec2& r : found) {
      const double d = norm({b.x - r.x, b.y - r.y}) / norm(r);
      factor *= 1.0 / (d * d) + 1.0;
    }
    return Vec2{f.x * factor, f.y * factor};
  };
  // One damped Newton solve; false on divergence.
  auto solve = [&](Vec2& b, auto&& fn, int max_iter, bool damp) {
    for (int it = 0; it < max_iter; ++it) {
      if (norm(b) < 1e-9 * rs.small) return false;
      const Vec2 f = fn(b);
      if (!std::isfinite(f.x) || !std::isfinite(f.y)) return false;
      if (norm(raw(b)) <= f_tol) return true;
      const double eta = 1e-7 * std::max(scale, norm(b));
      const Vec2 fxp = fn({b.x + eta, b.y});
      const Vec2 fxm = fn({b.x - eta, b.y});
      const Vec2 fyp = fn({b.x, b.y + eta});
      const Vec2 fym = fn({b.x, b.y - eta});
      const double j11 = (fxp.x - fxm.x) / (2 * eta);
      const double j21 = (fxp.y - fxm.y) / (2 * eta);
      const double j12 = (fyp.x - fym.x) / (2 * eta);
      const double j22 = (fyp.y - fym.y) / (2 * eta);
      const double det = j11 * j22 - j12 * j21;
      if (det == 0.0 || !std::isfinite(det)) return false;
      Vec2 step{(j22 * f.x - j12 * f.y) / det, (-j21 * f.x + j11 * f.y) / det};
      Vec2 next{b.x - step.x, b.y - step.y};
      if (damp) {
        const double f0 = norm(f);
        for (int k = 0; k < 30 && !(norm(fn(next)) < f0); ++k) {
          step.x *= 0.5;
          step.y *= 0.5;
          next = {b.x - step.x, b.y - step.y};
        }
      }
      b = next;
    }
    return norm(raw(b)) <= f_tol;
  };

  for (const Vec2& start : lattice) {
    if (found.size() >= 4) break;
    Vec2 b = start;
    if (!solve(b, deflated, 100, true)) {
      ++out.divergences;
      continue;
    }
    // Polish on the undeflated system.
    solve(b, raw, 5, false);
    found.push_back(b);
  }

  for (const Vec2& b : found) {
    Sl2Params s{m_from_b(p, branch, {b.x, b.y}), {b.x, b.y}, p.alpha};
    const bool dup = std::any_of(out.solutions.begin(), out.solutions.end(),
                                 [&](const Sl2Params& e) { return same_solution(e, s, route_tol(repeated, s.b)); });
    if (!dup) out.solutions.push_back(s);
  }
  canonicalize(out.solutions);
  return out;
}

CorrespondenceResult solve_correspondence(const SusyParams& p, Branch branch) {
  const ClosedFormRoute closed = closed_form_correspondence(p, branch);
  const NewtonRoute newton = newton_correspondence(p, branch);
  CorrespondenceResult out;
  out.solutions = closed.solutions;
  out.newton_solutions = newton.solutions;
  out.degenerate_b = closed.degenerate_b;
  out.repeated_b2 = closed.repeated_b2;
  out.newton_divergences = newton.divergences;
  for (const Sl2Params& s : out.solutions) {
    for (double r : correspondence_residuals(s, p, branch)) out.max_residual = std::max(out.max_residual, std::abs(r));
  }
  if (closed.solutions.size() != newton.solutions.size()) {
    out.route_mismatch = std::numeric_limits<double>::infinity();
  } else {
    out.routes_agree = true;
    std::vector<bool> used(newton.solutions.size(), false);
    for (const Sl2Params& s : closed.solutions) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < newton.solutions.size(); ++k) {
        if (used[k]) continue;
        const double d = std::max(std::abs(s.b - newton.solutions[k].b), std::abs(s.m - newton.solutions[k].m));
        if (d < best) {
          best = d;
          best_k = k;
        }
      }
      used[best_k] = true;
      out.route_mismatch = std::max(out.route_mismatch, best);
      if (best > route_tol(out.repeated_b2, s.b)) out.routes_agree = false;
    }
  }
  return out;
}

}  // namespace pcs
