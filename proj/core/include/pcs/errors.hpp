#pragma once

#include <stdexcept>
#include <string>

namespace pcs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition (alpha <= 0, N < 3, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The physical couplings admit no real (A, B) with C = 0.
class NoRealFactorization : public Error {
 public:
  using Error::Error;
};

/// The shape-invariance ladder cannot be continued (Re(lam) < alpha).
class LadderExhausted : public Error {
 public:
  using Error::Error;
};

/// Inverse iteration did not meet its residual contract.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int max_iter) : Error(what), max_iter_(max_iter) {}
  int max_iter() const noexcept { return max_iter_; }

 private:
  int max_iter_;
};

/// A bound state touches the Dirichlet walls; the box half-width must grow.
class DomainTooSmall : public Error {
 public:
  DomainTooSmall(const std::string& what, double leak) : Error(what), leak_(leak) {}
  double leak() const noexcept { return leak_; }

 private:
  double leak_;
};

/// A correspondence root has b = 0, where m cannot be recovered from b.
class DegenerateB : public Error {
 public:
  using Error::Error;
};

}  // namespace pcs
