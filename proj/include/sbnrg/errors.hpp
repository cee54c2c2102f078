#pragma once

#include <stdexcept>
#include <string>

namespace sbnrg {

/// Input outside the supported parameter domain (maps to CLI exit code 1).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Dense eigensolver did not converge on a sector block.
class EigensolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Expectation values requested from a run that did not converge.
class NotConvergedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reduced density matrix with |<sigma>| > 1 beyond tolerance.
class NonphysicalStateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace sbnrg
