#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "ldrate/types.hpp"

namespace ldrate {

// A routine was asked to work on a domain it cannot represent
// (e.g. a non-polyhedral effective domain where an LP is required).
class UnsupportedDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a trustworthy answer
// (finite differences too close to a boundary, a track that has not
// converged within the horizon, ...). The message names the culprit.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internally produced certificate failed its own verification.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The inner and outer limit domains differ, so no LDP is guaranteed.
// Carries a point lying in one intersection but not in the other.
class A4FailureError : public std::runtime_error {
 public:
  A4FailureError(const std::string& what, Vec witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const Vec& witness() const { return witness_; }

 private:
  Vec witness_;
};

}  // namespace ldrate
