#pragma once

#include <stdexcept>
#include <string>

namespace heis {

/// Input outside an operation's domain (non-finite values, bad parameters).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A sampled precondition check failed; the message names the offending data.
class PreconditionViolation : public DomainError {
 public:
  explicit PreconditionViolation(const std::string& what) : DomainError(what) {}
};

/// A result that should be impossible by construction.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw DomainError(msg);
}

}  // namespace heis
