#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

/// Subsystem sets that overlap, fall out of range, or do not cover what an
/// operation requires.
class InvalidPartition : public std::invalid_argument {
 public:
  explicit InvalidPartition(const std::string& what) : std::invalid_argument("invalid partition: " + what) {}
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument("dimension error: " + what) {}
};

/// A generator was asked for a party count outside its family.
class ArityError : public std::invalid_argument {
 public:
  explicit ArityError(const std::string& what) : std::invalid_argument("arity error: " + what) {}
};

/// Malformed state file, bad state spec string, or a violated state invariant.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error("format error: " + what) {}
};

class CertificationFailure : public std::runtime_error {
 public:
  explicit CertificationFailure(const std::string& what) : std::runtime_error("certification failure: " + what) {}
};

}  // namespace qcorr
