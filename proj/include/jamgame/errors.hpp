#pragma once

#include <stdexcept>
#include <string>

namespace jamgame {

// Malformed input: bad documents, shape mismatches, invalid distributions.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The LP engine could not produce a trustworthy answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jamgame
