#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tpower {

// Power iteration ran out of iterations; carries the last iterate so
// callers can inspect how close it got.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string what, std::vector<double> last_iterate,
                   double residual)
      : std::runtime_error(std::move(what)),
        last_iterate(std::move(last_iterate)),
        residual(residual) {}

  std::vector<double> last_iterate;
  double residual;
};

// A*x vanished during a truncated power sweep.
class DegenerateIterateError : public std::runtime_error {
 public:
  DegenerateIterateError(std::string what, int iteration)
      : std::runtime_error(std::move(what)), iteration(iteration) {}

  int iteration;
};

class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateLoadingsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoEdgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string what, long line)
      : std::runtime_error(std::move(what)), line(line) {}

  long line;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tpower
