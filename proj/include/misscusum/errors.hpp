#pragma once

#include <stdexcept>
#include <string>

namespace misscusum {

/// Thrown when the l1 penalty is at least the 2->inf norm of the CUSUM
/// matrix, so the penalised problem is maximised by the zero vector and no
/// projection direction exists. Carries the norm so callers can lower lambda.
class degenerate_penalty_error : public std::runtime_error {
public:
  degenerate_penalty_error(double lambda, double norm_2_to_inf,
                           const std::string& what)
      : std::runtime_error(what), lambda_(lambda), norm_(norm_2_to_inf) {}

  double lambda() const noexcept { return lambda_; }
  double norm_2_to_inf() const noexcept { return norm_; }

private:
  double lambda_;
  double norm_;
};

/// Thrown when every entry of the MissCUSUM matrix is invalid: no row has
/// observations strictly on both sides of any split point.
class all_invalid_error : public std::runtime_error {
public:
  explicit all_invalid_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace misscusum
