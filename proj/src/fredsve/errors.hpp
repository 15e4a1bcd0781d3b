#pragma once

#include <stdexcept>
#include <string>

namespace fredsve {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergence : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct DomainMismatch : Error { using Error::Error; };
struct RankOverflow : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct EmptyExpansion : Error { using Error::Error; };
struct UnknownProblem : Error { using Error::Error; };
struct ZeroNoiseNorm : Error { using Error::Error; };
struct ZeroExactNorm : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace fredsve
