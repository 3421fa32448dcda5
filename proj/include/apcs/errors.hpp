#ifndef APCS_ERRORS_HPP
#define APCS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace apcs {

// Bad user input: malformed config files, missing paths, invalid settings.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure of a numerical procedure: solver divergence, degenerate
// importance-sampling batches, singular covariances.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace apcs

#endif
