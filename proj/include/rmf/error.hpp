#pragma once

#include <stdexcept>
#include <string>

namespace rmf {

// Base for every failure raised by the library; `module()` names the origin.
class Error : public std::runtime_error {
  public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
    const std::string& module() const { return module_; }

  private:
    std::string module_;
};

class SpectralGapError : public Error { using Error::Error; };
class SizeCapError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class RegimeError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

} // namespace rmf
