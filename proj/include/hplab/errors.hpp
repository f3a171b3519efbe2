#pragma once

#include <stdexcept>
#include <string>

namespace hplab {

/// Base of every error raised by the library. `kind()` is the short tag used
/// in machine-readable error records.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

#define HPLAB_DEFINE_ERROR(Name, tag)                              \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(what) {}        \
    const char* kind() const noexcept override { return tag; }     \
  };

HPLAB_DEFINE_ERROR(ParameterError, "parameter")
HPLAB_DEFINE_ERROR(DomainError, "domain")
HPLAB_DEFINE_ERROR(ShapeError, "shape")
HPLAB_DEFINE_ERROR(ResolutionError, "resolution")
HPLAB_DEFINE_ERROR(CapacityError, "capacity")
HPLAB_DEFINE_ERROR(LadderError, "ladder")
HPLAB_DEFINE_ERROR(ContractError, "contract")

#undef HPLAB_DEFINE_ERROR

/// Configuration error; carries the offending dotted key when known.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const char* kind() const noexcept override { return "config"; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace hplab
