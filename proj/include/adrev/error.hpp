#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adrev {

// Every library error carries a stable code; the CLI prints it as a prefix.
class Error : public std::runtime_error {
 public:
  Error(std::string_view code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  std::string_view code() const noexcept { return code_; }

 private:
  std::string_view code_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error("E_SHAPE", m) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& m) : Error("E_CONTRACT", m) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error("E_NUMERIC", m) {}
};
struct DataError : Error {
  explicit DataError(const std::string& m) : Error("E_DATA", m) {}
};
struct LookupError : Error {
  explicit LookupError(const std::string& m) : Error("E_LOOKUP", m) {}
};
struct CapabilityError : Error {
  explicit CapabilityError(const std::string& m) : Error("E_CAPABILITY", m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("E_CONFIG", m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error("E_IO", m) {}
};

}  // namespace adrev
