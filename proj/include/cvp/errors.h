#pragma once

#include <stdexcept>
#include <string>

namespace cvp {

struct UnboundControlVariable : std::runtime_error {
  explicit UnboundControlVariable(const std::string& what) : std::runtime_error(what) {}
};

struct NotApplicable : std::runtime_error {
  explicit NotApplicable(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownAction : std::runtime_error {
  explicit UnknownAction(const std::string& what) : std::runtime_error(what) {}
};

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

struct FragmentViolation : std::runtime_error {
  explicit FragmentViolation(const std::string& what) : std::runtime_error(what) {}
};

struct CompilationTooLarge : std::runtime_error {
  explicit CompilationTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct NoPositiveNetEffect : std::runtime_error {
  explicit NoPositiveNetEffect(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigInvalid : std::runtime_error {
  explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct GridInfeasible : std::runtime_error {
  explicit GridInfeasible(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cvp
