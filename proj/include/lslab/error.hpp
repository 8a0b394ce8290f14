#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace lslab {

// Every failure raised by the library derives from Error. kind() is a stable
// tag used by the CLI diagnostics and by tests that check error paths.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& msg)
      : Error("SyntaxError", msg + " at offset " + std::to_string(offset)), offset_(offset), detail_(msg) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::string name, std::size_t offset)
      : Error("UnknownIdentifier",
              "unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        name_(std::move(name)),
        offset_(offset) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class DomainError : public Error {
 public:
  DomainError(std::string function, double argument)
      : Error("DomainError",
              "'" + function + "' evaluated outside its domain (argument " +
                  std::to_string(argument) + ")"),
        function_(std::move(function)),
        argument_(argument) {}
  const std::string& function() const noexcept { return function_; }
  double argument() const noexcept { return argument_; }

 private:
  std::string function_;
  double argument_;
};

struct SingularMap : Error {
  explicit SingularMap(const std::string& msg) : Error("SingularMap", msg) {}
};

struct AssemblyError : Error {
  explicit AssemblyError(const std::string& msg) : Error("AssemblyError", msg) {}
};

inline std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", r);
  return buf;
}

class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double residual, const std::string& detail = {})
      : Error("NoConvergence", "linear solve did not converge after " + std::to_string(iterations) +
                                   " iterations (relative residual " + format_residual(residual) +
                                   ")" + (detail.empty() ? "" : ": " + detail)),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

struct OutsideDomain : Error {
  explicit OutsideDomain(const std::string& msg) : Error("OutsideDomain", msg) {}
};

struct NewtonStall : Error {
  explicit NewtonStall(const std::string& msg) : Error("NewtonStall", msg) {}
};

struct DegreeAmbiguous : Error {
  explicit DegreeAmbiguous(const std::string& msg) : Error("DegreeAmbiguous", msg) {}
};

struct RadiusExhausted : Error {
  explicit RadiusExhausted(const std::string& msg) : Error("RadiusExhausted", msg) {}
};

struct BandTooWide : Error {
  explicit BandTooWide(const std::string& msg) : Error("BandTooWide", msg) {}
};

struct DegenerateTrace : Error {
  explicit DegenerateTrace(const std::string& msg) : Error("DegenerateTrace", msg) {}
};

struct UnstableCounts : Error {
  explicit UnstableCounts(const std::string& msg) : Error("UnstableCounts", msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("IoError", msg) {}
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& msg) : Error("SchemaError", msg) {}
};

struct ResolutionWarning : Error {
  explicit ResolutionWarning(const std::string& msg) : Error("ResolutionWarning", msg) {}
};

}  // namespace lslab
