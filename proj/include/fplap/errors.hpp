#pragma once

#include <stdexcept>
#include <string>

namespace fplap {

/// Malformed input file (mesh, table, config); message carries the line number.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally invalid data (non-manifold mesh, empty domain, bad report set).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Request exceeds a configured resource cap (e.g. sphere subdivision level).
class ResourceLimitError : public std::runtime_error {
public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// No sign change found when probing for a negative-energy endpoint.
class EndpointNotFound : public std::runtime_error {
public:
  explicit EndpointNotFound(const std::string& what) : std::runtime_error(what) {}
};

}
