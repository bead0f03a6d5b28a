#pragma once

#include <stdexcept>
#include <string>

namespace wadg {

// Configuration or CLI input the user can fix (exit code 2 at the CLI).
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid mesh, geometry, or material state detected during setup.
class invalid_input : public std::runtime_error {
public:
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// Failure while running (instability, resource limits, solver guards).
class runtime_failure : public std::runtime_error {
public:
  explicit runtime_failure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wadg
