#pragma once

#include <stdexcept>
#include <string>

namespace hop {

// Bad arguments, bad configuration, violated preconditions.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine could not reach its accuracy contract
// (integrator tolerance, contour winding instability, ...).
struct accuracy_error : std::runtime_error {
    explicit accuracy_error(const std::string& what) : std::runtime_error(what) {}
};

// The sample left the perturbative regime (an exceptional event); campaigns
// count these as rejections rather than failures.
struct regime_error : std::runtime_error {
    explicit regime_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hop
