#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace icmm {

/// Raised for malformed or invalid user input (files, flags, datasets).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningSink = std::function<void(const std::string&)>;

// Installs a new warning sink and returns the previous one. An empty sink
// silences warnings.
WarningSink set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace icmm
