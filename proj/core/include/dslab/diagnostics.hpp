#pragma once

#include <functional>
#include <string>

namespace dslab {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink; returns the previous one.
/// The default sink writes "dslab: warning: ..." lines to std::clog.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace dslab
