#pragma once

#include <functional>
#include <string>

namespace alselect {

using WarningSink = std::function<void(const std::string&)>;

/// Default sink writes "warning: ..." to stderr. Pass nullptr to silence.
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace alselect
