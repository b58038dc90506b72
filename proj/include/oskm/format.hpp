#pragma once

#include <string>

namespace oskm {

// Round-trip-exact decimal formatting ("%.17g"); infinities print as "inf".
std::string format_double(double v);

}  // namespace oskm
