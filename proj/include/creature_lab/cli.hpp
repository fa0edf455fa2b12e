#pragma once

#include <iosfwd>

namespace cl {

/// Exit codes: 0 ok, 1 domain error or failed check, 2 budget exhausted, 64 usage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cl
