#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bvarnu::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point for the `bvarnu` executable: simulate | fit | forecast | study | verify.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with argv[0] supplied internally.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bvarnu::cli
