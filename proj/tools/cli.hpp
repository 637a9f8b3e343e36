#pragma once

#include <iosfwd>

namespace gibbsic {

/// Environment variable naming the default output directory (used when --out is absent).
inline constexpr const char* kOutDirEnv = "GIBBSIC_OUT_DIR";

/// Entry point of the `gibbsic` tool. Returns 0 on success, 1 on a validation
/// error (bad flags, bad config, missing files), 2 on a runtime failure.
int cli_main(int argc, const char* const* argv);
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gibbsic
