#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace icm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

/// Default data location for `ingest`, `validate` and `stratify`.
inline constexpr const char* kDataDirEnv = "ICM_DATA_DIR";

/// Entry point shared by the `icm` binary and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace icm::cli
