#pragma once

namespace pacurves {

/// Entry point of the pa_curves tool. Exit codes: 0 success, 1 usage or
/// configuration error, 2 numerical failure, 3 verification failure.
int run_cli(int argc, const char* const* argv);

}  // namespace pacurves
