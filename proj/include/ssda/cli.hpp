#pragma once

namespace ssda {

// Exit codes (documented in the README and --help):
//   0 success
//   1 usage / argument / configuration error
//   2 CSV parse error
//   3 dimension mismatch
//   4 fit error (class data, degenerate feature/projection, convergence, folds)
//   5 I/O or model-file error
int run_cli(int argc, const char* const* argv);

}  // namespace ssda
