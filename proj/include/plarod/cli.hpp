#pragma once

namespace plarod {

// exit codes: 0 success, 2 config error, 3 solver non-convergence,
// 4 nonphysical deformation encountered
int run_cli(int argc, char** argv);

}  // namespace plarod
