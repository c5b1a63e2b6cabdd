#pragma once

namespace eit {

// Exit status: 0 success, 1 configuration error, 2 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace eit
