#pragma once

namespace p2pmarket {

// Entry point for the p2pmkt tool. Returns 0 on success, 1 on usage or
// validation errors, 2 on runtime failures.
int cli_main(int argc, char** argv);

}  // namespace p2pmarket
