#ifndef STM_CLI_HPP
#define STM_CLI_HPP

namespace stm::cli {

/// Entry point for the `stm` tool. Returns the process exit status; errors are
/// reported on stderr as a single `error: <kind>: <message>` line.
int run(int argc, char** argv);

}  // namespace stm::cli

#endif  // STM_CLI_HPP
