#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsg {

/**
 * Dispatches one command line. `in` backs the '-' pseudo-path. Returns 0 on
 * success, 1 on domain errors (bad models, unknown states, failed solves),
 * 2 on usage errors (synopsis goes to err).
 */
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace rsg
