#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rwprop::cli {

// Exit codes of every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kNumericalError = 3;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rwprop::cli
