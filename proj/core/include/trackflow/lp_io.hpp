#ifndef TRACKFLOW_LP_IO_HPP
#define TRACKFLOW_LP_IO_HPP

#include <iosfwd>
#include <string>

#include "trackflow/lp.hpp"

namespace trackflow::lp {

/// LP text format:
///   MAXIMIZE (or MINIMIZE)       one linear expression
///   SUBJECT TO                   one relation (<=, =, >=) per line
///   BOUNDS                       optional: "x1 >= 0", "x2 <= 4", "x3 free"
///   END
/// Whitespace-insensitive, '#' starts a comment. Variables default to >= 0.
LinearProgram parse_lp_text(const std::string& text);
LinearProgram read_lp_file(const std::string& path);

void print_result(std::ostream& os, const LinearProgram& lp, const SolveResult& result);

}  // namespace trackflow::lp

#endif
