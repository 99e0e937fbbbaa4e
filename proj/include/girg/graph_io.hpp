#pragma once

#include <filesystem>
#include <iosfwd>

#include "girg/model.hpp"

namespace girg {

// Text format, version 1:
//   #girg v1
//   params n=<n> d=<d> tau=<tau> alpha=<alpha> theta=<theta> geom=<inf|min> seed=<seed> [fixed=<count>]
//   V <count>
//   <id> <x_1> ... <x_d> <weight>
//   E <count>
//   <u> <v>            (u < v)
// Reals are written with 17 significant digits and read back bit-exactly.

void save_graph(const Graph& graph, std::ostream& out);
void save_graph(const Graph& graph, const std::filesystem::path& path);

/// Throws ParseError carrying the offending line number.
[[nodiscard]] Graph load_graph(std::istream& in);
[[nodiscard]] Graph load_graph(const std::filesystem::path& path);

} // namespace girg
