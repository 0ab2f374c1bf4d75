#pragma once

#include <iosfwd>
#include <string>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// Instance files are JSON with exactly two top-level keys:
//
//   {
//     "vertices": [ {"id": "u", "patience": 2}, {"id": "v", "patience": "inf"} ],
//     "edges":    [ {"u": "u", "v": "v", "w": 1.0, "p": 0.5} ]
//   }
//
// Unknown fields anywhere are rejected; patience is a positive integer or the
// string "inf".  Parse errors carry the source (path or "<stream>") and, for
// malformed JSON, the byte offset reported by the parser.

StochasticGraph load_instance(std::istream& in, const std::string& source = "<stream>");
StochasticGraph load_instance_file(const std::string& path);

// Serializes in declaration order with round-trippable number formatting.
std::string format_instance(const StochasticGraph& g);
void save_instance_file(const StochasticGraph& g, const std::string& path);

}  // namespace stochmatch
