#pragma once

#include <map>
#include <string>

#include "agegraph/param_store.hpp"

namespace agegraph {

// Checkpoint layout, version 1:
//   line  "agckpt 1"
//   lines "meta <key> <value...>"        (sorted by key)
//   line  "tensors <count>"
//   lines "tensor <name> <rows> <cols>"  (store order)
//   line  "end"
//   raw little-endian IEEE-754 doubles: per tensor, value then Adam m then v.
//
// Round trips are bit-exact: doubles are moved through their uint64 bit
// patterns, never through text.

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::map<std::string, std::string>& meta = {});

// Loads into an empty store (creating entries in file order) or into a store
// whose entry names and shapes match the file exactly; any mismatch throws
// CompatibilityError. Returns the meta map.
std::map<std::string, std::string> load_checkpoint(const std::string& path,
                                                   ParamStore& store);

}  // namespace agegraph
