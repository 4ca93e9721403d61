#ifndef INSIDE_INSPECT_HPP
#define INSIDE_INSPECT_HPP

#include <string>

#include "inside/model.hpp"

namespace inside {

/// JSON dump of one article's three graphs (semantic, intent, common) with
/// per-layer edge weights and attention matrices, for external plotting.
std::string inspect_item_json(const ModelParams& params, const PreparedItem& item);

}  // namespace inside

#endif
