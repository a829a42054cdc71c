#pragma once
// JSON form of a graph space:
//   {"labels": [[..], ..], "edges": [[x,y], ..],
//    "generator": [row-major |X|^2 numbers], "measure": [..]}

#include <string>

#include "entrocurve/graph_space.hpp"
#include "json.hpp"

namespace entrocurve {

GraphSpace graph_from_json(const nlohmann::json& j);
GraphSpace load_graph_file(const std::string& path);
nlohmann::json graph_to_json(const GraphSpace& space);

}  // namespace entrocurve
