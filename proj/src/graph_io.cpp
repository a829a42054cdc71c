#include "entrocurve/graph_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "entrocurve/error.hpp"

namespace entrocurve {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name))
    throw Error(ErrorKind::ParseError, std::string("graph JSON lacks field '") + name + "'");
  return j.at(name);
}

}  // namespace

GraphSpace graph_from_json(const nlohmann::json& j) {
  try {
    const auto& jl = field(j, "labels");
    std::vector<Label> labels;
    for (const auto& l : jl) labels.push_back(l.is_array() ? l.get<Label>() : Label{l.get<int>()});
    const std::size_t n = labels.size();

    const auto& jg = field(j, "generator");
    std::vector<double> flat;
    if (!jg.empty() && jg.front().is_array()) {
      for (const auto& row : jg)
        for (const auto& v : row) flat.push_back(v.get<double>());
    } else {
      flat = jg.get<std::vector<double>>();
    }
    if (flat.size() != n * n) {
      std::ostringstream os;
      os << "generator has " << flat.size() << " entries, expected " << n * n;
      throw Error(ErrorKind::InvalidGenerator, os.str());
    }
    Mat L(n, n);
    for (std::size_t i = 0; i < n * n; ++i) L.data()[i] = flat[i];

    const auto jm = field(j, "measure").get<std::vector<double>>();
    Vec m(static_cast<Eigen::Index>(jm.size()));
    for (std::size_t i = 0; i < jm.size(); ++i) m[static_cast<Eigen::Index>(i)] = jm[i];

    std::set<std::pair<int, int>> listed;
    for (const auto& e : field(j, "edges")) {
      const auto p = e.get<std::vector<int>>();
      if (p.size() != 2 || p[0] < 0 || p[1] < 0 || static_cast<std::size_t>(p[0]) >= n ||
          static_cast<std::size_t>(p[1]) >= n || p[0] == p[1])
        throw Error(ErrorKind::InvalidGenerator, "malformed edge entry " + e.dump());
      listed.insert(std::minmax(p[0], p[1]));
    }
    for (const auto& [x, y] : listed) {
      if (!(L(x, y) > 0.0)) {
        std::ostringstream os;
        os << "edge (" << x << "," << y << ") listed but L(" << x << "," << y << ") <= 0";
        throw Error(ErrorKind::InvalidGenerator, os.str());
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        if ((L(x, y) > 0.0 || L(y, x) > 0.0) &&
            !listed.count({static_cast<int>(x), static_cast<int>(y)})) {
          std::ostringstream os;
          os << "positive rate between " << x << " and " << y << " but no edge listed";
          throw Error(ErrorKind::InvalidGenerator, os.str());
        }
      }
    }
    return GraphSpace(std::move(labels), std::move(L), std::move(m));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, ex.what());
  }
}

GraphSpace load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, ex.what());
  }
  return graph_from_json(j);
}

nlohmann::json graph_to_json(const GraphSpace& space) {
  nlohmann::json j;
  j["labels"] = space.labels();
  nlohmann::json edges = nlohmann::json::array();
  for (int x = 0; x < static_cast<int>(space.size()); ++x)
    for (int y : space.neighbors(x))
      if (x < y) edges.push_back({x, y});
  j["edges"] = edges;
  const Mat& L = space.generator();
  j["generator"] = std::vector<double>(L.data(), L.data() + L.size());
  const Vec& m = space.measure();
  j["measure"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

}  // namespace entrocurve
