#include "entrocurve/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "entrocurve/error.hpp"

namespace entrocurve {

namespace {

double to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
  return v;
}

long long to_int(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw Error(ErrorKind::ParseError, "not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"model", c.model}, {"nu0", c.nu0},         {"nu1", c.nu1},   {"tgrid", c.tgrid},
          {"gammas", c.gammas}, {"tol", c.tol},       {"gap_tol", c.gap_tol},
          {"seed", c.seed},   {"out", c.out},         {"ct_scale", c.ct_scale}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
  static const char* const known[] = {"model", "nu0", "nu1", "tgrid", "gammas", "tol", "gap_tol", "seed", "out", "ct_scale"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw Error(ErrorKind::ParseError, "unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("model")) c.model = j.at("model").get<std::string>();
    if (j.contains("nu0")) c.nu0 = j.at("nu0").get<std::string>();
    if (j.contains("nu1")) c.nu1 = j.at("nu1").get<std::string>();
    if (j.contains("tgrid")) c.tgrid = j.at("tgrid").get<std::string>();
    if (j.contains("gammas")) c.gammas = j.at("gammas").get<std::vector<double>>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("gap_tol")) c.gap_tol = j.at("gap_tol").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("ct_scale")) c.ct_scale = j.at("ct_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad config: ") + e.what());
  }
  return c;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  for (const auto& tok : split(spec, ','))
    if (!tok.empty()) out.push_back(to_double(tok));
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty list: '" + spec + "'");
  return out;
}

std::vector<double> parse_tgrid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return parse_double_list(spec);
  if (parts.size() != 3) throw Error(ErrorKind::ParseError, "t-grid must be a:b:n or a list");
  const double a = to_double(parts[0]), b = to_double(parts[1]);
  const long long n = to_int(parts[2]);
  if (n < 1) throw Error(ErrorKind::ParseError, "t-grid needs n >= 1");
  std::vector<double> out;
  for (long long k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  return out;
}

Vec parse_marginal(const std::string& spec, const GraphSpace& space, std::uint64_t default_seed) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (!spec.empty() && spec.front() == '[') {
    std::vector<double> v;
    try {
      v = nlohmann::json::parse(spec).get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, std::string("bad marginal array: ") + e.what());
    }
    if (static_cast<Eigen::Index>(v.size()) != n) throw Error(ErrorKind::BadParameter, "marginal array length differs from |X|");
    Vec out = Eigen::Map<Vec>(v.data(), n);
    const double s = out.sum();
    if (!(s > 0.0)) throw Error(ErrorKind::InfeasibleMarginals, "marginal array has no mass");
    return out / s;
  }
  const auto parts = split(spec, ':');
  if (parts.empty()) throw Error(ErrorKind::ParseError, "empty marginal spec");
  const std::string& kind = parts[0];
  if (kind == "uniform") return Vec::Constant(n, 1.0 / static_cast<double>(n));
  if (kind == "measure") return space.measure() / space.measure().sum();
  if (kind == "dirac") {
    if (parts.size() != 2) throw Error(ErrorKind::ParseError, "dirac needs an index: dirac:i");
    const long long i = to_int(parts[1]);
    if (i < 0 || i >= n) throw Error(ErrorKind::IndexOutOfRange, "dirac index outside the space");
    Vec v = Vec::Zero(n);
    v[i] = 1.0;
    return v;
  }
  if (kind == "random") {
    if (parts.size() > 3) throw Error(ErrorKind::ParseError, "random[:seed[:k]]");
    const std::uint64_t seed = parts.size() >= 2 ? static_cast<std::uint64_t>(to_int(parts[1])) : default_seed;
    const long long k = parts.size() == 3 ? to_int(parts[2]) : n;
    if (k < 1 || k > n) throw Error(ErrorKind::BadParameter, "random support size must lie in 1..|X|");
    std::mt19937_64 rng(seed);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (long long i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(i + static_cast<long long>(rng() % static_cast<std::uint64_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    Vec v = Vec::Zero(n);
    for (long long i = 0; i < k; ++i) v[idx[static_cast<std::size_t>(i)]] = static_cast<double>(rng() % 100 + 1);
    return v / v.sum();
  }
  throw Error(ErrorKind::ParseError, "unknown marginal spec '" + spec + "'");
}

}  // namespace entrocurve
