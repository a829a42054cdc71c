#include "entrocurve/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "entrocurve/error.hpp"

namespace entrocurve {

GraphSpace build_lattice_box(const std::vector<int>& lo, const std::vector<int>& hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw Error(ErrorKind::EmptyBox, "box bounds must be non-empty and of equal dimension");
  const std::size_t dim = lo.size();
  std::vector<int> extent(dim);
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (hi[i] < lo[i]) throw Error(ErrorKind::EmptyBox, "hi < lo in some coordinate");
    extent[i] = hi[i] - lo[i] + 1;
    total *= static_cast<std::size_t>(extent[i]);
  }
  // first coordinate varies slowest
  std::vector<Label> labels(total, Label(dim));
  std::vector<std::size_t> stride(dim, 1);
  for (std::size_t i = dim - 1; i > 0; --i) stride[i - 1] = stride[i] * static_cast<std::size_t>(extent[i]);
  for (std::size_t v = 0; v < total; ++v)
    for (std::size_t i = 0; i < dim; ++i)
      labels[v][i] = lo[i] + static_cast<int>((v / stride[i]) % static_cast<std::size_t>(extent[i]));

  Mat L = Mat::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  for (std::size_t v = 0; v < total; ++v) {
    for (std::size_t i = 0; i < dim; ++i) {
      const int c = labels[v][i];
      if (c > lo[i]) L(v, v - stride[i]) = 1.0;
      if (c < hi[i]) L(v, v + stride[i]) = 1.0;
    }
    L(v, v) = -L.row(static_cast<Eigen::Index>(v)).sum();
  }
  ModelKind kind;
  kind.tag = ModelTag::LatticeBox;
  kind.lo = lo;
  kind.hi = hi;
  return GraphSpace(std::move(labels), std::move(L), Vec::Ones(static_cast<Eigen::Index>(total)), kind);
}

GraphSpace build_hypercube(const std::vector<double>& alphas) {
  const std::size_t n = alphas.size();
  if (n == 0 || n > 20) throw Error(ErrorKind::BadParameter, "hypercube dimension must be in [1,20]");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::BadParameter, "alpha_i must lie in (0,1)");
  const std::size_t N = std::size_t{1} << n;
  std::vector<Label> labels(N, Label(n));
  Mat L = Mat::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  Vec m(static_cast<Eigen::Index>(N));
  for (std::size_t z = 0; z < N; ++z) {
    double mz = 1.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int zi = static_cast<int>((z >> i) & 1U);
      labels[z][i] = zi;
      mz *= zi ? alphas[i] : 1.0 - alphas[i];
      const double rate = zi ? 1.0 - alphas[i] : alphas[i];
      L(z, z ^ (std::size_t{1} << i)) = rate;
      diag += rate;
    }
    L(z, z) = -diag;
    m[static_cast<Eigen::Index>(z)] = mz;
  }
  ModelKind kind;
  kind.tag = ModelTag::Hypercube;
  kind.alphas = alphas;
  return GraphSpace(std::move(labels), std::move(L), std::move(m), kind);
}

GraphSpace build_complete(const std::vector<double>& mu) {
  const std::size_t n = mu.size();
  if (n < 2) throw Error(ErrorKind::BadParameter, "complete graph needs at least 2 vertices");
  double total = 0.0;
  for (double v : mu) {
    if (!(v > 0.0)) throw Error(ErrorKind::BadParameter, "mu must be strictly positive");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::BadParameter, "mu must sum to 1");
  std::vector<Label> labels(n);
  Mat L(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Vec m(static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    labels[x] = {static_cast<int>(x)};
    m[static_cast<Eigen::Index>(x)] = mu[x];
    for (std::size_t y = 0; y < n; ++y) L(x, y) = x == y ? -(1.0 - mu[x]) : mu[y];
  }
  ModelKind kind;
  kind.tag = ModelTag::CompleteGraph;
  kind.mu = mu;
  return GraphSpace(std::move(labels), std::move(L), std::move(m), kind);
}

GraphSpace build_circle(int N) {
  if (N < 3) throw Error(ErrorKind::BadParameter, "circle needs N >= 3");
  std::vector<Label> labels(static_cast<std::size_t>(N));
  Mat L = Mat::Zero(N, N);
  for (int z = 0; z < N; ++z) {
    labels[static_cast<std::size_t>(z)] = {z};
    L(z, (z + 1) % N) = 1.0;
    L(z, (z + N - 1) % N) = 1.0;
    L(z, z) = -2.0;
  }
  ModelKind kind;
  kind.tag = ModelTag::Circle;
  kind.N = N;
  return GraphSpace(std::move(labels), std::move(L), Vec::Constant(N, 1.0 / N), kind);
}

GraphSpace build_bernoulli_laplace(int n, int kappa) {
  if (n < 2 || n > 24 || kappa < 1 || kappa > n - 1)
    throw Error(ErrorKind::BadParameter, "Bernoulli-Laplace needs 1 <= kappa <= n-1");
  std::vector<Label> labels;
  for (unsigned long v = 0; v < (1UL << n); ++v) {
    if (__builtin_popcountl(v) != kappa) continue;
    Label z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = static_cast<int>((v >> (n - 1 - i)) & 1UL);
    labels.push_back(std::move(z));
  }
  std::map<Label, int> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);
  const auto N = static_cast<Eigen::Index>(labels.size());
  Mat L = Mat::Zero(N, N);
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (labels[a][static_cast<std::size_t>(i)] == labels[a][static_cast<std::size_t>(j)]) continue;
        Label w = labels[a];
        std::swap(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]);
        L(static_cast<Eigen::Index>(a), index.at(w)) = 1.0;
      }
    }
    L(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = -static_cast<double>(kappa) * (n - kappa);
  }
  ModelKind kind;
  kind.tag = ModelTag::BernoulliLaplace;
  kind.n = n;
  kind.kappa = kappa;
  return GraphSpace(std::move(labels), std::move(L), Vec::Constant(N, 1.0 / static_cast<double>(N)), kind);
}

GraphSpace build_model(const ModelKind& kind) {
  switch (kind.tag) {
    case ModelTag::LatticeBox: return build_lattice_box(kind.lo, kind.hi);
    case ModelTag::Hypercube: return build_hypercube(kind.alphas);
    case ModelTag::CompleteGraph: return build_complete(kind.mu);
    case ModelTag::Circle: return build_circle(kind.N);
    case ModelTag::BernoulliLaplace: return build_bernoulli_laplace(kind.n, kind.kappa);
    case ModelTag::Custom: break;
  }
  throw Error(ErrorKind::BadParameter, "custom spaces have no builder; load them from JSON");
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::ParseError, "not an integer: '" + s + "'");
  return v;
}

using KeyValues = std::map<std::string, std::vector<std::string>>;

KeyValues split_params(const std::string& body) {
  KeyValues kv;
  std::string current;
  std::stringstream ss(body);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      if (current.empty()) throw Error(ErrorKind::ParseError, "value '" + token + "' has no key");
      kv[current].push_back(token);
      continue;
    }
    current = token.substr(0, eq);
    if (kv.count(current)) throw Error(ErrorKind::ParseError, "duplicate key '" + current + "'");
    kv[current].push_back(token.substr(eq + 1));
  }
  return kv;
}

const std::vector<std::string>& need(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorKind::ParseError, "missing parameter '" + key + "'");
  return it->second;
}

std::vector<int> int_list(const std::vector<std::string>& v) {
  std::vector<int> out;
  for (const auto& s : v) out.push_back(parse_int(s));
  return out;
}

std::vector<double> double_list(const std::vector<std::string>& v) {
  std::vector<double> out;
  for (const auto& s : v) out.push_back(parse_double(s));
  return out;
}

void reject_unknown(const KeyValues& kv, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : kv) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw Error(ErrorKind::ParseError, "unknown parameter '" + k + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

ModelKind parse_model_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const KeyValues kv = colon == std::string::npos ? KeyValues{} : split_params(spec.substr(colon + 1));
  ModelKind kind;
  if (name == "hypercube") {
    reject_unknown(kv, {"n", "alpha"});
    kind.tag = ModelTag::Hypercube;
    kind.alphas = double_list(need(kv, "alpha"));
    if (kv.count("n")) {
      const int n = parse_int(need(kv, "n").at(0));
      if (n < 1) throw Error(ErrorKind::BadParameter, "hypercube n must be positive");
      if (kind.alphas.size() == 1) kind.alphas.assign(static_cast<std::size_t>(n), kind.alphas[0]);
      if (kind.alphas.size() != static_cast<std::size_t>(n))
        throw Error(ErrorKind::ParseError, "alpha list length differs from n");
    }
  } else if (name == "bl") {
    reject_unknown(kv, {"n", "k", "kappa"});
    kind.tag = ModelTag::BernoulliLaplace;
    kind.n = parse_int(need(kv, "n").at(0));
    kind.kappa = parse_int(need(kv, kv.count("k") ? "k" : "kappa").at(0));
  } else if (name == "circle") {
    reject_unknown(kv, {"N"});
    kind.tag = ModelTag::Circle;
    kind.N = parse_int(need(kv, "N").at(0));
  } else if (name == "zbox") {
    reject_unknown(kv, {"n", "lo", "hi"});
    kind.tag = ModelTag::LatticeBox;
    kind.lo = int_list(need(kv, "lo"));
    kind.hi = int_list(need(kv, "hi"));
    if (kv.count("n")) {
      const auto n = static_cast<std::size_t>(parse_int(need(kv, "n").at(0)));
      if (kind.lo.size() == 1) kind.lo.assign(n, kind.lo[0]);
      if (kind.hi.size() == 1) kind.hi.assign(n, kind.hi[0]);
      if (kind.lo.size() != n || kind.hi.size() != n)
        throw Error(ErrorKind::ParseError, "box bounds length differs from n");
    }
  } else if (name == "complete") {
    reject_unknown(kv, {"mu", "n"});
    kind.tag = ModelTag::CompleteGraph;
    std::vector<std::string> mu = kv.count("mu") ? need(kv, "mu") : std::vector<std::string>{};
    int uniform_n = 0;
    if (mu.empty()) {
      uniform_n = parse_int(need(kv, "n").at(0));
    } else if (mu.size() == 1 && mu[0].rfind("uniform:", 0) == 0) {
      uniform_n = parse_int(mu[0].substr(8));
    }
    if (uniform_n != 0) {
      if (uniform_n < 2) throw Error(ErrorKind::BadParameter, "complete graph needs at least 2 vertices");
      kind.mu.assign(static_cast<std::size_t>(uniform_n), 1.0 / uniform_n);
    } else {
      kind.mu = double_list(mu);
    }
  } else {
    throw Error(ErrorKind::ParseError, "unknown model '" + name + "'");
  }
  return kind;
}

std::string format_model_spec(const ModelKind& kind) {
  std::ostringstream os;
  auto list = [&os](const auto& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ',';
      if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, double>)
        os << format_double(v[i]);
      else
        os << v[i];
    }
  };
  switch (kind.tag) {
    case ModelTag::Hypercube:
      os << "hypercube:n=" << kind.alphas.size() << ",alpha=";
      list(kind.alphas);
      break;
    case ModelTag::BernoulliLaplace:
      os << "bl:n=" << kind.n << ",k=" << kind.kappa;
      break;
    case ModelTag::Circle:
      os << "circle:N=" << kind.N;
      break;
    case ModelTag::LatticeBox:
      os << "zbox:n=" << kind.lo.size() << ",lo=";
      list(kind.lo);
      os << ",hi=";
      list(kind.hi);
      break;
    case ModelTag::CompleteGraph:
      os << "complete:mu=";
      list(kind.mu);
      break;
    case ModelTag::Custom:
      os << "custom";
      break;
  }
  return os.str();
}

int find_vertex(const GraphSpace& space, const Label& label) {
  const auto& labels = space.labels();
  auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

}  // namespace entrocurve
