#include "entrocurve/commands.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "entrocurve/costs.hpp"
#include "entrocurve/error.hpp"
#include "entrocurve/models.hpp"
#include "entrocurve/parallel.hpp"

namespace entrocurve {

namespace {

struct Setup {
  SpacePtr space;
  MarginalPair marginals;
};

Setup setup(const ExperimentConfig& cfg) {
  Setup s;
  s.space = std::make_shared<const GraphSpace>(build_model(parse_model_spec(cfg.model)));
  const Vec nu0 = parse_marginal(cfg.nu0, *s.space, cfg.seed);
  const Vec nu1 = parse_marginal(cfg.nu1, *s.space, cfg.seed + 1);
  s.marginals = make_marginals(*s.space, nu0, nu1);
  return s;
}

nlohmann::json header(const ExperimentConfig& cfg) {
  return {{"tool", "entrocurve"}, {"version", kVersion}, {"config_hash", config_hash(cfg)}, {"config", config_to_json(cfg)}};
}

std::string csv_header(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# entrocurve " << kVersion << " config_hash=" << config_hash(cfg) << "\n";
  os << "# config " << config_to_json(cfg).dump() << "\n";
  return os.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ZeroTempOptions zero_options(const ExperimentConfig& cfg, bool schedule) {
  ZeroTempOptions o;
  o.solve.tol = cfg.tol;
  o.run_schedule = schedule;
  return o;
}

}  // namespace

double audit_relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

CommandResult cmd_bridge(const ExperimentConfig& cfg) {
  const Setup s = setup(cfg);
  const auto grid = parse_tgrid(cfg.tgrid);
  const ZeroTempBridge br = limit_coupling(s.space, s.marginals, cfg.gammas, zero_options(cfg, true));
  std::vector<Vec> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { rows[k] = zero_bridge_marginal(br, grid[k]); });

  nlohmann::json j;
  j["header"] = header(cfg);
  j["model"] = format_model_spec(s.space->model());
  j["bridge"] = bridge_to_json(br);
  nlohmann::json qs = nlohmann::json::array();
  for (std::size_t k = 0; k < grid.size(); ++k)
    qs.push_back({{"t", grid[k]}, {"Q", std::vector<double>(rows[k].data(), rows[k].data() + rows[k].size())}});
  j["rows"] = qs;
  std::ostringstream msg;
  msg << "W1 = " << format_double(br.w1) << ", " << br.support.size() << " support pairs";
  for (const auto& w : br.diagnostics.warnings) msg << "; warning: " << w;
  return {0, j.dump(2) + "\n", msg.str()};
}

CommandResult cmd_convexity(const ExperimentConfig& cfg) {
  const Setup s = setup(cfg);
  const auto grid = parse_tgrid(cfg.tgrid);
  const ZeroTempBridge br = limit_coupling(s.space, s.marginals, cfg.gammas, zero_options(cfg, true));
  const CostReport rep = convexity_check(br, grid, cfg.ct_scale);
  CommandResult res;
  if (ends_with(cfg.out, ".json")) {
    nlohmann::json j = report_to_json(rep);
    j["header"] = header(cfg);
    res.output = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << csv_header(cfg) << report_to_csv(rep);
    if (rep.flat) {
      os << "# second differences of H(Q_t|m) on t = k/20:";
      for (double d : rep.second_differences) os << ' ' << format_double(d);
      os << "\n";
    }
    os << "# worst " << format_double(rep.worst) << "\n";
    res.output = os.str();
  }
  const bool ok = rep.passed(cfg.gap_tol);
  res.exit_code = ok ? 0 : 1;
  res.message = std::string(ok ? "convexity holds" : "convexity FAILS") + ", worst gap " + format_double(rep.worst);
  return res;
}

CommandResult cmd_derivative_audit(const ExperimentConfig& cfg) {
  const Setup s = setup(cfg);
  const auto grid = parse_tgrid(cfg.tgrid);
  constexpr double h1 = 1e-4, h2 = 1e-3;
  for (double t : grid)
    if (!(t - h2 > 0.0 && t + h2 < 1.0)) throw Error(ErrorKind::DomainError, "audit t-grid must stay 1e-3 inside (0,1)");

  nlohmann::json rows = nlohmann::json::array();
  double worst1 = 0.0, worst2 = 0.0;
  SolveOptions so;
  so.tol = cfg.tol;
  for (double gamma : cfg.gammas) {
    const SchrodingerSolution sol = solve_schrodinger(s.space, gamma, s.marginals, so);
    std::vector<nlohmann::json> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
      const double t = grid[k];
      const auto d1 = phi_psi_d1(sol, t);
      const auto d2 = phi_psi_d2(sol, t);
      const auto p0 = phi_psi(sol, t);
      const auto pa = phi_psi(sol, t + h1), pb = phi_psi(sol, t - h1);
      const auto qa = phi_psi(sol, t + h2), qb = phi_psi(sol, t - h2);
      const double fphi1 = (pa.first - pb.first) / (2 * h1), fpsi1 = (pa.second - pb.second) / (2 * h1);
      const double fphi2 = (qa.first - 2 * p0.first + qb.first) / (h2 * h2);
      const double fpsi2 = (qa.second - 2 * p0.second + qb.second) / (h2 * h2);
      out[k] = {{"gamma", gamma},
                {"t", t},
                {"phi1", d1.first},  {"phi1_fd", fphi1}, {"phi1_rel", audit_relative_error(d1.first, fphi1)},
                {"psi1", d1.second}, {"psi1_fd", fpsi1}, {"psi1_rel", audit_relative_error(d1.second, fpsi1)},
                {"phi2", d2.first},  {"phi2_fd", fphi2}, {"phi2_rel", audit_relative_error(d2.first, fphi2)},
                {"psi2", d2.second}, {"psi2_fd", fpsi2}, {"psi2_rel", audit_relative_error(d2.second, fpsi2)}};
    });
    for (auto& r : out) {
      worst1 = std::max({worst1, r["phi1_rel"].get<double>(), r["psi1_rel"].get<double>()});
      worst2 = std::max({worst2, r["phi2_rel"].get<double>(), r["psi2_rel"].get<double>()});
      rows.push_back(std::move(r));
    }
  }

  const ZeroTempBridge br = limit_coupling(s.space, s.marginals, default_gamma_schedule(), zero_options(cfg, false));
  nlohmann::json bounds = nlohmann::json::array();
  for (double t : grid) {
    const auto b = second_derivative_bounds(br, t);
    bounds.push_back({{"t", t}, {"phi2_bound", b.first}, {"psi2_bound", b.second}});
  }

  nlohmann::json j;
  j["header"] = header(cfg);
  j["rows"] = rows;
  j["zero_temperature_bounds"] = bounds;
  j["worst_rel_error_d1"] = worst1;
  j["worst_rel_error_d2"] = worst2;
  std::ostringstream msg;
  msg << "worst relative error: first derivative " << format_double(worst1) << ", second derivative "
      << format_double(worst2);
  return {0, j.dump(2) + "\n", msg.str()};
}

CommandResult run_guarded(const std::function<CommandResult()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    return {is_convergence_error(e.kind()) ? 3 : 2, "", e.what()};
  } catch (const std::exception& e) {
    return {2, "", e.what()};
  }
}

}  // namespace entrocurve
