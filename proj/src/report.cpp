#include "trapdyn/report.hpp"

namespace trapdyn {

using nlohmann::json;

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& A) {
  json out = json::array();
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < A.cols(); ++c) row.push_back(A(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const SolverInfo& info) {
  return {{"backend", info.backend},
          {"status", info.status},
          {"iterations", info.iterations},
          {"wall_time_s", info.seconds},
          {"relative_gap", info.relative_gap},
          {"primal_infeasibility", info.primal_infeasibility},
          {"dual_infeasibility", info.dual_infeasibility}};
}

json to_json(const ExistenceResult& res) {
  json out{{"a_star", res.a_star},
           {"a_solver", res.a_solver},
           {"m_star", to_json(res.m_star)},
           {"status", to_string(res.status)},
           {"eps_neg", res.eps_neg},
           {"solver", to_json(res.solver)}};
  if (res.certificate) {
    out["certificate"] = to_json(*res.certificate);
    out["certificate_valid"] = res.certificate_valid;
  } else {
    out["certificate"] = nullptr;
  }
  return out;
}

json to_json(const TrappingRegion& region) {
  json out{{"m", to_json(region.m)},
           {"R_tight", region.R_tight},
           {"R_conservative", region.R_conservative},
           {"ultimate_bound_original", region.ultimate_bound_original}};
  out["lambda_star"] =
      region.lambda_star ? json(*region.lambda_star) : json(nullptr);
  return out;
}

json to_json(const CriticalSphere& cs) {
  json points = json::array();
  for (const auto& p : cs.points()) points.push_back(to_json(p));
  return {{"center", to_json(cs.center)},
          {"basis", to_json(cs.basis)},
          {"radius", cs.radius},
          {"rank", cs.rank},
          {"points", std::move(points)}};
}

json to_json(const EnergyEllipsoid& ee) {
  return {{"center", to_json(ee.center)},
          {"axes", to_json(ee.axes)},
          {"semi_axes", to_json(ee.semi_axes)},
          {"peak_rate", ee.peak_rate},
          {"degenerate", ee.degenerate}};
}

json to_json(const AnalysisReport& rep) {
  json out{{"n", rep.n},
           {"lossless_defect", rep.lossless_defect},
           {"existence", to_json(rep.existence)},
           {"center_policy", rep.center_policy},
           {"center_may_be_nonunique", rep.center_may_be_nonunique}};
  auto opt = [](const auto& o) { return o ? to_json(*o) : json(nullptr); };
  out["trapping_region"] = opt(rep.region);
  out["A_s_eigenvalues"] = opt(rep.A_s_eigenvalues);
  out["d"] = opt(rep.d);
  out["critical_sphere"] = opt(rep.critical);
  out["ellipsoid"] = opt(rep.ellipsoid);
  if (rep.sdp_route) {
    out["radius_sdp"] = {{"R_tight", rep.sdp_route->radius},
                         {"lambda_star", rep.sdp_route->lambda_star},
                         {"gamma_star", rep.sdp_route->gamma_star},
                         {"solver", to_json(rep.sdp_route->solver)}};
  } else {
    out["radius_sdp"] = nullptr;
  }
  out["route_disagreement"] =
      rep.route_disagreement ? json(*rep.route_disagreement) : json(nullptr);
  return out;
}

}  // namespace trapdyn
