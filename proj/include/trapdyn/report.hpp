#pragma once

#include "json.hpp"

#include "trapdyn/opt.hpp"

namespace trapdyn {

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& A);
nlohmann::json to_json(const SolverInfo& info);
nlohmann::json to_json(const ExistenceResult& res);
nlohmann::json to_json(const TrappingRegion& region);
nlohmann::json to_json(const CriticalSphere& cs);
nlohmann::json to_json(const EnergyEllipsoid& ee);
nlohmann::json to_json(const AnalysisReport& rep);

}  // namespace trapdyn
