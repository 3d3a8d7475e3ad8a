#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ellab/field.hpp"
#include "ellab/liouville.hpp"
#include "ellab/nonlinearity.hpp"
#include "ellab/profile1d.hpp"
#include "ellab/radial.hpp"
#include "ellab/trajectory.hpp"

namespace ellab::cli {

// max over nodes of |W^2 - 2 (F(z) - F(V))|.
double first_integral_error(const Profile1D& p, const Nonlinearity& nl);

nlohmann::json zero_set_json(const ZeroSet& E);
nlohmann::json analysis_json(const Nonlinearity& nl);
nlohmann::json profile_json(const Profile1D& p, const Nonlinearity& nl, const std::string& file);
nlohmann::json summary_json(const Field& u, const std::string& kind, const std::string& u0);
nlohmann::json trajectory_json(const TrajectoryReport& r, ProblemKind kind);
nlohmann::json bubble_json(const RadialBubble& b, const BubbleEnergy* energy);
nlohmann::json eigen_json(const Eigenpair& e);
nlohmann::json slide_json(const SlidingReport& s, const RadialBubble& b, Point2 from, Point2 to);
nlohmann::json sweep_json(const SweepReport& r);

std::string field_csv(const Field& u);
std::string profile_csv(const Profile1D& p);
std::string bubble_csv(const RadialBubble& b);
std::string eigen_csv(const Eigenpair& e);

// File name for the profile with limit z, e.g. profile_3.14159.csv.
std::string profile_file_name(double z);

}  // namespace ellab::cli
