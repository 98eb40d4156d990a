#pragma once

#include "plate/diagnostics.hpp"
#include "plate/threshold.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace plate::io {

/// Load specs: const:A | ball:CX[,CY]:R:A | delta:X[,Y]:MASS | samples:PATH.
/// `samples` needs the grid the CSV was written on.
Forcing parse_forcing(const std::string& spec, const GridPtr& grid = nullptr);

/// printf("%.17g")
std::string format_double(double v);

nlohmann::json to_json(const SolveReport& r);
/// Fixed schema: positivity, hopf_c0, collar_mass, tau, conv, trace, beta,
/// profile_residual, bounds. Unavailable values serialise as null.
nlohmann::json to_json(const DiagnosticsReport& r);
nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const BlowupProfile& p);

/// Columns eps,h,min_u,is_nonneg,L_minus,L_plus,M,M_over_eps,beta,
/// profile_residual,hopf_c0,collar_mass,h1_v,l2_eps_lap. Failed rows keep eps
/// and leave the remaining cells empty.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

struct ProfileRow {
  double t = 0.0;
  double u = 0.0;
  double du = 0.0;
  double d2u = 0.0;
};

/// Columns t,u,du,d2u.
void write_profile_csv(std::ostream& os, std::span<const ProfileRow> rows);

/// Columns s,u_tilde,profile.
void write_blowup_csv(std::ostream& os, const BlowupProfile& p);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// `<path>.manifest.json`
std::filesystem::path manifest_path(const std::filesystem::path& output);

}  // namespace plate::io
