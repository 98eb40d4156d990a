#include "plate/io.hpp"

#include "plate/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <system_error>

namespace plate::io {

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json number(const std::optional<double>& v) { return v ? number(*v) : nlohmann::json(nullptr); }

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }
std::string cell(const std::optional<double>& v) { return v ? cell(*v) : std::string(); }

std::vector<double> split_numbers(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + item + "' in forcing spec '" + spec + "'");
    }
    start = end + 1;
  }
  return out;
}

Eigen::Vector2d point(const std::vector<double>& xy, const std::string& spec) {
  if (xy.empty() || xy.size() > 2) throw ConfigError("forcing spec '" + spec + "' needs X or X,Y");
  return {xy[0], xy.size() > 1 ? xy[1] : 0.0};
}

}  // namespace

Forcing parse_forcing(const std::string& spec, const GridPtr& grid) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = spec.find(':', start);
    parts.push_back(spec.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  const std::string& kind = parts[0];
  Forcing f;
  if (kind == "const" && parts.size() == 2) {
    f = ConstantLoad{split_numbers(parts[1], spec).at(0)};
  } else if (kind == "ball" && parts.size() == 4) {
    f = BallLoad{point(split_numbers(parts[1], spec), spec), split_numbers(parts[2], spec).at(0),
                 split_numbers(parts[3], spec).at(0)};
  } else if (kind == "delta" && parts.size() == 3) {
    f = PointLoad{std::nullopt, point(split_numbers(parts[1], spec), spec), split_numbers(parts[2], spec).at(0)};
  } else if (kind == "samples" && parts.size() >= 2) {
    if (!grid) throw ConfigError("samples forcing needs a fixed grid");
    const std::string path = spec.substr(std::string("samples:").size());
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read forcing samples from " + path);
    f = SampledLoad{read_field_csv(in, grid)};
  } else {
    throw ConfigError("unrecognised forcing spec '" + spec + "' (const:A | ball:C:R:A | delta:X:M | samples:PATH)");
  }
  validate_forcing(f);
  return f;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json to_json(const SolveReport& r) {
  return {{"method", r.method},
          {"iterations", r.iterations},
          {"relative_residual", number(r.relative_residual)},
          {"seconds", number(r.seconds)},
          {"residual_increases", r.residual_increases}};
}

nlohmann::json to_json(const DiagnosticsReport& r) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : r.bounds) bounds.push_back({{"name", b.name}, {"satisfied", b.satisfied}, {"slack", number(b.slack)}});
  return {{"positivity", {{"is_nonneg", r.positivity.is_nonneg}, {"min", number(r.positivity.min)}, {"argmin", r.positivity.argmin}}},
          {"hopf_c0", number(r.hopf_c0)},
          {"collar_mass", number(r.collar_mass)},
          {"tau", number(r.tau)},
          {"conv", {{"h1_v", number(r.conv.h1_v)}, {"l2_eps_lap", number(r.conv.l2_eps_lap)}}},
          {"trace", {{"l_minus", number(r.l_minus)}, {"l_plus", number(r.l_plus)}, {"m", number(r.m)}, {"m_over_eps", number(r.m_over_eps)}}},
          {"beta", number(r.beta)},
          {"profile_residual", number(r.profile_residual)},
          {"bounds", bounds}};
}

nlohmann::json to_json(const ThresholdResult& r) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& p : r.history)
    history.push_back({{"eps", number(p.eps)}, {"h", number(p.h)}, {"min_u", number(p.min_u)}, {"is_nonneg", p.is_nonneg}});
  nlohmann::json out = {{"status", to_string(r.status)},
                        {"eps0", number(r.eps0)},
                        {"eps_fail", number(r.eps_fail)},
                        {"tau", number(r.tau)},
                        {"history", history}};
  if (r.certificate) {
    const auto& c = *r.certificate;
    out["certificate"] = {{"eps", number(c.eps)},         {"h", number(c.h)},
                          {"min_u_h", number(c.min_u_h)}, {"min_u_h2", number(c.min_u_h2)},
                          {"nonneg_h", c.nonneg_h},       {"nonneg_h2", c.nonneg_h2}};
  } else {
    out["certificate"] = nullptr;
  }
  return out;
}

nlohmann::json to_json(const BlowupProfile& p) {
  return {{"x0", p.x0},
          {"m", number(p.m)},
          {"beta", number(p.beta)},
          {"profile_residual", number(p.residual)},
          {"relative_residual", number(p.beta > 0.0 ? p.residual / p.beta : std::nan(""))},
          {"samples", p.s.size()}};
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "eps,h,min_u,is_nonneg,L_minus,L_plus,M,M_over_eps,beta,profile_residual,hopf_c0,collar_mass,h1_v,l2_eps_lap\n";
  for (const auto& row : rows) {
    os << cell(row.eps) << ',' << (row.h > 0.0 ? cell(row.h) : std::string());
    if (!row.report) {
      os << std::string(12, ',') << '\n';
      continue;
    }
    const DiagnosticsReport& r = *row.report;
    os << ',' << cell(r.positivity.min) << ',' << (r.positivity.is_nonneg ? "true" : "false") << ','
       << cell(r.l_minus) << ',' << cell(r.l_plus) << ',' << cell(r.m) << ',' << cell(r.m_over_eps) << ','
       << cell(r.beta) << ',' << cell(r.profile_residual) << ',' << cell(r.hopf_c0) << ',' << cell(r.collar_mass)
       << ',' << cell(r.conv.h1_v) << ',' << cell(r.conv.l2_eps_lap) << '\n';
  }
}

void write_profile_csv(std::ostream& os, std::span<const ProfileRow> rows) {
  os << "t,u,du,d2u\n";
  for (const auto& r : rows)
    os << format_double(r.t) << ',' << format_double(r.u) << ',' << format_double(r.du) << ','
       << format_double(r.d2u) << '\n';
}

void write_blowup_csv(std::ostream& os, const BlowupProfile& p) {
  os << "s,u_tilde,profile\n";
  const exact::HalfspaceProfile<double> limit{p.beta};
  for (std::size_t k = 0; k < p.s.size(); ++k)
    os << format_double(p.s[k]) << ',' << format_double(p.samples[k]) << ',' << format_double(limit.value(p.s[k]))
       << '\n';
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p += ".manifest.json";
  return p;
}

}  // namespace plate::io
