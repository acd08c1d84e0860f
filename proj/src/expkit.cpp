#include "nscyl/expkit.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nscyl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double d = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(d))
    fail(ErrorCode::invalid_argument, "key '" + key + "': '" + v + "' is not a finite number");
  return d;
}

long long parse_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const long long n = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    fail(ErrorCode::invalid_argument, "key '" + key + "': '" + v + "' is not an integer");
  return n;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + fmt(v[k]);
  return s;
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, "key '" + key + "' out of range: " + what);
}

void check_increasing(const std::vector<double>& v, const std::string& key) {
  for (std::size_t k = 1; k < v.size(); ++k) check(v[k] > v[k - 1], key, "must be strictly increasing");
}

void validate(const RunConfig& c) {
  check(c.nx >= 8 && c.nx % 2 == 0, "nx", "even and >= 8");
  check(c.ny >= 8 && c.ny % 2 == 0, "ny", "even and >= 8");
  check(c.lambda > 0, "lambda", "> 0");
  check(c.t_end >= 0, "t_end", ">= 0");
  check(c.dt_acc > 0, "dt_acc", "> 0");
  check(c.safety > 0 && c.safety <= 1, "safety", "in (0, 1]");
  check(c.diag_dt > 0, "diag_dt", "> 0");
  check_increasing(c.diag_times, "diag_times");
  for (double t : c.diag_times) check(t > 0 && t <= c.t_end, "diag_times", "in (0, t_end]");
  check(!c.target_Ru || *c.target_Ru >= 0, "target_Ru", ">= 0");
  check(!c.target_Romega || *c.target_Romega >= 0, "target_Romega", ">= 0");
  check(c.band >= 1, "band", ">= 1");
  check(!c.rho_list.empty(), "rho_list", "non-empty");
  for (double r : c.rho_list) check(r > 0, "rho_list", "entries > 0");
  if (c.fit_t_lo && c.fit_t_hi) check(*c.fit_t_lo < *c.fit_t_hi, "fit_t_hi", "> fit_t_lo");
  check(c.laminar_t_lo < c.laminar_t_hi, "laminar_t_hi", "> laminar_t_lo");
  check(c.envelope_lambda > 0 && c.envelope_lambda < 1, "envelope_lambda", "in (0, 1)");
  check(c.probe_dt > 0, "probe_dt", "> 0");
  check(c.tau > 0, "tau", "> 0");
  check_increasing(c.T_list, "T_list");
  for (double T : c.T_list) check(T > 0, "T_list", "entries > 0");
  check(!c.nu || *c.nu > 0, "nu", "> 0");
  check(!c.L_phys || *c.L_phys > 0, "L_phys", "> 0");
  check(!c.rho_density || *c.rho_density > 0, "rho_density", "> 0");
  check(!c.csv_path.empty(), "csv_path", "non-empty");
  check(!c.ledger_path.empty(), "ledger_path", "non-empty");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto d = [](double RunConfig::*m) {
    return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_double(k, v); });
  };
  auto od = [](std::optional<double> RunConfig::*m) {
    return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_double(k, v); });
  };
  auto l = [](std::vector<double> RunConfig::*m) {
    return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_list(k, v); });
  };
  auto s = [](std::string RunConfig::*m) {
    return Setter([m](RunConfig& c, const std::string&, const std::string& v) { c.*m = trim(v); });
  };
  auto i = [](int RunConfig::*m) {
    return Setter([m](RunConfig& c, const std::string& k, const std::string& v) {
      const long long n = parse_int(k, v);
      check(n >= -1000000000LL && n <= 1000000000LL, k, "integer too large");
      c.*m = static_cast<int>(n);
    });
  };
  static const std::map<std::string, Setter> table = {
      {"nx", i(&RunConfig::nx)},
      {"ny", i(&RunConfig::ny)},
      {"lambda", d(&RunConfig::lambda)},
      {"t_end", d(&RunConfig::t_end)},
      {"dt_acc", d(&RunConfig::dt_acc)},
      {"safety", d(&RunConfig::safety)},
      {"diag_dt", d(&RunConfig::diag_dt)},
      {"diag_times", l(&RunConfig::diag_times)},
      {"init_kind",
       [](RunConfig& c, const std::string&, const std::string& v) { c.init_kind = init_kind_from_string(trim(v)); }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long long n = parse_int(k, v);
         check(n >= 0, k, ">= 0");
         c.seed = static_cast<std::uint64_t>(n);
       }},
      {"target_Ru", od(&RunConfig::target_Ru)},
      {"target_Romega", od(&RunConfig::target_Romega)},
      {"band", i(&RunConfig::band)},
      {"c", d(&RunConfig::c)},
      {"rho_list", l(&RunConfig::rho_list)},
      {"center", od(&RunConfig::center)},
      {"fit_t_lo", od(&RunConfig::fit_t_lo)},
      {"fit_t_hi", od(&RunConfig::fit_t_hi)},
      {"laminar_t_lo", d(&RunConfig::laminar_t_lo)},
      {"laminar_t_hi", d(&RunConfig::laminar_t_hi)},
      {"envelope_lambda", d(&RunConfig::envelope_lambda)},
      {"probe_dt", d(&RunConfig::probe_dt)},
      {"tau", d(&RunConfig::tau)},
      {"T_list", l(&RunConfig::T_list)},
      {"nu", od(&RunConfig::nu)},
      {"L_phys", od(&RunConfig::L_phys)},
      {"rho_density", od(&RunConfig::rho_density)},
      {"csv_path", s(&RunConfig::csv_path)},
      {"snapshot_prefix", s(&RunConfig::snapshot_prefix)},
      {"ledger_path", s(&RunConfig::ledger_path)},
  };
  return table;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> parse_pairs(const std::string& text, const std::string& where) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::invalid_argument, where + " line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      fail(ErrorCode::invalid_argument, where + " line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, line.substr(eq + 1)).second)
      fail(ErrorCode::invalid_argument, "duplicate key '" + key + "'");
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const auto pairs = parse_pairs(text, "config");
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [k, v] : pairs) {
    const auto it = table.find(k);
    if (it == table.end()) fail(ErrorCode::invalid_argument, "unknown key '" + k + "'");
    it->second(cfg, k, v);
  }
  if (!pairs.count("init_kind")) fail(ErrorCode::invalid_argument, "missing required key 'init_kind'");
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  try {
    return parse_config(read_text(path));
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  auto put = [&](const char* k, const std::string& v) { o << k << " = " << v << "\n"; };
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) put(k, fmt(*v));
  };
  put("nx", std::to_string(c.nx));
  put("ny", std::to_string(c.ny));
  put("lambda", fmt(c.lambda));
  put("t_end", fmt(c.t_end));
  put("dt_acc", fmt(c.dt_acc));
  put("safety", fmt(c.safety));
  put("diag_dt", fmt(c.diag_dt));
  put("diag_times", join(c.diag_times));
  put("init_kind", to_string(c.init_kind));
  put("seed", std::to_string(c.seed));
  opt("target_Ru", c.target_Ru);
  opt("target_Romega", c.target_Romega);
  put("band", std::to_string(c.band));
  put("c", fmt(c.c));
  put("rho_list", join(c.rho_list));
  opt("center", c.center);
  opt("fit_t_lo", c.fit_t_lo);
  opt("fit_t_hi", c.fit_t_hi);
  put("laminar_t_lo", fmt(c.laminar_t_lo));
  put("laminar_t_hi", fmt(c.laminar_t_hi));
  put("envelope_lambda", fmt(c.envelope_lambda));
  put("probe_dt", fmt(c.probe_dt));
  put("tau", fmt(c.tau));
  put("T_list", join(c.T_list));
  opt("nu", c.nu);
  opt("L_phys", c.L_phys);
  opt("rho_density", c.rho_density);
  put("csv_path", c.csv_path);
  put("snapshot_prefix", c.snapshot_prefix);
  put("ledger_path", c.ledger_path);
  return o.str();
}

std::vector<double> diag_schedule(const RunConfig& cfg) {
  if (!cfg.diag_times.empty()) return cfg.diag_times;
  std::vector<double> out;
  const long n = static_cast<long>(std::floor(cfg.t_end / cfg.diag_dt + 1e-9));
  for (long k = 1; k <= n; ++k) out.push_back(std::min(k * cfg.diag_dt, cfg.t_end));
  if (!out.empty() && out.back() < cfg.t_end - 1e-12 * std::max(1.0, cfg.t_end)) out.push_back(cfg.t_end);
  if (out.empty() && cfg.t_end > 0) out.push_back(cfg.t_end);
  return out;
}

Grid grid_of(const RunConfig& cfg) { return Grid(cfg.nx, cfg.ny, cfg.lambda); }

InitialDataSpec initial_data_of(const RunConfig& cfg) {
  InitialDataSpec s;
  s.kind = cfg.init_kind;
  s.seed = cfg.seed;
  s.target_Ru = cfg.target_Ru;
  s.target_Romega = cfg.target_Romega;
  s.band = cfg.band;
  s.c = cfg.c;
  return s;
}

Dimensionless nondimensionalize(double u_phys, double omega_phys, double nu, double L) {
  if (!(nu > 0.0) || !(L > 0.0)) fail(ErrorCode::invalid_argument, "nu and L must be positive");
  return {L * u_phys / nu, L * L * omega_phys / nu, L * L / nu};
}

PhysicalScales dimensionalize(double R_u, double R_omega, double nu, double L) {
  if (!(nu > 0.0) || !(L > 0.0)) fail(ErrorCode::invalid_argument, "nu and L must be positive");
  return {R_u * nu / L, R_omega * nu / (L * L), L * L / nu};
}

const std::vector<std::string> kCsvColumns = {
    "t",       "sup_u",    "sup_omega", "sup_uhat",        "E_rho",              "D_rho",
    "Ens_rho", "EnsD_rho", "ul2_uhat",  "residual_energy", "residual_enstrophy", "residual_oscillatory"};

namespace {

std::vector<double DiagnosticsRecord::*> csv_members() {
  return {&DiagnosticsRecord::t,        &DiagnosticsRecord::sup_u,
          &DiagnosticsRecord::sup_omega, &DiagnosticsRecord::sup_uhat,
          &DiagnosticsRecord::E_rho,    &DiagnosticsRecord::D_rho,
          &DiagnosticsRecord::Ens_rho,  &DiagnosticsRecord::EnsD_rho,
          &DiagnosticsRecord::ul2_uhat, &DiagnosticsRecord::residual_energy,
          &DiagnosticsRecord::residual_enstrophy, &DiagnosticsRecord::residual_oscillatory};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_csv_records(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  for (std::size_t k = 0; k < kCsvColumns.size(); ++k) out << (k ? "," : "") << kCsvColumns[k];
  out << "\n";
  const auto members = csv_members();
  for (const auto& r : records) {
    for (std::size_t k = 0; k < members.size(); ++k) out << (k ? "," : "") << fmt(r.*members[k]);
    out << "\n";
  }
  if (!out) fail(ErrorCode::io, "write failed for '" + path + "'");
}

std::vector<DiagnosticsRecord> read_csv_records(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::io, path + ": empty file, missing header");
  const auto header = split_csv(trim(line));
  for (std::size_t k = 0; k < kCsvColumns.size(); ++k) {
    if (k >= header.size())
      fail(ErrorCode::io, path + ": column " + std::to_string(k + 1) + " missing, expected '" +
                              kCsvColumns[k] + "'");
    if (header[k] != kCsvColumns[k])
      fail(ErrorCode::io, path + ": column " + std::to_string(k + 1) + " is '" + header[k] +
                              "', expected '" + kCsvColumns[k] + "'");
  }
  if (header.size() > kCsvColumns.size())
    fail(ErrorCode::io, path + ": unexpected extra column '" + header[kCsvColumns.size()] + "'");
  const auto members = csv_members();
  std::vector<DiagnosticsRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(trim(line));
    if (cells.size() != members.size())
      fail(ErrorCode::io, path + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                              " cells, expected " + std::to_string(members.size()));
    DiagnosticsRecord r;
    for (std::size_t k = 0; k < members.size(); ++k) {
      char* end = nullptr;
      const double v = std::strtod(cells[k].c_str(), &end);
      if (cells[k].empty() || end != cells[k].c_str() + cells[k].size())
        fail(ErrorCode::io, path + ": row " + std::to_string(row) + " column '" + kCsvColumns[k] +
                                "' is not a number");
      r.*members[k] = v;
    }
    out.push_back(r);
  }
  return out;
}

namespace {

void write_doubles(const std::string& path, const std::vector<double>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  for (double v : data) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) fail(ErrorCode::io, "write failed for '" + path + "'");
}

std::vector<double> read_doubles(const std::string& path) {
  const std::string raw = read_text(path);
  if (raw.size() % 8 != 0) fail(ErrorCode::io, path + ": size is not a multiple of 8 bytes");
  std::vector<double> out(raw.size() / 8);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[8 * k + b])) << (8 * b);
    out[k] = std::bit_cast<double>(bits);
  }
  return out;
}

void write_meta(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path + ".meta", std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + ".meta'");
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  if (!out) fail(ErrorCode::io, "write failed for '" + path + ".meta'");
}

std::string meta_get(const std::map<std::string, std::string>& m, const std::string& key,
                     const std::string& path) {
  const auto it = m.find(key);
  if (it == m.end()) fail(ErrorCode::io, path + ".meta: missing key '" + key + "'");
  return trim(it->second);
}

std::vector<std::pair<std::string, std::string>> field_meta(const ScalarField& f, double t) {
  const Grid& g = f.grid();
  return {{"nx", std::to_string(g.nx())},
          {"ny", std::to_string(g.ny())},
          {"lambda", fmt(g.lambda())},
          {"repr", !f.is_physical() ? "spectral" : "physical"},
          {"time", fmt(t)}};
}

}  // namespace

void write_field(const ScalarField& f, const std::string& path, double t) {
  std::vector<double> data;
  if (!f.is_physical()) {
    for (const Complex& c : f.coeffs()) {
      data.push_back(c.real());
      data.push_back(c.imag());
    }
  } else {
    data.assign(f.values().begin(), f.values().end());
  }
  write_doubles(path, data);
  write_meta(path, field_meta(f, t));
}

namespace {

ScalarField read_field_with_meta(const std::string& path, std::map<std::string, std::string>& meta) {
  meta = parse_pairs(read_text(path + ".meta"), path + ".meta");
  const int nx = static_cast<int>(parse_int("nx", meta_get(meta, "nx", path)));
  const int ny = static_cast<int>(parse_int("ny", meta_get(meta, "ny", path)));
  const double lambda = parse_double("lambda", meta_get(meta, "lambda", path));
  const std::string repr = meta_get(meta, "repr", path);
  const Grid g(nx, ny, lambda);
  const auto data = read_doubles(path);
  if (repr == "spectral") {
    if (data.size() != 2 * g.spectral_size())
      fail(ErrorCode::io, path + ": data size does not match the sidecar grid");
    ScalarField f = ScalarField::spectral(g);
    auto c = f.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = Complex(data[2 * k], data[2 * k + 1]);
    return f;
  }
  if (repr == "physical") {
    if (data.size() != g.physical_size())
      fail(ErrorCode::io, path + ": data size does not match the sidecar grid");
    ScalarField f = ScalarField::physical(g);
    std::copy(data.begin(), data.end(), f.values().begin());
    return f;
  }
  fail(ErrorCode::io, path + ".meta: unknown repr '" + repr + "'");
}

}  // namespace

ScalarField read_field(const std::string& path, double* t) {
  std::map<std::string, std::string> meta;
  ScalarField f = read_field_with_meta(path, meta);
  if (t) *t = parse_double("time", meta_get(meta, "time", path));
  return f;
}

void write_state(const FlowState& s, const std::string& path) {
  const ScalarField w = as_spectral(s.omega);
  write_field(w, path, s.t);
  auto meta = field_meta(w, s.t);
  meta.emplace_back("c", fmt(s.c));
  meta.emplace_back("m_mean", fmt(s.m_mean));
  meta.emplace_back("m0_norm", fmt(s.m0_norm));
  write_meta(path, meta);
}

FlowState read_state(const std::string& path) {
  std::map<std::string, std::string> meta;
  ScalarField w = as_spectral(read_field_with_meta(path, meta));
  return FlowState{parse_double("time", meta_get(meta, "time", path)), std::move(w),
                   parse_double("c", meta_get(meta, "c", path)),
                   parse_double("m_mean", meta_get(meta, "m_mean", path)),
                   parse_double("m0_norm", meta_get(meta, "m0_norm", path))};
}

std::string today_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

ConstantsLedger ConstantsLedger::load(const std::string& path) {
  ConstantsLedger L;
  std::ifstream in(path);
  if (!in) return L;
  nlohmann::json j;
  try {
    in >> j;
    for (const auto& [name, v] : j.at("constants").items()) {
      EstimatedConstant c;
      c.name = name;
      c.value = v.at("value").get<double>();
      c.grid = v.value("grid", "");
      c.lambda = v.value("lambda", 0.0);
      c.seeds = v.value("seeds", std::vector<std::uint64_t>{});
      c.date = v.value("date", "");
      L.entries_[name] = c;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, path + ": malformed constants ledger: " + e.what());
  }
  return L;
}

void ConstantsLedger::save(const std::string& path) const {
  nlohmann::json j;
  j["constants"] = nlohmann::json::object();
  for (const auto& [name, c] : entries_)
    j["constants"][name] = {{"value", c.value}, {"grid", c.grid}, {"lambda", c.lambda},
                            {"seeds", c.seeds}, {"date", c.date}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) fail(ErrorCode::io, "write failed for '" + path + "'");
}

void ConstantsLedger::set(EstimatedConstant c) {
  require(!c.name.empty(), "constant needs a name");
  if (!std::isfinite(c.value) || !(c.value > 0.0))
    fail(ErrorCode::invalid_argument, "constant '" + c.name + "' must be finite and positive");
  if (c.date.empty()) c.date = today_utc();
  entries_[c.name] = std::move(c);
}

std::optional<EstimatedConstant> ConstantsLedger::get(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string rho_csv_path(const std::string& base, std::size_t k) {
  if (k == 0) return base;
  const auto dot = base.rfind('.');
  const auto slash = base.rfind('/');
  const std::string suffix = "_rho" + std::to_string(k);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return base + suffix;
  return base.substr(0, dot) + suffix + base.substr(dot);
}

void worst_of(PointwiseSlack& w, const PointwiseSlack& s) {
  w.de_sq_vs_2ed = std::max(w.de_sq_vs_2ed, s.de_sq_vs_2ed);
  w.eps_vs_d = std::max(w.eps_vs_d, s.eps_vs_d);
  w.ehat_vs_dhat = std::max(w.ehat_vs_dhat, s.ehat_vs_dhat);
  w.ghat_vs_kappa_dhat = std::max(w.ghat_vs_kappa_dhat, s.ghat_vs_kappa_dhat);
}

}  // namespace

SimulationSummary run_simulation(const RunConfig& cfg) {
  const Grid g = grid_of(cfg);
  const FlowState s0 = make_initial_data(initial_data_of(cfg), g);
  const double center = cfg.center.value_or(argmax_x1(energy_profiles(s0).e));

  SimulationSummary sum;
  const auto ledger = ConstantsLedger::load(cfg.ledger_path);
  if (const auto c3 = ledger.get("C3")) {
    sum.C3_used = c3->value;
    sum.C3_from_ledger = true;
  }

  std::vector<std::vector<DiagnosticsRecord>> rows(cfg.rho_list.size());
  std::vector<DiagSnapshot> traj;
  PointwiseSlack worst{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  int snap_index = 0;
  auto record = [&](const FlowState& s) {
    for (std::size_t k = 0; k < cfg.rho_list.size(); ++k) {
      rows[k].push_back(make_record(s, cfg.rho_list[k], center, cfg.probe_dt));
      const auto& r = rows[k].back();
      sum.max_residual_energy = std::max(sum.max_residual_energy, r.residual_energy);
      sum.max_residual_enstrophy = std::max(sum.max_residual_enstrophy, r.residual_enstrophy);
      sum.max_residual_oscillatory = std::max(sum.max_residual_oscillatory, r.residual_oscillatory);
    }
    traj.push_back(snapshot_diagnostics(s));
    worst_of(worst, pointwise_slack(traj.back()));
    if (!cfg.snapshot_prefix.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "_%06d.bin", snap_index);
      write_state(s, cfg.snapshot_prefix + name);
    }
    ++snap_index;
  };

  const double w0 = s0.m0_norm;
  record(s0);
  RunOptions opt;
  opt.safety = cfg.safety;
  opt.dt_acc = cfg.dt_acc;
  const FlowState fin = run(s0, cfg.t_end, diag_schedule(cfg), record, opt,
                            [&](const FlowState& a, const FlowState& b) {
                              ++sum.steps;
                              if (sup_norm(to_physical(b.omega)) > sup_norm(to_physical(a.omega)) + 1e-8 * w0)
                                ++sum.max_principle_violations;
                              if (total_energy(b) > total_energy(a) * (1 + 1e-14) + 1e-300)
                                ++sum.energy_violations;
                              sum.max_m_mean_drift =
                                  std::max(sum.max_m_mean_drift, std::abs(b.m_mean - s0.m_mean));
                            });
  sum.t_final = fin.t;
  sum.records = static_cast<int>(traj.size());
  sum.worst_slack = worst;

  for (std::size_t k = 0; k < rows.size(); ++k) write_csv_records(rows[k], rho_csv_path(cfg.csv_path, k));

  TheoremConfig tc;
  tc.C3 = sum.C3_used;
  tc.T_list = cfg.T_list;
  tc.center = cfg.center;
  if (cfg.fit_t_lo) tc.decay_t_lo = *cfg.fit_t_lo;
  tc.decay_t_hi = cfg.fit_t_hi;
  tc.laminar_t_lo = cfg.laminar_t_lo;
  tc.laminar_t_hi = cfg.laminar_t_hi;
  tc.tau = cfg.tau;
  sum.theorem = theorem_checks(traj, cfg.lambda, tc);
  sum.flux = flux_bound_constants(traj, "nx=" + std::to_string(cfg.nx) + " ny=" + std::to_string(cfg.ny) +
                                            " lambda=" + fmt(cfg.lambda) + " seed=" + std::to_string(cfg.seed));
  const double slack = std::max({worst.de_sq_vs_2ed, worst.eps_vs_d, worst.ehat_vs_dhat, worst.ghat_vs_kappa_dhat});
  sum.invariants_pass = sum.max_principle_violations == 0 && sum.energy_violations == 0 &&
                        sum.max_m_mean_drift <= 1e-12 && slack <= 1e-8;
  return sum;
}

std::string make_report(const std::string& csv_path, const std::string& ledger_path, double lambda) {
  const auto rows = read_csv_records(csv_path);
  nlohmann::json j;
  j["csv"] = csv_path;
  j["rows"] = rows.size();
  double re = 0, rz = 0, ro = 0;
  for (const auto& r : rows) {
    re = std::max(re, r.residual_energy);
    rz = std::max(rz, r.residual_enstrophy);
    ro = std::max(ro, r.residual_oscillatory);
  }
  j["max_residual_energy"] = re;
  j["max_residual_enstrophy"] = rz;
  j["max_residual_oscillatory"] = ro;
  auto fit_json = [&](std::vector<std::pair<double, double>> series, double lo, double hi, RateModel m) {
    nlohmann::json f;
    f["window"] = {lo, hi};
    try {
      const auto r = fit_decay_rate(series, lo, hi, m);
      f["model"] = m == RateModel::power ? "power" : "exponential";
      f[m == RateModel::power ? "exponent" : "rate"] = r.exponent_or_rate;
      f["samples"] = r.samples;
      f["rms_log_residual"] = r.rms_log_residual;
    } catch (const Error& e) {
      f["skipped"] = e.what();
    }
    return f;
  };
  std::vector<std::pair<double, double>> sw, uh;
  for (const auto& r : rows) {
    sw.emplace_back(r.t, r.sup_omega);
    uh.emplace_back(r.t, r.ul2_uhat);
  }
  const double hi = 0.1 * (lambda / kTwoPi) * (lambda / kTwoPi);
  j["sup_omega_power_fit"] = fit_json(sw, 1.0, std::max(hi, 1.0 + 1e-9), RateModel::power);
  j["ul2_uhat_exponential_fit"] = fit_json(uh, 0.05, 0.5, RateModel::exponential);
  nlohmann::json consts = nlohmann::json::object();
  const auto ledger = ConstantsLedger::load(ledger_path);
  for (const auto& [name, c] : ledger.entries())
    consts[name] = {{"value", c.value}, {"grid", c.grid}, {"lambda", c.lambda}, {"seeds", c.seeds}, {"date", c.date}};
  j["constants"] = consts;
  return j.dump(2);
}

}  // namespace nscyl
