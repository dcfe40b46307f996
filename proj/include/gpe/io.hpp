#pragma once

#include <array>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gpe/error.hpp"
#include "gpe/fibering.hpp"
#include "gpe/functionals.hpp"
#include "gpe/grid.hpp"
#include "gpe/solver.hpp"

namespace gpe {

// ---------------------------------------------------------------------------
// key=value configuration

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
T parse_number(std::string_view tok, int line, std::string_view key) {
  T v{};
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, "bad value '" + std::string(tok) + "' for key '" + std::string(key) + "'");
  }
  return v;
}

template <class T, std::size_t N>
std::array<T, N> parse_tuple(std::string_view value, int line, std::string_view key) {
  const auto toks = split_ws(value);
  if (toks.size() != N) {
    throw ParseError(line, "key '" + std::string(key) + "' expects " + std::to_string(N) +
                               " values");
  }
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = parse_number<T>(toks[i], line, key);
  return out;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/**
 * Parses `key=value` lines; `#` starts a comment. Unknown and repeated keys
 * are errors. Missing keys keep the SolverConfig defaults.
 */
inline SolverConfig parse_config(std::string_view text) {
  SolverConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (value.empty()) throw ParseError(line_no, "missing value for key '" + std::string(key) + "'");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ParseError(line_no, "duplicate key '" + std::string(key) + "' (first on line " +
                                    std::to_string(it->second) + ")");
    }
    seen.emplace(std::string(key), line_no);

    auto real = [&] { return detail::parse_number<double>(value, line_no, key); };
    if (key == "lambda1") {
      cfg.couplings.lambda1 = real();
    } else if (key == "lambda2") {
      cfg.couplings.lambda2 = real();
    } else if (key == "lambda3") {
      cfg.couplings.lambda3 = real();
    } else if (key == "mass") {
      cfg.couplings.mass_c = real();
    } else if (key == "grid_n") {
      cfg.grid.n = detail::parse_tuple<int, 3>(value, line_no, key);
    } else if (key == "box_l") {
      cfg.grid.l = detail::parse_tuple<double, 3>(value, line_no, key);
    } else if (key == "step_size") {
      cfg.step_size = real();
    } else if (key == "tol_residual") {
      cfg.tol_residual = real();
    } else if (key == "tol_virial") {
      cfg.tol_virial = real();
    } else if (key == "max_iters") {
      cfg.max_iters = detail::parse_number<int>(value, line_no, key);
    } else if (key == "seed") {
      cfg.seed = detail::parse_number<std::uint64_t>(value, line_no, key);
    } else if (key == "init_sigma") {
      cfg.init_sigma = real();
    } else if (key == "init_anisotropy") {
      cfg.init_anisotropy = real();
    } else if (key == "init_noise") {
      cfg.init_noise = real();
    } else if (key == "decay_tol") {
      cfg.decay_tolerance = real();
    } else if (key == "restarts") {
      cfg.restarts = detail::parse_number<int>(value, line_no, key);
    } else if (key == "gn_c1") {
      cfg.gn_c1 = real();
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  validate(cfg);
  return cfg;
}

inline std::string serialize_config(const SolverConfig& cfg) {
  using detail::format_real;
  std::ostringstream os;
  os << "lambda1=" << format_real(cfg.couplings.lambda1) << '\n'
     << "lambda2=" << format_real(cfg.couplings.lambda2) << '\n'
     << "lambda3=" << format_real(cfg.couplings.lambda3) << '\n'
     << "mass=" << format_real(cfg.couplings.mass_c) << '\n'
     << "grid_n=" << cfg.grid.n[0] << ' ' << cfg.grid.n[1] << ' ' << cfg.grid.n[2] << '\n'
     << "box_l=" << format_real(cfg.grid.l[0]) << ' ' << format_real(cfg.grid.l[1]) << ' '
     << format_real(cfg.grid.l[2]) << '\n'
     << "step_size=" << format_real(cfg.step_size) << '\n'
     << "tol_residual=" << format_real(cfg.tol_residual) << '\n'
     << "tol_virial=" << format_real(cfg.tol_virial) << '\n'
     << "max_iters=" << cfg.max_iters << '\n'
     << "seed=" << cfg.seed << '\n'
     << "init_sigma=" << format_real(cfg.init_sigma) << '\n'
     << "init_anisotropy=" << format_real(cfg.init_anisotropy) << '\n'
     << "init_noise=" << format_real(cfg.init_noise) << '\n'
     << "decay_tol=" << format_real(cfg.decay_tolerance) << '\n'
     << "restarts=" << cfg.restarts << '\n'
     << "gn_c1=" << format_real(cfg.gn_c1) << '\n';
  return os.str();
}

inline SolverConfig read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

// ---------------------------------------------------------------------------
// GPEF binary field format (all little-endian):
//   "GPEF" | u32 version = 1 | u32 n1 n2 n3 | f64 l1 l2 l3 | (f64 re, f64 im) * n1 n2 n3
// with x3 varying fastest.

inline constexpr std::uint32_t kFieldFormatVersion = 1;
inline constexpr std::size_t kFieldHeaderBytes = 4 + 4 + 3 * 4 + 3 * 8;
// Refuse headers that would need more than 2^33 samples (128 GiB).
inline constexpr std::uint64_t kMaxFieldSamples = std::uint64_t{1} << 33;

namespace detail {

template <class U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <class U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

inline void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

}  // namespace detail

inline std::string encode_field(const Field& f) {
  const GridSpec& g = f.grid();
  std::string out;
  out.reserve(kFieldHeaderBytes + 16 * f.size());
  out.append("GPEF", 4);
  detail::put_le<std::uint32_t>(out, kFieldFormatVersion);
  for (int n : g.n) detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  for (double l : g.l) detail::put_f64(out, l);
  for (const auto& v : f.values()) {
    detail::put_f64(out, v.real());
    detail::put_f64(out, v.imag());
  }
  return out;
}

inline Field decode_field(std::string_view bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 4 || std::memcmp(p, "GPEF", 4) != 0) throw BadMagic("field file: bad magic");
  if (bytes.size() < kFieldHeaderBytes) throw TruncatedFile("field file: truncated header");
  const auto version = detail::get_le<std::uint32_t>(p + 4);
  if (version != kFieldFormatVersion) {
    throw VersionMismatch("field file: version " + std::to_string(version) + ", expected " +
                          std::to_string(kFieldFormatVersion));
  }
  std::array<std::uint32_t, 3> n{};
  std::uint64_t total = 1;
  for (int a = 0; a < 3; ++a) {
    n[a] = detail::get_le<std::uint32_t>(p + 8 + 4 * a);
    if (n[a] > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
      throw DimensionOverflow("field file: dimension exceeds int range");
    }
    total *= n[a];
    if (total > kMaxFieldSamples) throw DimensionOverflow("field file: too many samples");
  }
  std::array<double, 3> l{};
  for (int a = 0; a < 3; ++a) l[a] = detail::get_f64(p + 20 + 8 * a);
  const GridSpec g = make_grid({static_cast<int>(n[0]), static_cast<int>(n[1]), static_cast<int>(n[2])},
                               l);
  const std::uint64_t payload = 16 * total;
  if (bytes.size() - kFieldHeaderBytes < payload) throw TruncatedFile("field file: truncated payload");
  if (bytes.size() - kFieldHeaderBytes > payload) throw IoError("field file: trailing bytes");
  Field f(g);
  const unsigned char* q = p + kFieldHeaderBytes;
  for (auto& v : f.values()) {
    v = complex(detail::get_f64(q), detail::get_f64(q + 8));
    q += 16;
  }
  return f;
}

inline void write_field(const Field& f, const std::string& path) {
  const std::string bytes = encode_field(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return decode_field(os.str());
}

// ---------------------------------------------------------------------------
// JSON reports

namespace detail {

// NaN and infinities have no JSON number form; they travel as strings.
inline nlohmann::json real_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ValidationError("report: bad number '" + s + "'");
  }
  return j.get<double>();
}

inline bool close_rel(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

/// Checks that E, Q and beta agree with A, B, C, D.
inline void validate_diagnostics(const Diagnostics& d) {
  constexpr double tol = 1e-12;
  const double beta = d.D > 0.0 ? -(0.5 * d.A + d.B + d.C) / d.D
                                : std::numeric_limits<double>::quiet_NaN();
  if (!detail::close_rel(d.E, energy_from(d.A, d.B, d.C), tol) ||
      !detail::close_rel(d.Q, virial_from(d.A, d.B, d.C), tol) ||
      !detail::close_rel(d.beta, beta, tol)) {
    throw ValidationError("diagnostics violate E/Q/beta identities");
  }
}

inline nlohmann::json to_json(const Diagnostics& d) {
  using detail::real_json;
  return {{"A", real_json(d.A)}, {"B", real_json(d.B)}, {"C", real_json(d.C)},
          {"D", real_json(d.D)}, {"E", real_json(d.E)}, {"Q", real_json(d.Q)},
          {"beta", real_json(d.beta)}};
}

inline Diagnostics diagnostics_from_json(const nlohmann::json& j) {
  using detail::real_from_json;
  Diagnostics d;
  d.A = real_from_json(j.at("A"));
  d.B = real_from_json(j.at("B"));
  d.C = real_from_json(j.at("C"));
  d.D = real_from_json(j.at("D"));
  d.E = real_from_json(j.at("E"));
  d.Q = real_from_json(j.at("Q"));
  d.beta = real_from_json(j.at("beta"));
  return d;
}

inline nlohmann::json to_json(const VerificationReport& r) {
  using detail::real_json;
  return {{"min_abs", real_json(r.min_abs)},
          {"min_gauge_real", real_json(r.min_gauge_real)},
          {"positive", r.positive},
          {"phase_std", real_json(r.phase_std)},
          {"phase_constant", r.phase_constant},
          {"virial_ratio", real_json(r.virial_ratio)},
          {"virial_ok", r.virial_ok},
          {"curvature", real_json(r.curvature)},
          {"saddle_ok", r.saddle_ok},
          {"eq1_residual", real_json(r.eq1_residual)},
          {"eq12_residual", real_json(r.eq12_residual)},
          {"eq22_residual", real_json(r.eq22_residual)},
          {"pohozaev_ok", r.pohozaev_ok},
          {"beta", real_json(r.beta)},
          {"beta_positive", r.beta_positive},
          {"beta_expected_positive", r.beta_expected_positive},
          {"radial_moment", real_json(r.radial_moment)},
          {"axial_moment", real_json(r.axial_moment)},
          {"gn_ratio", real_json(r.gn_ratio)},
          {"gn_consistent", r.gn_consistent},
          {"residual", real_json(r.residual)},
          {"residual_weighted", real_json(r.residual_weighted)},
          {"all_passed", r.all_passed()},
          {"diagnostics", to_json(r.diagnostics)}};
}

struct RunReport {
  Diagnostics diagnostics;
  double gamma = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::optional<VerificationReport> verify;
  SolverConfig config;
};

inline RunReport make_run_report(const SolverResult& res, const SolverConfig& cfg,
                                 std::optional<VerificationReport> verify = std::nullopt) {
  return {res.diagnostics, res.gamma, res.converged, res.iterations, res.residual,
          std::move(verify), cfg};
}

inline nlohmann::json to_json(const RunReport& r) {
  validate_diagnostics(r.diagnostics);
  if (r.verify) validate_diagnostics(r.verify->diagnostics);
  using detail::real_json;
  nlohmann::json j = {{"diagnostics", to_json(r.diagnostics)},
                      {"gamma", real_json(r.gamma)},
                      {"converged", r.converged},
                      {"iterations", r.iterations},
                      {"residual", real_json(r.residual)},
                      {"config_echo", serialize_config(r.config)}};
  j["verify"] = r.verify ? to_json(*r.verify) : nlohmann::json(nullptr);
  return j;
}

/// Reads back the scalar part of a report (verification flags are not restored).
inline RunReport run_report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.diagnostics = diagnostics_from_json(j.at("diagnostics"));
  r.gamma = detail::real_from_json(j.at("gamma"));
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.residual = detail::real_from_json(j.at("residual"));
  r.config = parse_config(j.at("config_echo").get<std::string>());
  return r;
}

// ---------------------------------------------------------------------------
// Delimited text tables

inline std::string history_table(const std::vector<IterationRecord>& history) {
  std::ostringstream os;
  os << "iteration,E,Q,residual,beta,step,fiber_max\n";
  for (const auto& h : history) {
    os << h.iteration << ',' << detail::format_real(h.E) << ',' << detail::format_real(h.Q) << ','
       << detail::format_real(h.residual) << ',' << detail::format_real(h.beta) << ','
       << detail::format_real(h.step) << ',' << detail::format_real(h.fiber_max) << '\n';
  }
  return os.str();
}

inline std::string fiber_table(const std::vector<FiberSample>& samples) {
  std::ostringstream os;
  os << "t,E,Q\n";
  for (const auto& s : samples) {
    os << detail::format_real(s.t) << ',' << detail::format_real(s.E) << ','
       << detail::format_real(s.Q) << '\n';
  }
  return os.str();
}

}  // namespace gpe
