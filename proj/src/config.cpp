#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "m2m/config.hpp"
#include "m2m/error.hpp"

namespace m2m {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Entries {
 public:
  void add(const std::string& key, const std::string& value, int line) {
    if (values_.count(key)) fail(ErrorCategory::Config, "duplicate key '" + key + "' on line " + std::to_string(line));
    values_[key] = value;
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  template <class T>
  std::optional<T> number(const std::string& key) {
    auto raw = take(key);
    if (!raw) return std::nullopt;
    return parse<T>(key, *raw);
  }

  template <class T>
  std::vector<T> list(const std::string& key) {
    std::vector<T> out;
    auto raw = take(key);
    if (!raw) return out;
    std::stringstream ss(*raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse<T>(key, trim(item)));
    if (out.empty()) bad(key, *raw);
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    auto raw = take(key);
    if (!raw) return fallback;
    if (*raw == "true" || *raw == "1") return true;
    if (*raw == "false" || *raw == "0") return false;
    bad(key, *raw);
  }

  /// Keys beginning with `prefix`.
  std::vector<std::string> keys_with(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
  }

  void expect_consumed() const {
    if (!values_.empty()) fail(ErrorCategory::Config, "unknown key '" + values_.begin()->first + "'");
  }

  [[noreturn]] static void bad(const std::string& key, const std::string& raw) {
    fail(ErrorCategory::Config, "invalid value '" + raw + "' for key '" + key + "'");
  }

  template <class T>
  static T parse(const std::string& key, const std::string& raw) {
    T value{};
    const auto* end = raw.data() + raw.size();
    auto [ptr, ec] = std::from_chars(raw.data(), end, value);
    if (ec != std::errc() || ptr != end) bad(key, raw);
    return value;
  }

 private:
  std::map<std::string, std::string> values_;
};

CorrelationModel parse_model(Entries& e, const std::string& prefix) {
  const auto name = e.take(prefix + "model").value_or("unit");
  if (name == "unit") return UnitCorrelation{};
  if (name == "exp") {
    auto a = e.number<double>(prefix + "decay_per_m");
    if (!a) fail(ErrorCategory::Config, "missing key '" + prefix + "decay_per_m'");
    return ExpDecayCorrelation{*a};
  }
  if (name == "sqrt") {
    auto d = e.number<double>(prefix + "d_max_m");
    if (!d) fail(ErrorCategory::Config, "missing key '" + prefix + "d_max_m'");
    return SqrtCapCorrelation{*d};
  }
  Entries::bad(prefix + "model", name);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  Entries e;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      fail(ErrorCategory::Config, "line " + std::to_string(number) + ": expected 'key = value'");
    e.add(trim(content.substr(0, eq)), trim(content.substr(eq + 1)), number);
  }

  ExperimentConfig cfg;
  // Range checks raised while building the config are schema errors too.
  try {
    CellConfig& cell = cfg.cell;
    cell.n_stations = e.number<std::size_t>("n_stations").value_or(cell.n_stations);
    cell.radius_m = e.number<double>("radius_m").value_or(cell.radius_m);
    cell.geometry_seed = e.number<std::uint64_t>("geometry_seed").value_or(cell.geometry_seed);
    cell.traffic.lambda_p = e.number<double>("lambda_p_per_s").value_or(cell.traffic.lambda_p);
    cell.traffic.lambda_d = e.number<double>("lambda_d_per_s").value_or(cell.traffic.lambda_d);
    cell.p_h1 = e.number<double>("p_h1").value_or(cell.p_h1);
    cell.horizon_s = e.number<double>("horizon_s").value_or(cell.horizon_s);
    cell.bin_width_s = e.number<double>("bin_width_s").value_or(cell.bin_width_s);
    cell.deadlines.tau_a_s = e.number<double>("tau_a_s").value_or(cell.deadlines.tau_a_s);
    cell.deadlines.tau_d_s = e.number<double>("tau_d_s").value_or(cell.deadlines.tau_d_s);
    cell.deadlines.tau_p_s = e.number<double>("tau_p_s").value_or(cell.traffic.t_ri());

    ProtocolParams& p = cell.protocol;
    p.n = cell.n_stations;
    p.omega = e.number<std::size_t>("omega").value_or(p.omega);
    p.t_r_s = e.number<double>("t_r_s").value_or(p.t_r_s);
    p.rs_duration_s = e.number<double>("rs_duration_s").value_or(p.rs_duration_s);
    require(p.omega >= 1, "omega must be >= 1");
    const auto count = e.number<std::size_t>("delta_c_count");
    const auto pct = e.number<double>("delta_c_pct");
    if (count && pct) fail(ErrorCategory::Config, "give only one of 'delta_c_count' and 'delta_c_pct'");
    p.delta_c = count ? *count : delta_c_from_percent(pct.value_or(50.0), p.pool_size());
    const auto l1_frac = e.number<double>("l1_frac").value_or(0.6);
    const auto l2_frac = e.number<double>("l2_frac").value_or(0.4);
    p.l1 = e.number<std::size_t>("l1").value_or(frame_length_from_fraction(l1_frac, p.omega));
    p.l2 = e.number<std::size_t>("l2").value_or(frame_length_from_fraction(l2_frac, p.omega));

    if (auto mode = e.take("mode")) {
      if (*mode == "adaptive") cfg.mode = AccessMode::Adaptive;
      else if (*mode == "naive") cfg.mode = AccessMode::NaiveContentionFree;
      else Entries::bad("mode", *mode);
    }
    cfg.trace_pools = e.flag("trace_pools", false);

    // alarm.<i>.<field>
    std::map<std::size_t, bool> indices;
    for (const auto& key : e.keys_with("alarm.")) {
      const auto dot = key.find('.', 6);
      if (dot == std::string::npos) fail(ErrorCategory::Config, "unknown key '" + key + "'");
      indices[Entries::parse<std::size_t>(key, key.substr(6, dot - 6))] = true;
    }
    for (const auto& [index, unused] : indices) {
      const std::string prefix = "alarm." + std::to_string(index) + ".";
      AlarmScenario a;
      a.correlation = parse_model(e, prefix);
      a.speed_m_per_s = e.number<double>(prefix + "speed_m_per_s").value_or(a.speed_m_per_s);
      a.t_a_s = e.number<double>(prefix + "t_a_s").value_or(a.t_a_s);
      a.epicenter.x_m = e.number<double>(prefix + "epicenter_x_m").value_or(0.0);
      a.epicenter.y_m = e.number<double>(prefix + "epicenter_y_m").value_or(0.0);
      cell.alarms.push_back(a);
    }

    if (auto omegas = e.list<std::size_t>("sweep.omega"); !omegas.empty()) cfg.grid.omega_values = omegas;
    if (auto deltas = e.list<double>("sweep.delta_c_pct"); !deltas.empty()) cfg.grid.delta_c_pct = deltas;
    for (auto [key, slot] :
         {std::pair{"sweep.l1_frac", &cfg.grid.l1_frac}, std::pair{"sweep.l2_frac", &cfg.grid.l2_frac}}) {
      auto raw = e.take(key);
      if (!raw) continue;
      if (*raw == "search") *slot = std::nullopt;
      else *slot = Entries::parse<double>(key, *raw);
    }
    if (cfg.grid.l1_frac.has_value() != cfg.grid.l2_frac.has_value())
      fail(ErrorCategory::Config, "'sweep.l1_frac' and 'sweep.l2_frac' must both be numbers or both 'search'");
    if (auto ev = e.take("sweep.evaluation")) {
      if (*ev == "analytical") cfg.grid.evaluation = Evaluation::Analytical;
      else if (*ev == "simulated") cfg.grid.evaluation = Evaluation::Simulated;
      else Entries::bad("sweep.evaluation", *ev);
    }
    cfg.compare_omega = e.list<std::size_t>("compare.omega");
    if (cfg.compare_omega.empty())
      for (std::size_t o = 5; o <= 200; o += 5) cfg.compare_omega.push_back(o);
    cfg.compare_delta_c_pct = e.number<double>("compare.delta_c_pct").value_or(cfg.compare_delta_c_pct);

    e.expect_consumed();
    cell.validate();
  } catch (const Error& err) {
    if (err.category() == ErrorCategory::Config) throw;
    fail(ErrorCategory::Config, err.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::Io, "cannot open config '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace m2m
