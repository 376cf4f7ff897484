#include "cht/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cht {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"model",
       {"R", "gamma", "alpha", "ubar", "T", "L1", "L2", "L3", "case", "tie_tolerance", "H0", "H1",
        "H2", "profile", "profile_min"}},
      {"simulate",
       {"dt", "scheme", "model", "grid", "dealias", "stabilization", "diffusive_stabilization",
        "t_end", "record_every", "steady_tol", "init", "amplitude", "band", "modes", "snapshots"}},
      {"reduce", {"y0", "dt", "t_end", "record_every", "sigma_at"}},
      {"sweep", {"epsilons", "temperatures", "threads"}},
      {"validate", {"y0", "horizon", "dt"}},
      {"output", {"dir", "seed"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, int line, const std::string& key) {
  if (s.empty()) throw ConfigError("empty value for '" + key + "'", line);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("'" + key + "' expects a number, got '" + s + "'", line);
  return v;
}

long to_long(const std::string& s, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("'" + key + "' expects an integer, got '" + s + "'", line);
  return v;
}

bool to_bool(const std::string& s, int line, const std::string& key) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + s + "'", line);
}

std::vector<double> to_list(const std::string& s, int line, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item, line, key));
  return out;
}

class Reader {
public:
  Reader(const std::map<std::string, Section>& sections, const std::map<std::string, int>& headers)
      : sections_(sections), headers_(headers) {}

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  const Entry& require(const std::string& sec, const std::string& key) const {
    if (const Entry* e = find(sec, key)) return *e;
    auto h = headers_.find(sec);
    throw ConfigError("missing required key '" + key + "' in [" + sec + "]",
                      h == headers_.end() ? 0 : h->second);
  }

  double number(const std::string& sec, const std::string& key) const {
    const Entry& e = require(sec, key);
    return to_double(e.value, e.line, key);
  }

  template <class F>
  void with(const std::string& sec, const std::string& key, F&& f) const {
    if (const Entry* e = find(sec, key)) {
      try {
        f(*e);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& ex) {
        throw ConfigError("'" + key + "': " + ex.what(), e->line);
      }
    }
  }

private:
  const std::map<std::string, Section>& sections_;
  const std::map<std::string, int>& headers_;
};

ModeIndex parse_mode(const std::string& s, int line) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw ConfigError("mode index needs three integers: '" + s + "'", line);
  ModeIndex K;
  for (int a = 0; a < 3; ++a) {
    const long v = to_long(parts[a], line, "modes");
    if (v < 0) throw ConfigError("mode indices are non-negative", line);
    K.k[a] = static_cast<int>(v);
  }
  return K;
}

}  // namespace

MobilityProfile parse_profile(const std::string& spec, double lower_bound) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ModelError("profile must start with 'poly:' or 'table:'");
  const std::string kind = trim(spec.substr(0, colon));
  const std::string body = spec.substr(colon + 1);
  if (kind == "poly") {
    std::vector<double> c;
    for (const auto& item : split(body, ',')) c.push_back(to_double(item, 0, "profile"));
    return MobilityProfile::polynomial(std::move(c), lower_bound);
  }
  if (kind == "table") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& item : split(body, ',')) {
      const auto pair = split(item, ':');
      if (pair.size() != 2) throw ModelError("table entries are 's:h', got '" + item + "'");
      samples.emplace_back(to_double(pair[0], 0, "profile"), to_double(pair[1], 0, "profile"));
    }
    return MobilityProfile::table(std::move(samples), lower_bound);
  }
  throw ModelError("unknown profile kind '" + kind + "'");
}

double RunConfig::temperature() const {
  if (!T) throw ConfigError("missing required key 'T' in [model]");
  return *T;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Section> sections;
  std::map<std::string, int> headers;
  std::string current;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    if (auto c = s.find_first_of("#;"); c != std::string::npos) s.erase(c);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      current = trim(s.substr(1, s.size() - 2));
      if (!schema().count(current)) throw ConfigError("unknown section [" + current + "]", line);
      if (headers.count(current)) throw ConfigError("duplicate section [" + current + "]", line);
      headers[current] = line;
      sections[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (current.empty()) throw ConfigError("key '" + key + "' outside any section", line);
    if (!schema().at(current).count(key))
      throw ConfigError("unknown key '" + key + "' in [" + current + "]", line);
    if (sections[current].count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    sections[current][key] = {value, line};
  }
  if (!headers.count("model")) throw ConfigError("missing [model] section");

  const Reader r(sections, headers);
  RunConfig cfg;
  auto& p = cfg.physical;
  p.R = r.number("model", "R");
  p.gamma = r.number("model", "gamma");
  p.alpha = r.number("model", "alpha");
  p.ubar = r.number("model", "ubar");
  r.with("model", "T", [&](const Entry& e) { cfg.T = to_double(e.value, e.line, "T"); });

  double profile_min = 0.0;
  r.with("model", "profile_min",
         [&](const Entry& e) { profile_min = to_double(e.value, e.line, "profile_min"); });
  if (const Entry* prof = r.find("model", "profile")) {
    for (const char* k : {"H0", "H1", "H2"})
      if (const Entry* e = r.find("model", k))
        throw ConfigError(std::string(k) + " is derived from the profile; give one or the other",
                          e->line);
    try {
      p.mobility = MobilitySpec::from_profile(parse_profile(prof->value, profile_min), p.ubar);
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("profile: ") + ex.what(), prof->line);
    }
  } else {
    p.mobility = MobilitySpec::taylor_only(1.0, 0.0, 0.0);
    r.with("model", "H0", [&](const Entry& e) { p.mobility.h0 = to_double(e.value, e.line, "H0"); });
    r.with("model", "H1", [&](const Entry& e) { p.mobility.h1 = to_double(e.value, e.line, "H1"); });
    r.with("model", "H2", [&](const Entry& e) { p.mobility.h2 = to_double(e.value, e.line, "H2"); });
  }
  try {
    p.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what(), headers.at("model"));
  }

  const std::array<double, 3> lengths{r.number("model", "L1"), r.number("model", "L2"),
                                      r.number("model", "L3")};
  double tie = DomainSpec::kDefaultTieTolerance;
  r.with("model", "tie_tolerance",
         [&](const Entry& e) { tie = to_double(e.value, e.line, "tie_tolerance"); });
  const int len_line = r.require("model", "L1").line;
  try {
    if (const Entry* c = r.find("model", "case"))
      cfg.domain = DomainSpec(lengths, domain_case_from_string(c->value), tie);
    else
      cfg.domain = DomainSpec(lengths, tie);
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what(), r.find("model", "case") ? r.find("model", "case")->line : len_line);
  }

  // [simulate]
  auto& sim = cfg.simulate;
  r.with("simulate", "dt", [&](const Entry& e) { sim.step.dt = to_double(e.value, e.line, "dt"); });
  r.with("simulate", "scheme", [&](const Entry& e) { sim.step.scheme = scheme_from_string(e.value); });
  r.with("simulate", "model", [&](const Entry& e) { sim.step.model = rhs_model_from_string(e.value); });
  r.with("simulate", "grid", [&](const Entry& e) {
    const auto v = split(e.value, ',');
    if (v.size() != 1 && v.size() != 3) throw ConfigError("grid is N or N1,N2,N3", e.line);
    for (int a = 0; a < 3; ++a)
      sim.step.grid[a] = static_cast<int>(to_long(v[v.size() == 1 ? 0 : a], e.line, "grid"));
  });
  r.with("simulate", "dealias", [&](const Entry& e) { sim.step.dealias = to_bool(e.value, e.line, "dealias"); });
  r.with("simulate", "stabilization",
         [&](const Entry& e) { sim.step.stabilization = to_double(e.value, e.line, "stabilization"); });
  r.with("simulate", "diffusive_stabilization", [&](const Entry& e) {
    sim.step.diffusive_stabilization = to_double(e.value, e.line, "diffusive_stabilization");
  });
  r.with("simulate", "t_end", [&](const Entry& e) { sim.options.t_end = to_double(e.value, e.line, "t_end"); });
  r.with("simulate", "record_every",
         [&](const Entry& e) { sim.options.record_every = to_long(e.value, e.line, "record_every"); });
  r.with("simulate", "steady_tol",
         [&](const Entry& e) { sim.options.steady_tol = to_double(e.value, e.line, "steady_tol"); });
  r.with("simulate", "snapshots",
         [&](const Entry& e) { sim.options.keep_snapshots = to_bool(e.value, e.line, "snapshots"); });
  r.with("simulate", "init", [&](const Entry& e) {
    if (e.value == "random") sim.init = InitKind::Random;
    else if (e.value == "modes") sim.init = InitKind::Modes;
    else throw ConfigError("init is 'random' or 'modes'", e.line);
  });
  r.with("simulate", "amplitude", [&](const Entry& e) { sim.amplitude = to_double(e.value, e.line, "amplitude"); });
  r.with("simulate", "band", [&](const Entry& e) { sim.band = static_cast<int>(to_long(e.value, e.line, "band")); });
  r.with("simulate", "modes", [&](const Entry& e) {
    // "k1,k2,k3:a k1,k2,k3:a ..."
    std::istringstream ms(e.value);
    std::string term;
    while (ms >> term) {
      const auto c = term.find(':');
      if (c == std::string::npos) throw ConfigError("modes entries are 'k1,k2,k3:amplitude'", e.line);
      const ModeIndex K = parse_mode(term.substr(0, c), e.line);
      if (K.is_zero()) throw ConfigError("the zero mode carries the mass and is pinned", e.line);
      sim.modes.emplace_back(K, to_double(term.substr(c + 1), e.line, "modes"));
    }
  });
  if (sim.init == InitKind::Modes && sim.modes.empty())
    throw ConfigError("init = modes needs a 'modes' list", headers.count("simulate") ? headers.at("simulate") : 0);
  try {
    sim.step.validate();
  } catch (const ModelError& ex) {
    throw ConfigError(ex.what(), headers.count("simulate") ? headers.at("simulate") : 0);
  }

  // [reduce]
  auto& red = cfg.reduce;
  r.with("reduce", "y0", [&](const Entry& e) { red.y0 = to_list(e.value, e.line, "y0"); });
  r.with("reduce", "dt", [&](const Entry& e) { red.options.dt = to_double(e.value, e.line, "dt"); });
  std::optional<double> reduce_t_end;
  r.with("reduce", "t_end", [&](const Entry& e) {
    reduce_t_end = to_double(e.value, e.line, "t_end");
    if (!(*reduce_t_end >= 0.0)) throw ConfigError("t_end must be non-negative", e.line);
  });
  r.with("reduce", "record_every",
         [&](const Entry& e) { red.options.record_every = to_long(e.value, e.line, "record_every"); });
  r.with("reduce", "sigma_at", [&](const Entry& e) {
    if (e.value == "ambient") red.options.sigma_at = SigmaAt::Ambient;
    else if (e.value == "critical") red.options.sigma_at = SigmaAt::Critical;
    else throw ConfigError("sigma_at is 'ambient' or 'critical'", e.line);
  });
  if (!(red.options.dt > 0.0)) throw ConfigError("[reduce] dt must be positive", r.find("reduce", "dt")->line);
  if (reduce_t_end)
    red.options.steps = static_cast<long>(std::ceil(*reduce_t_end / red.options.dt - 1e-9));
  if (!red.y0.empty() && static_cast<int>(red.y0.size()) != cfg.domain.multiplicity())
    throw ConfigError("y0 needs " + std::to_string(cfg.domain.multiplicity()) + " components",
                      r.find("reduce", "y0")->line);

  // [sweep]
  r.with("sweep", "epsilons", [&](const Entry& e) { cfg.sweep.epsilons = to_list(e.value, e.line, "epsilons"); });
  r.with("sweep", "temperatures",
         [&](const Entry& e) { cfg.sweep.temperatures = to_list(e.value, e.line, "temperatures"); });
  r.with("sweep", "threads",
         [&](const Entry& e) { cfg.sweep.threads = static_cast<int>(to_long(e.value, e.line, "threads")); });

  // [validate]
  r.with("validate", "y0", [&](const Entry& e) { cfg.validate.y0 = to_list(e.value, e.line, "y0"); });
  r.with("validate", "horizon", [&](const Entry& e) { cfg.validate.horizon = to_double(e.value, e.line, "horizon"); });
  r.with("validate", "dt", [&](const Entry& e) { cfg.validate.dt = to_double(e.value, e.line, "dt"); });
  if (!cfg.validate.y0.empty() && static_cast<int>(cfg.validate.y0.size()) != cfg.domain.multiplicity())
    throw ConfigError("y0 needs " + std::to_string(cfg.domain.multiplicity()) + " components",
                      r.find("validate", "y0")->line);

  // [output]
  r.with("output", "dir", [&](const Entry& e) { cfg.output_dir = e.value; });
  r.with("output", "seed", [&](const Entry& e) {
    const long v = to_long(e.value, e.line, "seed");
    if (v < 0) throw ConfigError("seed must be non-negative", e.line);
    cfg.seed = static_cast<std::uint64_t>(v);
  });
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cht
