#include "penaparab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace penaparab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) fail(where, "unknown key '" + key + "'");
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

expr::Expr parse_expr(const json& v, const std::string& where, expr::VarSet allowed) {
  std::string text;
  if (v.is_number()) {
    text = v.dump();
  } else if (v.is_string()) {
    text = v.get<std::string>();
  } else {
    fail(where, "expected an expression string or a number");
  }
  try {
    return expr::parse(text, allowed);
  } catch (const expr::ParseError& e) {
    fail(where, e.what());
  }
}

expr::Expr expr_or(const json& obj, const std::string& key, const std::string& where,
                   expr::VarSet allowed, const char* fallback) {
  if (const json* v = find(obj, key)) return parse_expr(*v, where + "." + key, allowed);
  return expr::parse(fallback, allowed);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where,
                 double fallback) {
  if (const json* v = find(obj, key)) return number(*v, where + "." + key);
  return fallback;
}

int integer_or(const json& obj, const std::string& key, const std::string& where, int fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(where + "." + key, "expected an integer");
  return v->get<int>();
}

const json& section(const json& doc, const std::string& key) {
  const json* v = find(doc, key);
  if (!v) fail(key, "missing section");
  return *v;
}

BcKind parse_kind(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected \"dirichlet\" or \"robin\"");
  const auto s = v.get<std::string>();
  if (s == "dirichlet") return BcKind::Dirichlet;
  if (s == "robin") return BcKind::Robin;
  fail(where, "unknown boundary kind '" + s + "' (expected \"dirichlet\" or \"robin\")");
}

std::vector<Segment> parse_side(const json& v, const std::string& where, double T) {
  if (v.is_string()) return {Segment{0.0, T, parse_kind(v, where)}};
  if (!v.is_array() || v.empty()) fail(where, "expected a kind or a non-empty list of segments");
  std::vector<Segment> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    allow_keys(v[i], w, {"t0", "t1", "kind"});
    Segment s;
    s.t0 = number(section(v[i], "t0"), w + ".t0");
    s.t1 = number(section(v[i], "t1"), w + ".t1");
    s.kind = parse_kind(section(v[i], "kind"), w + ".kind");
    out.push_back(s);
  }
  return out;
}

}  // namespace

Config parse_config(const json& doc) {
  allow_keys(doc, "config",
             {"domain", "boundary", "coefficients", "data", "discretization", "manufactured",
              "transform", "output"});
  Config cfg;
  ProblemSpec& spec = cfg.spec;

  {
    const json& d = section(doc, "domain");
    allow_keys(d, "domain", {"a", "b", "T", "slope_max", "width_min"});
    spec.domain.a = expr_or(d, "a", "domain", expr::kTimeOnly, "0");
    spec.domain.b = expr_or(d, "b", "domain", expr::kTimeOnly, "1");
    spec.domain.T = number_or(d, "T", "domain", 1.0);
    spec.domain.slope_max = number_or(d, "slope_max", "domain", 10.0);
    spec.domain.width_min = number_or(d, "width_min", "domain", 1e-3);
    if (!(spec.domain.T > 0.0)) fail("domain.T", "must be positive");
    if (!(spec.domain.slope_max > 0.0)) fail("domain.slope_max", "must be positive");
    if (!(spec.domain.width_min > 0.0)) fail("domain.width_min", "must be positive");
  }

  {
    const json& b = section(doc, "boundary");
    allow_keys(b, "boundary", {"left", "right"});
    spec.partition.left = parse_side(section(b, "left"), "boundary.left", spec.domain.T);
    spec.partition.right = parse_side(section(b, "right"), "boundary.right", spec.domain.T);
  }

  {
    const json empty = json::object();
    const json* cp = find(doc, "coefficients");
    const json& c = cp ? *cp : empty;
    allow_keys(c, "coefficients", {"a11", "b1", "c", "k"});
    spec.a11 = expr_or(c, "a11", "coefficients", expr::kSpaceTime, "1");
    spec.b1 = expr_or(c, "b1", "coefficients", expr::kSpaceTime, "0");
    spec.k = expr_or(c, "k", "coefficients", expr::kSpaceTime, "0");
    const json* r = find(c, "c");
    std::string kind = "linear";
    std::optional<double> lipschitz;
    if (r) {
      allow_keys(*r, "coefficients.c", {"kind", "expr", "lipschitz"});
      if (const json* k = find(*r, "kind")) {
        if (!k->is_string()) fail("coefficients.c.kind", "expected a string");
        kind = k->get<std::string>();
      }
      if (const json* l = find(*r, "lipschitz")) {
        lipschitz = number(*l, "coefficients.c.lipschitz");
        if (!(*lipschitz >= 0.0)) fail("coefficients.c.lipschitz", "must be non-negative");
      }
    }
    if (kind == "linear") {
      const expr::Expr c0 = r ? expr_or(*r, "expr", "coefficients.c", expr::kSpaceTime, "0")
                              : expr::parse("0", expr::kSpaceTime);
      spec.c = Reaction::linear(Field(c0));
      if (lipschitz) {
        spec.lipschitz_c = *lipschitz;
      } else {
        // |c0| over the same samples the certificate uses.
        ProblemSpec probe = spec;
        probe.lipschitz_c = 0.0;
        spec.lipschitz_c = check_lipschitz(probe).max_quotient;
      }
    } else if (kind == "semilinear") {
      const json* e = find(*r, "expr");
      if (!e) fail("coefficients.c.expr", "required for the semilinear kind");
      if (!lipschitz) fail("coefficients.c.lipschitz", "required for the semilinear kind");
      spec.c = Reaction::semilinear(parse_expr(*e, "coefficients.c.expr", expr::kReaction));
      spec.lipschitz_c = *lipschitz;
    } else {
      fail("coefficients.c.kind", "unknown kind '" + kind + "' (expected linear or semilinear)");
    }
  }

  {
    const json* m = find(doc, "manufactured");
    const json* d = find(doc, "data");
    if (m && d) fail("data", "not allowed together with a manufactured section");
    if (d) {
      allow_keys(*d, "data", {"g", "f", "ybar", "y0"});
      spec.g = expr_or(*d, "g", "data", expr::kSpaceTime, "0");
      spec.f = expr_or(*d, "f", "data", expr::kSpaceTime, "0");
      spec.ybar = expr_or(*d, "ybar", "data", expr::kSpaceTime, "0");
      spec.y0 = expr_or(*d, "y0", "data", expr::kSpaceOnly, "0");
    } else {
      spec.g = spec.f = spec.ybar = spec.y0 = Field(expr::parse("0", expr::kSpaceTime));
    }
    if (m) {
      allow_keys(*m, "manufactured", {"ystar", "ystar_x", "ystar_t", "ystar_xx"});
      ManufacturedCase mc;
      mc.ystar = parse_expr(section(*m, "ystar"), "manufactured.ystar", expr::kSpaceTime);
      mc.ystar_x = parse_expr(section(*m, "ystar_x"), "manufactured.ystar_x", expr::kSpaceTime);
      mc.ystar_t = parse_expr(section(*m, "ystar_t"), "manufactured.ystar_t", expr::kSpaceTime);
      mc.ystar_xx = parse_expr(section(*m, "ystar_xx"), "manufactured.ystar_xx", expr::kSpaceTime);
      cfg.manufactured = mc;
    }
  }

  if (const json* d = find(doc, "discretization")) {
    allow_keys(*d, "discretization",
               {"nx", "nt", "penalty_schedule", "picard_tol", "picard_max", "convergence_levels"});
    cfg.nx = integer_or(*d, "nx", "discretization", cfg.nx);
    cfg.nt = integer_or(*d, "nt", "discretization", cfg.nt);
    if (cfg.nx < 2) fail("discretization.nx", "must be >= 2");
    if (cfg.nt < 2) fail("discretization.nt", "must be >= 2");
    if (const json* s = find(*d, "penalty_schedule")) {
      if (!s->is_array()) fail("discretization.penalty_schedule", "expected an array");
      std::vector<double> values;
      for (std::size_t i = 0; i < s->size(); ++i)
        values.push_back(
            number((*s)[i], "discretization.penalty_schedule[" + std::to_string(i) + "]"));
      try {
        cfg.schedule = PenaltySchedule(values);
      } catch (const std::invalid_argument& e) {
        fail("discretization.penalty_schedule", e.what());
      }
    }
    cfg.picard.tol = number_or(*d, "picard_tol", "discretization", cfg.picard.tol);
    cfg.picard.max_iter = integer_or(*d, "picard_max", "discretization", cfg.picard.max_iter);
    cfg.convergence_levels =
        integer_or(*d, "convergence_levels", "discretization", cfg.convergence_levels);
    if (!(cfg.picard.tol > 0.0)) fail("discretization.picard_tol", "must be positive");
    if (cfg.picard.max_iter < 1) fail("discretization.picard_max", "must be >= 1");
    if (cfg.convergence_levels < 1 || cfg.convergence_levels > 8)
      fail("discretization.convergence_levels", "must be between 1 and 8");
  }

  if (const json* t = find(doc, "transform")) {
    allow_keys(*t, "transform", {"k1", "k2"});
    cfg.transform = TransformOverride{number(section(*t, "k1"), "transform.k1"),
                                      number(section(*t, "k2"), "transform.k2")};
  }

  if (const json* o = find(doc, "output")) {
    allow_keys(*o, "output", {"dir", "mesh"});
    if (const json* dir = find(*o, "dir")) {
      if (!dir->is_string()) fail("output.dir", "expected a string");
      cfg.output_dir = dir->get<std::string>();
    }
    if (const json* mesh = find(*o, "mesh")) {
      if (!mesh->is_boolean()) fail("output.mesh", "expected a boolean");
      cfg.write_mesh = mesh->get<bool>();
    }
  }

  if (cfg.manufactured) {
    try {
      spec = derive_data(*cfg.manufactured, spec);
    } catch (const ConsistencyError& e) {
      fail("manufactured", e.what());
    }
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace penaparab
