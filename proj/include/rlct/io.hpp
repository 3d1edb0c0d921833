#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlct/builders.hpp"
#include "rlct/error.hpp"
#include "rlct/model.hpp"
#include "rlct/observable.hpp"
#include "rlct/rational.hpp"
#include "rlct/series.hpp"

namespace rlct {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

struct EstimateDefaults {
  std::optional<std::vector<double>> box;
  std::optional<double> eps_hi;
  std::optional<double> eps_lo;
  std::optional<int> per_decade;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
};

struct ModelFile {
  ModelSpec model;
  std::optional<int> d_theta;
  std::optional<int> d_tau;
  EstimateDefaults estimate;
};

namespace io_detail {

[[noreturn]] inline void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ModelFile, "field '" + field + "': " + what);
}

inline const Json& need(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
inline std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline long as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

inline unsigned as_unsigned(const Json& j, const std::string& path) {
  long v = as_int(j, path);
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<unsigned>(v);
}

inline bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

inline double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

// "p/q" strings or integers
inline Rational as_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) fail(path, "expected a rational as a \"p/q\" string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error&) {
    fail(path, "not a rational literal: \"" + j.get<std::string>() + "\"");
  }
}

inline std::vector<std::string> as_string_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], index(path, i)));
  return out;
}

inline std::vector<Rational> as_rational_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rationals");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_rational(j[i], index(path, i)));
  return out;
}

inline RationalMatrix as_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(index(path, 0), "expected a non-empty row");
  RationalMatrix m(j.size(), cols, Rational(0));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(index(path, r), "expected a row of length " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = as_rational(j[r][c], index(index(path, r), c));
  }
  return m;
}

inline std::vector<int> as_exponents(const Json& j, const std::string& path, std::size_t n) {
  if (!j.is_array() || j.size() != n) fail(path, "expected an exponent vector of length " + std::to_string(n));
  std::vector<int> e;
  for (std::size_t i = 0; i < n; ++i) {
    long v = as_int(j[i], index(path, i));
    if (v < 0 || v > 255) fail(index(path, i), "exponent out of range");
    e.push_back(static_cast<int>(v));
  }
  return e;
}

// [[exponents], "p/q"] pairs
inline ParamSeries as_polynomial(const Json& j, const std::string& path, const Ring& ring, int dtheta, int dtau) {
  if (!j.is_array()) fail(path, "expected an array of [exponents, coefficient] pairs");
  ParamSeries out(ring, dtheta, dtau);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string p = index(path, t);
    if (!j[t].is_array() || j[t].size() != 2) fail(p, "expected [exponents, coefficient]");
    std::vector<int> e = as_exponents(j[t][0], index(p, 0), ring->size());
    Monomial m;
    for (std::size_t i = 0; i < e.size(); ++i) m[i] = static_cast<std::uint8_t>(e[i]);
    out.add_term(m, as_rational(j[t][1], index(p, 1)));
  }
  return out;
}

inline Json polynomial_json(const ParamSeries& s) {
  Json out = Json::array();
  const std::size_t n = s.ring()->size();
  for (const auto& [m, c] : s.terms()) {
    Json e = Json::array();
    for (std::size_t i = 0; i < n; ++i) e.push_back(static_cast<int>(m[i]));
    out.push_back(Json::array({e, to_string(c)}));
  }
  return out;
}

inline std::pair<int, int> series_bounds(const Json& doc) {
  int dt = kUnbounded, du = kUnbounded;
  if (auto it = doc.find("series_bounds"); it != doc.end()) {
    if (it->contains("d_theta") && !(*it)["d_theta"].is_null()) dt = static_cast<int>(as_int((*it)["d_theta"], "series_bounds.d_theta"));
    if (it->contains("d_tau") && !(*it)["d_tau"].is_null()) du = static_cast<int>(as_int((*it)["d_tau"], "series_bounds.d_tau"));
  }
  return {dt, du};
}

inline Json bound_json(int b) { return b == kUnbounded ? Json(nullptr) : Json(b); }

inline Space parse_space(const Json& j, const std::string& path) {
  const std::string kind = as_string(need(j, "kind", path), join(path, "kind"));
  try {
    if (kind == "finite")
      return ObservableSpace::finite(as_string_list(need(j, "outcomes", path), join(path, "outcomes")),
                                     as_rational_list(need(j, "weights", path), join(path, "weights")));
    if (kind == "moment") {
      std::vector<std::string> vars = as_string_list(need(j, "vars", path), join(path, "vars"));
      long degree = as_int(need(j, "max_degree", path), join(path, "max_degree"));
      const Json& moments = need(j, "moments", path);
      const std::string mp = join(path, "moments");
      if (!moments.is_array()) fail(mp, "expected an array of [exponents, moment] pairs");
      std::map<std::vector<int>, Rational> table;
      for (std::size_t t = 0; t < moments.size(); ++t) {
        const std::string p = index(mp, t);
        if (!moments[t].is_array() || moments[t].size() != 2) fail(p, "expected [exponents, moment]");
        table[as_exponents(moments[t][0], index(p, 0), vars.size())] = as_rational(moments[t][1], index(p, 1));
      }
      return ObservableSpace::moment(vars, static_cast<int>(degree), table);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ModelFile) throw;
    fail(path, e.what());
  }
  fail(join(path, "kind"), "expected \"finite\" or \"moment\", got \"" + kind + "\"");
}

inline Json space_json(const Space& s) {
  Json out;
  if (s->kind() == SpaceKind::Finite) {
    out["kind"] = "finite";
    out["outcomes"] = s->labels();
    Json w = Json::array();
    for (const auto& q : s->expectation()) w.push_back(to_string(q));
    out["weights"] = w;
    return out;
  }
  out["kind"] = "moment";
  out["vars"] = s->base_vars();
  out["max_degree"] = s->max_degree();
  // every moment up to twice the degree, recovered from the pair table
  std::map<std::vector<int>, Rational> table;
  const auto& mons = s->monomials();
  for (std::size_t i = 0; i < mons.size(); ++i)
    for (std::size_t j = 0; j < mons.size(); ++j) {
      std::vector<int> e(mons[i].size());
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = mons[i][v] + mons[j][v];
      table.emplace(e, s->pair_expectation()(i, j));
    }
  Json moments = Json::array();
  for (const auto& [e, q] : table) moments.push_back(Json::array({e, to_string(q)}));
  out["moments"] = moments;
  return out;
}

inline std::size_t basis_index(const Json& j, const std::string& path, const Space& space) {
  if (j.is_number_integer()) {
    long i = j.get<long>();
    if (i < 0 || static_cast<std::size_t>(i) >= space->dim()) fail(path, "basis index out of range");
    return static_cast<std::size_t>(i);
  }
  const std::string label = as_string(j, path);
  const auto& labels = space->labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  fail(path, "unknown basis element \"" + label + "\"");
}

inline ModelSpec build_from_builder(const std::string& name, const Json& args) {
  const std::string ap = "args";
  auto opt = [&](const char* key) -> const Json* {
    if (args.is_null()) return nullptr;
    if (!args.is_object()) fail(ap, "expected an object");
    auto it = args.find(key);
    return it == args.end() ? nullptr : &*it;
  };
  if (args.is_object())
    for (const auto& [key, value] : args.items()) {
      (void)value;
      static const std::map<std::string, std::vector<std::string>> known{
          {"intro", {"transformed", "tau_bound"}},
          {"remark", {}},
          {"binomial_mixture", {"M", "H", "H0", "theta_star", "tau_star", "tau_const"}},
          {"rrr", {"alpha", "beta", "x_moments", "transformed", "theta_bound", "tau_bound"}},
          {"gaussian_mean", {"d"}},
          {"bilinear_link", {"transformed", "tau_bound"}},
      };
      auto k = known.find(name);
      if (k != known.end() && std::find(k->second.begin(), k->second.end(), key) == k->second.end())
        fail(join(ap, key), "unknown argument for builder \"" + name + "\"");
    }
  try {
    if (name == "intro") {
      bool transformed = false;
      int tau_bound = 4;
      if (auto* v = opt("transformed")) transformed = as_bool(*v, join(ap, "transformed"));
      if (auto* v = opt("tau_bound")) tau_bound = static_cast<int>(as_int(*v, join(ap, "tau_bound")));
      return intro_model(transformed, tau_bound);
    }
    if (name == "remark") return remark_model();
    if (name == "binomial_mixture") {
      unsigned H = 3;
      if (auto* v = opt("H")) H = as_unsigned(*v, join(ap, "H"));
      BinomialMixtureArgs a = default_binomial_args(H);
      if (auto* v = opt("M")) a.M = as_unsigned(*v, join(ap, "M"));
      if (auto* v = opt("H0")) a.H0 = as_unsigned(*v, join(ap, "H0"));
      if (auto* v = opt("theta_star")) a.theta_star = as_rational_list(*v, join(ap, "theta_star"));
      if (auto* v = opt("tau_star")) a.tau_star = as_rational_list(*v, join(ap, "tau_star"));
      if (auto* v = opt("tau_const")) a.tau_const = as_rational_list(*v, join(ap, "tau_const"));
      return binomial_mixture(a);
    }
    if (name == "rrr") {
      RrrArgs a = default_rrr_args();
      if (auto* v = opt("alpha")) a.alpha = as_matrix(*v, join(ap, "alpha"));
      if (auto* v = opt("beta")) a.beta = as_matrix(*v, join(ap, "beta"));
      if (auto* v = opt("x_moments")) a.x_moments = as_rational_list(*v, join(ap, "x_moments"));
      if (auto* v = opt("transformed")) a.transformed = as_bool(*v, join(ap, "transformed"));
      if (auto* v = opt("theta_bound")) a.theta_bound = static_cast<int>(as_int(*v, join(ap, "theta_bound")));
      if (auto* v = opt("tau_bound")) a.tau_bound = static_cast<int>(as_int(*v, join(ap, "tau_bound")));
      return rrr_model(a);
    }
    if (name == "gaussian_mean") {
      unsigned d = 2;
      if (auto* v = opt("d")) d = as_unsigned(*v, join(ap, "d"));
      if (d == 0) fail(join(ap, "d"), "must be positive");
      return gaussian_mean_model(d);
    }
    if (name == "bilinear_link") {
      bool transformed = true;
      int tau_bound = 4;
      if (auto* v = opt("transformed")) transformed = as_bool(*v, join(ap, "transformed"));
      if (auto* v = opt("tau_bound")) tau_bound = static_cast<int>(as_int(*v, join(ap, "tau_bound")));
      return bilinear_link_model(transformed, tau_bound);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ModelFile) throw;
    fail(ap, e.what());
  }
  fail("builder", "unknown builder \"" + name + "\"");
}

inline EstimateDefaults parse_estimate(const Json& j) {
  EstimateDefaults out;
  const std::string p = "estimate";
  if (!j.is_object()) fail(p, "expected an object");
  if (auto it = j.find("box"); it != j.end()) {
    if (!it->is_array()) fail(join(p, "box"), "expected an array of half-widths");
    std::vector<double> box;
    for (std::size_t i = 0; i < it->size(); ++i) box.push_back(as_double((*it)[i], index(join(p, "box"), i)));
    out.box = box;
  }
  if (auto it = j.find("eps_hi"); it != j.end()) out.eps_hi = as_double(*it, join(p, "eps_hi"));
  if (auto it = j.find("eps_lo"); it != j.end()) out.eps_lo = as_double(*it, join(p, "eps_lo"));
  if (auto it = j.find("per_decade"); it != j.end()) out.per_decade = static_cast<int>(as_int(*it, join(p, "per_decade")));
  if (auto it = j.find("samples"); it != j.end()) out.samples = as_unsigned(*it, join(p, "samples"));
  if (auto it = j.find("seed"); it != j.end()) out.seed = as_unsigned(*it, join(p, "seed"));
  return out;
}

inline Json estimate_json(const EstimateDefaults& e) {
  Json out = Json::object();
  if (e.box) out["box"] = *e.box;
  if (e.eps_hi) out["eps_hi"] = *e.eps_hi;
  if (e.eps_lo) out["eps_lo"] = *e.eps_lo;
  if (e.per_decade) out["per_decade"] = *e.per_decade;
  if (e.samples) out["samples"] = *e.samples;
  if (e.seed) out["seed"] = *e.seed;
  return out;
}

}  // namespace io_detail

inline ModelFile parse_model_file(const Json& doc) {
  using namespace io_detail;
  if (!doc.is_object()) fail("", "the model file must be a JSON object");
  long version = as_int(need(doc, "format_version", ""), "format_version");
  if (version != kFormatVersion) fail("format_version", "unsupported version " + std::to_string(version));
  ModelFile out;

  if (auto it = doc.find("builder"); it != doc.end()) {
    const Json args = doc.contains("args") ? doc["args"] : Json(nullptr);
    out.model = build_from_builder(as_string(*it, "builder"), args);
    if (auto n = doc.find("name"); n != doc.end()) out.model.name = as_string(*n, "name");
  } else {
    const std::string name = as_string(need(doc, "name", ""), "name");
    const std::string kind = as_string(need(doc, "kind", ""), "kind");
    const Json& vars = need(doc, "vars", "");
    VarSet vs{as_string_list(need(vars, "theta", "vars"), "vars.theta"),
              vars.contains("tau") ? as_string_list(vars["tau"], "vars.tau") : std::vector<std::string>{}};
    Ring ring;
    try {
      ring = make_ring(vs);
    } catch (const Error& e) {
      fail("vars", e.what());
    }
    auto [dt, du] = series_bounds(doc);
    if (kind == "discrete") {
      std::vector<std::string> outcomes = as_string_list(need(doc, "outcomes", ""), "outcomes");
      const Json& pmf = need(doc, "pmf", "");
      if (!pmf.is_array()) fail("pmf", "expected an array of {outcome, polynomial} entries");
      std::vector<std::optional<ParamSeries>> slots(outcomes.size());
      for (std::size_t i = 0; i < pmf.size(); ++i) {
        const std::string p = index("pmf", i);
        std::string label = as_string(need(pmf[i], "outcome", p), join(p, "outcome"));
        auto pos = std::find(outcomes.begin(), outcomes.end(), label);
        if (pos == outcomes.end()) fail(join(p, "outcome"), "unknown outcome \"" + label + "\"");
        auto& slot = slots[static_cast<std::size_t>(pos - outcomes.begin())];
        if (slot) fail(join(p, "outcome"), "outcome \"" + label + "\" appears twice");
        slot = as_polynomial(need(pmf[i], "polynomial", p), join(p, "polynomial"), ring, dt, du);
      }
      std::vector<ParamSeries> polys;
      for (std::size_t x = 0; x < outcomes.size(); ++x) {
        if (!slots[x]) fail("pmf", "no polynomial for outcome \"" + outcomes[x] + "\"");
        polys.push_back(*slots[x]);
      }
      try {
        out.model = discrete_model(name, ring, outcomes, polys);
      } catch (const Error& e) {
        fail("pmf", e.what());
      }
    } else if (kind == "observable") {
      Space space = parse_space(need(doc, "space", ""), "space");
      const Json& f = need(doc, "f", "");
      if (!f.is_array()) fail("f", "expected an array of {basis, polynomial} entries");
      ObsSeries series(space, ring, dt, du);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string p = index("f", i);
        std::size_t b = basis_index(need(f[i], "basis", p), join(p, "basis"), space);
        series.comps()[b] += as_polynomial(need(f[i], "polynomial", p), join(p, "polynomial"), ring, dt, du);
      }
      try {
        out.model = observable_model(name, series);
      } catch (const Error& e) {
        fail("f", e.what());
      }
    } else {
      fail("kind", "expected \"discrete\" or \"observable\", got \"" + kind + "\"");
    }
    if (auto it = doc.find("declared_m"); it != doc.end()) {
      long m = as_int(*it, "declared_m");
      if (m < 1) fail("declared_m", "must be positive");
      out.model.declared_m = static_cast<int>(m);
    }
    if (auto it = doc.find("provenance"); it != doc.end()) out.model.provenance = as_string_list(*it, "provenance");
  }

  if (auto it = doc.find("truncation"); it != doc.end()) {
    if (!it->is_object()) fail("truncation", "expected an object");
    if (it->contains("d_theta")) {
      long v = as_int((*it)["d_theta"], "truncation.d_theta");
      if (v < 2) fail("truncation.d_theta", "must be at least 2");
      out.d_theta = static_cast<int>(v);
    }
    if (it->contains("d_tau")) {
      long v = as_int((*it)["d_tau"], "truncation.d_tau");
      if (v < 0) fail("truncation.d_tau", "must be non-negative");
      out.d_tau = static_cast<int>(v);
    }
  }
  if (auto it = doc.find("estimate"); it != doc.end()) out.estimate = parse_estimate(*it);
  if (out.estimate.box && out.estimate.box->size() != out.model.ring->size())
    fail("estimate.box", "expected " + std::to_string(out.model.ring->size()) + " half-widths");
  return out;
}

inline ModelFile parse_model_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ModelFile, std::string("invalid JSON: ") + e.what());
  }
  return parse_model_file(doc);
}

inline ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ModelFile, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

// explicit form: every series written out, no builder reference
inline Json model_to_json(const ModelFile& mf) {
  using namespace io_detail;
  const ModelSpec& m = mf.model;
  Json out;
  out["format_version"] = kFormatVersion;
  out["name"] = m.name;
  out["kind"] = m.kind == ModelKind::DiscretePolynomial ? "discrete" : "observable";
  out["vars"] = {{"theta", m.vars().theta}, {"tau", m.vars().tau}};
  int dt = kUnbounded, du = kUnbounded;
  if (m.kind == ModelKind::DiscretePolynomial) {
    for (const auto& p : m.pmf) {
      dt = std::min(dt, p.theta_bound());
      du = std::min(du, p.tau_bound());
    }
  } else {
    dt = m.f->theta_bound();
    du = m.f->tau_bound();
  }
  if (dt != kUnbounded || du != kUnbounded) out["series_bounds"] = {{"d_theta", bound_json(dt)}, {"d_tau", bound_json(du)}};
  if (m.kind == ModelKind::DiscretePolynomial) {
    out["outcomes"] = m.outcomes;
    Json pmf = Json::array();
    for (std::size_t x = 0; x < m.pmf.size(); ++x)
      pmf.push_back({{"outcome", m.outcomes[x]}, {"polynomial", polynomial_json(m.pmf[x])}});
    out["pmf"] = pmf;
  } else {
    out["space"] = space_json(m.space);
    Json f = Json::array();
    for (std::size_t b = 0; b < m.f->comps().size(); ++b) {
      if (m.f->component(b).terms().empty()) continue;
      f.push_back({{"basis", m.space->labels()[b]}, {"polynomial", polynomial_json(m.f->component(b))}});
    }
    out["f"] = f;
  }
  if (m.declared_m) out["declared_m"] = *m.declared_m;
  if (!m.provenance.empty()) out["provenance"] = m.provenance;
  if (mf.d_theta || mf.d_tau) {
    Json t = Json::object();
    if (mf.d_theta) t["d_theta"] = *mf.d_theta;
    if (mf.d_tau) t["d_tau"] = *mf.d_tau;
    out["truncation"] = t;
  }
  Json est = estimate_json(mf.estimate);
  if (!est.empty()) out["estimate"] = est;
  return out;
}

}  // namespace rlct
