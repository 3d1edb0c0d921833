#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/matrix.hpp"
#include "rlct/obs_series.hpp"
#include "rlct/observable.hpp"
#include "rlct/series.hpp"

namespace rlct {

enum class ModelKind { DiscretePolynomial, ObservablePolynomial };

inline const char* to_string(ModelKind k) {
  return k == ModelKind::DiscretePolynomial ? "DiscretePolynomial" : "ObservablePolynomial";
}

using ClosedFormK = std::function<double(const std::vector<double>&)>;

struct ModelSpec {
  std::string name;
  ModelKind kind = ModelKind::DiscretePolynomial;
  Ring ring;
  std::vector<std::string> outcomes;
  std::vector<ParamSeries> pmf;
  Space space;
  std::optional<ObsSeries> f;
  std::vector<std::string> provenance;
  ClosedFormK closed_form_k;
  // nominal m for models whose non-basis group is empty
  std::optional<int> declared_m;

  const VarSet& vars() const { return ring->vars(); }
  std::size_t d1() const { return ring->d1(); }
  std::size_t d2() const { return ring->d2(); }
};

inline std::vector<Rational> true_probabilities(const std::vector<ParamSeries>& pmf) {
  std::vector<Rational> q;
  for (const auto& p : pmf) q.push_back(p.constant_term());
  return q;
}

inline ModelSpec discrete_model(std::string name, Ring ring, std::vector<std::string> outcomes, std::vector<ParamSeries> pmf) {
  if (outcomes.empty() || outcomes.size() != pmf.size())
    throw Error(ErrorKind::InvalidModel, "need one pmf polynomial per outcome");
  ParamSeries total(ring);
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    if (!same_ring(pmf[x].ring(), ring)) throw Error(ErrorKind::VarMismatch, "pmf of outcome '" + outcomes[x] + "' uses another ring");
    total += pmf[x];
  }
  if (!(total == ParamSeries::constant(ring, Rational(1), total.theta_bound(), total.tau_bound())))
    throw Error(ErrorKind::InvalidModel, "pmf does not sum to 1: sum = " + total.to_string());
  ModelSpec m;
  m.name = std::move(name);
  m.kind = ModelKind::DiscretePolynomial;
  m.ring = std::move(ring);
  m.outcomes = std::move(outcomes);
  m.pmf = std::move(pmf);
  bool positive = true;
  for (const auto& q : true_probabilities(m.pmf)) positive = positive && q > 0;
  if (positive) m.space = ObservableSpace::finite(m.outcomes, true_probabilities(m.pmf));
  return m;
}

inline ModelSpec observable_model(std::string name, ObsSeries f) {
  if (!is_as_zero(f.space(), f.coefficient(Monomial{})))
    throw Error(ErrorKind::InvalidModel, "f(x|0,0) is not the zero observable");
  ModelSpec m;
  m.name = std::move(name);
  m.kind = ModelKind::ObservablePolynomial;
  m.ring = f.ring();
  m.space = f.space();
  m.f = std::move(f);
  return m;
}

inline const Space& model_space(const ModelSpec& model) {
  if (!model.space) {
    auto q = true_probabilities(model.pmf);
    for (std::size_t x = 0; x < q.size(); ++x)
      if (q[x] <= 0)
        throw Error(ErrorKind::DegenerateTruePoint, "outcome '" + model.outcomes[x] + "' has probability " + to_string(q[x]) +
                                                        " at the true point");
  }
  return model.space;
}

inline ObsSeries build_f_series(const ModelSpec& model, int theta_bound, int tau_bound) {
  const Space& space = model_space(model);
  if (model.kind == ModelKind::ObservablePolynomial) return model.f->truncated(theta_bound, tau_bound);
  std::vector<ParamSeries> comps;
  for (const auto& p : model.pmf) {
    ParamSeries pt = p.truncated(theta_bound, tau_bound);
    Rational q = pt.constant_term();
    ParamSeries u = pt.add_constant(-q) * (1 / q);
    comps.push_back(-log1p(u));
  }
  return ObsSeries(space, std::move(comps));
}

inline ParamSeries build_K_series(const ModelSpec& model, int theta_bound, int tau_bound) {
  return expectation(build_f_series(model, theta_bound, tau_bound));
}

struct RealizabilityReport {
  bool holds = true;
  std::string witness_outcome;
  std::string witness;
};

inline RealizabilityReport check_realizable_by_theta(const ModelSpec& model) {
  RealizabilityReport out;
  std::vector<std::size_t> thetas = theta_indices(*model.ring);
  if (model.kind == ModelKind::DiscretePolynomial) {
    for (std::size_t x = 0; x < model.pmf.size(); ++x) {
      ParamSeries r = restrict_to_zero(model.pmf[x], thetas);
      r = r.add_constant(-model.pmf[x].constant_term());
      if (!r.is_zero()) {
        out.holds = false;
        out.witness_outcome = model.outcomes[x];
        out.witness = r.to_string();
        return out;
      }
    }
    return out;
  }
  ObsSeries r = restrict_to_zero(*model.f, thetas);
  for (const auto& m : r.support()) {
    Observable c = r.coefficient(m);
    if (!is_as_zero(r.space(), c)) {
      out.holds = false;
      out.witness_outcome = ParamSeries(model.ring).monomial_string(m);
      out.witness = ObsSeries::from(c, ParamSeries::monomial(model.ring, m, Rational(1))).to_string();
      return out;
    }
  }
  return out;
}

inline Ring renamed_ring(const Ring& ring, const std::map<std::string, std::string>& renames) {
  VarSet vars = ring->vars();
  for (auto* group : {&vars.theta, &vars.tau})
    for (auto& n : *group) {
      auto it = renames.find(n);
      if (it != renames.end()) n = it->second;
    }
  for (const auto& [from, to] : renames) ring->require_index(from);
  return std::make_shared<const SeriesRing>(vars, ring->theta_weights(), ring->tau_weights());
}

// images are keyed by old variable names and expressed over renamed_ring(model.ring, renames)
inline ModelSpec reparameterize(const ModelSpec& model, const std::map<std::string, ParamSeries>& images,
                                const std::map<std::string, std::string>& renames = {}) {
  Ring target = renamed_ring(model.ring, renames);
  std::vector<ParamSeries> full = identity_images(target);
  for (const auto& [name, img] : images) {
    if (!same_ring(img.ring(), target)) throw Error(ErrorKind::VarMismatch, "image of '" + name + "' is not over the new ring");
    full[model.ring->require_index(name)] = img;
  }
  const std::size_t n = target->size();
  RationalMatrix jac(n, n, Rational(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Monomial m;
      m[j] = 1;
      auto it = full[i].terms().find(m);
      if (it != full[i].terms().end()) jac(i, j) = it->second;
    }
  if (determinant(jac) == 0) throw Error(ErrorKind::SingularJacobian, "linear part of the substitution is singular");
  ModelSpec out = model;
  out.ring = target;
  out.closed_form_k = nullptr;
  if (model.kind == ModelKind::DiscretePolynomial) {
    out.pmf.clear();
    for (const auto& p : model.pmf) out.pmf.push_back(substitute(p, target, full));
  } else {
    out.f = substitute(*model.f, target, full);
  }
  std::string note = "reparameterize:";
  for (const auto& [name, img] : images) {
    auto it = renames.find(name);
    note += " " + name + " = " + img.to_string();
    if (it != renames.end()) note += " (new variable " + it->second + ")";
    note += ";";
  }
  out.provenance.push_back(note);
  return out;
}

}  // namespace rlct
