#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rlct/compiled.hpp"
#include "rlct/error.hpp"
#include "rlct/model.hpp"
#include "rlct/obs_series.hpp"
#include "rlct/series.hpp"

namespace rlct {

using KFunction = std::function<double(const std::vector<double>&)>;

// K at a point from a closed form; never from a truncated series
inline KFunction exact_k_function(const ModelSpec& model) {
  if (model.closed_form_k) return model.closed_form_k;
  if (model.kind == ModelKind::DiscretePolynomial) {
    std::vector<CompiledPolynomial> compiled;
    std::vector<double> q;
    for (std::size_t x = 0; x < model.pmf.size(); ++x) {
      const ParamSeries& p = model.pmf[x];
      if (p.theta_bound() != kUnbounded || p.tau_bound() != kUnbounded)
        throw Error(ErrorKind::NoClosedForm, "pmf of outcome '" + model.outcomes[x] + "' is a truncated series");
      compiled.emplace_back(p);
      q.push_back(p.constant_term().get_d());
    }
    return [compiled, q](const std::vector<double>& point) { return discrete_kl(compiled, q, point); };
  }
  const ObsSeries& f = *model.f;
  if (f.theta_bound() != kUnbounded || f.tau_bound() != kUnbounded)
    throw Error(ErrorKind::NoClosedForm, "f is a truncated series and the model has no closed-form K");
  CompiledPolynomial k(expectation(f));
  return [k](const std::vector<double>& point) { return k(point); };
}

inline double eval_K_exact(const ModelSpec& model, const std::vector<double>& point) {
  if (point.size() != model.ring->size())
    throw Error(ErrorKind::Precondition, "point has " + std::to_string(point.size()) + " coordinates, model has " +
                                             std::to_string(model.ring->size()));
  return exact_k_function(model)(point);
}

inline double eval_K_exact(const ModelSpec& model, const std::vector<Rational>& point) {
  std::vector<double> x;
  for (const auto& c : point) x.push_back(c.get_d());
  return eval_K_exact(model, x);
}

struct VolumeConfig {
  std::vector<double> box;       // half-widths, one per variable
  std::vector<double> eps_grid;  // strictly decreasing
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 20240531;
  unsigned threads = 0;  // 0: hardware concurrency capped by RLCT_KIT_THREADS
  bool fit_multiplicity = false;
};

struct VolumeEstimate {
  std::vector<double> eps_grid;
  std::vector<std::uint64_t> hits;
  std::vector<double> volumes;
  std::vector<double> stderrs;
  double lambda_hat = 0;
  double slope_stderr = 0;
  double intercept = 0;
  std::optional<double> multiplicity_hat;
  std::uint64_t n_samples = 0;
  std::uint64_t out_of_domain = 0;
  std::uint64_t seed = 0;
  std::vector<double> box;

  double out_of_domain_fraction() const { return n_samples ? static_cast<double>(out_of_domain) / n_samples : 0.0; }

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "eps,volume,stderr,hits\n";
    for (std::size_t i = 0; i < eps_grid.size(); ++i)
      os << eps_grid[i] << ',' << volumes[i] << ',' << stderrs[i] << ',' << hits[i] << '\n';
    return os.str();
  }
};

// log-uniform, points_per_decade per decade, from hi down to lo inclusive
inline std::vector<double> log_grid(double hi, double lo, int points_per_decade = 8) {
  if (!(hi > lo) || !(lo > 0) || points_per_decade < 1)
    throw Error(ErrorKind::Precondition, "log_grid needs hi > lo > 0 and a positive density");
  const double decades = std::log10(hi / lo);
  const int steps = static_cast<int>(std::lround(decades * points_per_decade));
  std::vector<double> out;
  for (int i = 0; i <= steps; ++i) out.push_back(hi * std::pow(10.0, -decades * i / steps));
  return out;
}

inline std::vector<double> default_eps_grid() { return log_grid(1e-2, 1e-5, 8); }

// 0.2 in theta directions, 0.1 in tau directions
inline std::vector<double> default_box(const SeriesRing& ring) {
  std::vector<double> box(ring.size(), 0.2);
  for (std::size_t i = ring.d1(); i < ring.size(); ++i) box[i] = 0.1;
  return box;
}

inline unsigned oracle_threads(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RLCT_KIT_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

namespace detail {

struct LinearFit {
  std::vector<double> coef;
  std::vector<double> stderr_;
};

// weighted least squares with columns of x; the residual scale is estimated from the data
inline LinearFit weighted_least_squares(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                        const std::vector<double>& w) {
  const std::size_t n = y.size(), p = x.size();
  if (n <= p) throw Error(ErrorKind::InsufficientSamples, "too few grid points for the fit");
  std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
  std::vector<double> b(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < p; ++r) {
      b[r] += w[i] * x[r][i] * y[i];
      for (std::size_t c = 0; c < p; ++c) a[r][c] += w[i] * x[r][i] * x[c][i];
    }
  // invert the normal matrix by Gauss-Jordan
  std::vector<std::vector<double>> inv(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < p; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (a[piv][col] == 0) throw Error(ErrorKind::InsufficientSamples, "degenerate fit");
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < p; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < p; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  LinearFit out;
  out.coef.assign(p, 0.0);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) out.coef[r] += inv[r][c] * b[c];
  double chi2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0;
    for (std::size_t r = 0; r < p; ++r) fit += out.coef[r] * x[r][i];
    chi2 += w[i] * (y[i] - fit) * (y[i] - fit);
  }
  const double scale = std::max(1.0, chi2 / static_cast<double>(n - p));
  for (std::size_t r = 0; r < p; ++r) out.stderr_.push_back(std::sqrt(inv[r][r] * scale));
  return out;
}

constexpr std::size_t kStreams = 64;

struct SlopeFit {
  double intercept = 0;
  double slope = 0;
  double wls_stderr = 0;
  std::optional<double> multiplicity;
};

inline SlopeFit fit_slope(const std::vector<std::uint64_t>& hits, std::uint64_t n_samples, const std::vector<double>& eps,
                          bool fit_multiplicity) {
  const double n = static_cast<double>(n_samples);
  std::vector<double> lx, ly, w, ones, loglog;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    if (hits[e] == 0) continue;
    const double p = hits[e] / n;
    lx.push_back(std::log(eps[e]));
    ly.push_back(std::log(p));
    // var(log p) ~ (1-p)/(n p)
    w.push_back(p >= 1 ? n : n * p / (1 - p));
    ones.push_back(1.0);
    loglog.push_back(std::log(-std::log(eps[e])));
  }
  auto fit = weighted_least_squares({ones, lx}, ly, w);
  SlopeFit out{fit.coef[0], fit.coef[1], fit.stderr_[1], std::nullopt};
  if (fit_multiplicity) {
    // log V = c + lambda log eps + (mult - 1) log log(1/eps)
    auto fit2 = weighted_least_squares({ones, lx, loglog}, ly, w);
    out.multiplicity = fit2.coef[2] + 1;
  }
  return out;
}

}  // namespace detail

// V(eps) = Vol{K < eps}/Vol(box) by uniform sampling, then the slope of log V against log eps
inline VolumeEstimate estimate_lambda(const KFunction& k, const VolumeConfig& cfg) {
  const std::vector<double>& eps = cfg.eps_grid;
  if (eps.size() < 4) throw Error(ErrorKind::Precondition, "eps grid needs at least 4 points");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0)) throw Error(ErrorKind::Precondition, "eps values must be positive");
    if (i && !(eps[i] < eps[i - 1])) throw Error(ErrorKind::Precondition, "eps grid must be strictly decreasing");
  }
  if (cfg.box.empty()) throw Error(ErrorKind::Precondition, "box is empty");
  for (double h : cfg.box)
    if (!(h > 0)) throw Error(ErrorKind::Precondition, "box half-widths must be positive");
  if (cfg.n_samples == 0) throw Error(ErrorKind::Precondition, "need at least one sample");

  const std::size_t dim = cfg.box.size(), ne = eps.size();
  std::vector<std::vector<std::uint64_t>> stream_hits(detail::kStreams, std::vector<std::uint64_t>(ne, 0));
  std::vector<std::uint64_t> stream_ood(detail::kStreams, 0);

  auto run_stream = [&](std::size_t s) {
    const std::uint64_t count = cfg.n_samples / detail::kStreams + (s < cfg.n_samples % detail::kStreams ? 1 : 0);
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 gen(seq);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> x(dim);
    auto& hits = stream_hits[s];
    for (std::uint64_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < dim; ++j) x[j] = cfg.box[j] * unif(gen);
      double v;
      try {
        v = k(x);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::OutOfDomain) throw;
        ++stream_ood[s];
        continue;
      }
      for (std::size_t e = 0; e < ne && v < eps[e]; ++e) ++hits[e];
    }
  };

  const unsigned nthreads = std::min<unsigned>(oracle_threads(cfg.threads), detail::kStreams);
  if (nthreads <= 1) {
    for (std::size_t s = 0; s < detail::kStreams; ++s) run_stream(s);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (unsigned t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t s = t; s < detail::kStreams; s += nthreads) run_stream(s);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  VolumeEstimate out;
  out.eps_grid = eps;
  out.n_samples = cfg.n_samples;
  out.seed = cfg.seed;
  out.box = cfg.box;
  out.hits.assign(ne, 0);
  for (std::size_t s = 0; s < detail::kStreams; ++s) {
    out.out_of_domain += stream_ood[s];
    for (std::size_t e = 0; e < ne; ++e) out.hits[e] += stream_hits[s][e];
  }
  if (out.hits.back() == 0)
    throw Error(ErrorKind::InsufficientSamples, "no sample has K < " + std::to_string(eps.back()) +
                                                    "; increase the sample count or the smallest eps");
  const double n = static_cast<double>(cfg.n_samples);
  for (std::size_t e = 0; e < ne; ++e) {
    const double p = out.hits[e] / n;
    out.volumes.push_back(p);
    out.stderrs.push_back(std::sqrt(p * (1 - p) / n));
  }
  auto full = detail::fit_slope(out.hits, cfg.n_samples, eps, cfg.fit_multiplicity);
  out.intercept = full.intercept;
  out.lambda_hat = full.slope;
  out.multiplicity_hat = full.multiplicity;

  // delete-one-stream jackknife; the nested counts are correlated across eps
  std::vector<double> loo;
  for (std::size_t s = 0; s < detail::kStreams; ++s) {
    std::vector<std::uint64_t> h(ne);
    for (std::size_t e = 0; e < ne; ++e) h[e] = out.hits[e] - stream_hits[s][e];
    const std::uint64_t count = cfg.n_samples / detail::kStreams + (s < cfg.n_samples % detail::kStreams ? 1 : 0);
    if (h.back() == 0 || count == cfg.n_samples) continue;
    loo.push_back(detail::fit_slope(h, cfg.n_samples - count, eps, false).slope);
  }
  if (loo.size() >= 2) {
    double mean = 0, ss = 0;
    for (double v : loo) mean += v;
    mean /= static_cast<double>(loo.size());
    for (double v : loo) ss += (v - mean) * (v - mean);
    const double g = static_cast<double>(loo.size());
    out.slope_stderr = std::sqrt((g - 1) / g * ss);
  } else {
    out.slope_stderr = full.wls_stderr;
  }
  return out;
}

inline VolumeEstimate estimate_lambda(const ModelSpec& model, VolumeConfig cfg) {
  if (cfg.box.empty()) cfg.box = default_box(*model.ring);
  if (cfg.eps_grid.empty()) cfg.eps_grid = default_eps_grid();
  if (cfg.box.size() != model.ring->size())
    throw Error(ErrorKind::Precondition, "box has " + std::to_string(cfg.box.size()) + " half-widths, model has " +
                                             std::to_string(model.ring->size()) + " variables");
  return estimate_lambda(exact_k_function(model), cfg);
}

}  // namespace rlct
