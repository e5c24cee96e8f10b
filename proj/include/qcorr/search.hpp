#pragma once

// Derivative-free extremization of inequality slack over pure states.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <cmath>
#include <exception>
#include <limits>
#include <memory>

#include "qcorr/laws.hpp"

namespace qcorr {

enum class Direction { Min, Max };

struct SearchSettings {
  Direction direction = Direction::Min;
  int budget = 200;  // slack evaluations
  double initial_step = 0.1;
  double tolerance = 0.0;
};

struct SearchResult {
  PureState best;
  EvalReport report;  // at `best`
  EvalReport start_report;
  int evaluations = 0;
};

namespace search_detail {

struct Context {
  const LawSpec* law;
  const Dims* dims;
  const OptimizerConfig* cfg;
  double tol;
  double sign;
  int budget;
  int evaluations = 0;
  double best_value = std::numeric_limits<double>::infinity();
  Vector best_amp{};
  std::exception_ptr error{};
};

inline Vector amplitudes_of(const gsl_vector* x) {
  const std::size_t n = x->size / 2;
  Vector amp(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    amp(static_cast<Eigen::Index>(i)) = cplx(gsl_vector_get(x, 2 * i), gsl_vector_get(x, 2 * i + 1));
  return amp;
}

inline double objective(const gsl_vector* x, void* params) {
  auto& ctx = *static_cast<Context*>(params);
  if (ctx.error || ctx.evaluations >= ctx.budget) return GSL_POSINF;
  const Vector amp = amplitudes_of(x);
  if (amp.norm() < 1e-8) return GSL_POSINF;
  ++ctx.evaluations;
  try {
    const PureState psi = PureState::normalized(*ctx.dims, amp);
    const double v = ctx.sign * evaluate(*ctx.law, psi, *ctx.cfg, ctx.tol).slack;
    if (v < ctx.best_value) {
      ctx.best_value = v;
      ctx.best_amp = psi.amplitudes();
    }
    return v;
  } catch (...) {
    ctx.error = std::current_exception();
    return GSL_POSINF;
  }
}

}  // namespace search_detail

/// Nelder-Mead (GSL nmsimplex2) over the real and imaginary parts of the
/// amplitudes, normalized on every evaluation. Deterministic for a fixed
/// start state and optimizer seed.
inline SearchResult search_slack(const LawSpec& law, const PureState& start, const OptimizerConfig& cfg,
                                 const SearchSettings& settings, const std::string& state_id = "search") {
  if (law.relation == Relation::Eq) throw std::invalid_argument(law.name + " is an equality; search needs Ge or Le");
  if (settings.budget < 1) throw std::invalid_argument("search budget must be positive");
  const double tol = settings.tolerance > 0.0 ? settings.tolerance : default_tolerance(law);

  SearchResult res{start, evaluate(law, start, cfg, tol, state_id), {}, 1};
  res.start_report = res.report;

  search_detail::Context ctx{&law, &start.dims(), &cfg, tol, settings.direction == Direction::Min ? 1.0 : -1.0,
                             settings.budget - 1};
  ctx.best_value = ctx.sign * res.report.slack;
  ctx.best_amp = start.amplitudes();

  const std::size_t n = 2 * static_cast<std::size_t>(start.dim());
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(n), gsl_vector_free);
  for (int i = 0; i < start.dim(); ++i) {
    gsl_vector_set(x.get(), 2 * i, start.amplitudes()(i).real());
    gsl_vector_set(x.get(), 2 * i + 1, start.amplitudes()(i).imag());
  }
  gsl_vector_set_all(step.get(), settings.initial_step);

  if (ctx.budget > 0) {
    // Budget exhaustion surfaces as a non-finite value; report it as a status, not an abort.
    gsl_error_handler_t* previous = gsl_set_error_handler_off();
    gsl_multimin_function fn{&search_detail::objective, n, &ctx};
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), gsl_multimin_fminimizer_free);
    const bool started = gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get()) == GSL_SUCCESS;
    while (started && !ctx.error && ctx.evaluations < ctx.budget) {
      if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-7) == GSL_SUCCESS) break;
    }
    gsl_set_error_handler(previous);
  }
  if (ctx.error) std::rethrow_exception(ctx.error);

  res.evaluations = 1 + ctx.evaluations;
  res.best = PureState::normalized(start.dims(), ctx.best_amp);
  res.report = evaluate(law, res.best, cfg, tol, state_id);
  return res;
}

}  // namespace qcorr
