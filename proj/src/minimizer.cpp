#include "revhls/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

#include "revhls/zones.hpp"

namespace revhls {

std::string to_string(Problem p) {
  switch (p) {
    case Problem::zone2: return "zone2";
    case Problem::zone3: return "zone3";
    case Problem::rescaled: return "rescaled";
  }
  return "?";
}

std::string to_string(SolverMethod m) {
  return m == SolverMethod::fixed_point ? "fixed_point" : "exponentiated_gradient";
}

void SolverConfig::validate() const {
  if (max_iters == 0) throw std::invalid_argument("SolverConfig: max_iters must be > 0");
  if (!(el_tolerance > 0.0)) throw std::invalid_argument("SolverConfig: el_tolerance must be > 0");
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw std::invalid_argument("SolverConfig: target_fraction must be in (0, 1]");
  }
  if (!(initial_atom >= 0.0 && initial_atom < 1.0)) {
    throw std::invalid_argument("SolverConfig: initial_atom must be in [0, 1)");
  }
  if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("SolverConfig: armijo must be in (0, 1)");
  if (!(leak_fraction > 0.0 && leak_fraction < 1.0) || !(leak_threshold > 0.0)) {
    throw std::invalid_argument("SolverConfig: bad leak monitor settings");
  }
  if (grid.points < 2 || !(grid.r_min > 0.0) || !(grid.r_max > grid.r_min)) {
    throw std::invalid_argument("SolverConfig: bad grid");
  }
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Everything about a problem on one grid that does not change while iterating.
struct Setup {
  Problem problem;
  Params p;
  std::vector<double> edges;
  std::vector<double> vol;
  std::vector<double> ext;  // external potential per annulus
  std::shared_ptr<const InteractionOperator> op;
  bool atom_allowed = false;
  bool rescaled = false;

  std::size_t n() const { return vol.size(); }
  std::span<const double> means() const { return op->power_means(); }
};

Setup make_setup(Problem problem, const Params& p, std::span<const double> edges) {
  Setup s;
  s.problem = problem;
  s.p = p;
  s.edges.assign(edges.begin(), edges.end());
  const std::size_t n = edges.size() - 1;
  s.vol.resize(n);
  s.ext.assign(n, 0.0);
  s.rescaled = problem == Problem::rescaled;
  for (std::size_t i = 0; i < n; ++i) {
    s.vol[i] = annulus_volume(p.d, edges[i], edges[i + 1]);
    if (s.rescaled) s.ext[i] = 0.5 * annulus_power_mean(p.d, edges[i], edges[i + 1], 2.0);
  }
  s.op = shared_operator(edges, p.d, p.k);
  s.atom_allowed = p.m < 1.0;
  return s;
}

double entropy_part(const Setup& s, std::span<const double> w) {
  const double m = s.p.m;
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) sum += std::pow(w[i], m) * std::pow(s.vol[i], 1.0 - m);
  }
  return sum / (m - 1.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Entropic gradient m/(m-1) rho^{m-1}; -inf for empty annuli when m < 1.
double entropy_gradient(const Setup& s, double w, std::size_t i) {
  const double m = s.p.m;
  if (w <= 0.0) return m < 1.0 ? -inf : 0.0;
  return m / (m - 1.0) * std::pow(w / s.vol[i], m - 1.0);
}

struct Fields {
  std::vector<double> v;  // potential part of g
  std::vector<double> g;  // full first variation
  double g0 = 0.0;        // at the origin
};

Fields fields(const Setup& s, std::span<const double> w, double atom, std::span<const double> gw) {
  Fields f;
  const double k = s.p.k;
  const auto mk = s.means();
  f.v.resize(s.n());
  f.g.resize(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) {
    f.v[i] = (gw[i] + atom * mk[i]) / k + s.ext[i];
    f.g[i] = entropy_gradient(s, w[i], i) + f.v[i];
  }
  f.g0 = dot(w, mk) / k;
  return f;
}

ELReport residual_from_fields(const Setup& s, std::span<const double> w, double atom, const Fields& f,
                              double tol) {
  ELReport r;
  if (atom > 0.0 && s.p.m > 1.0) {
    r.residual = inf;
    r.exterior_ok = false;
    return r;
  }
  const double a = 1.0 - atom;
  if (atom > 0.0) {
    r.atom_case = true;
    r.constant = a * f.g0;
    double worst = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
      if (w[i] > 0.0) worst = std::max(worst, std::abs(a * f.g[i] - r.constant));
    }
    r.residual = worst / (1.0 + std::abs(r.constant));
    return r;
  }
  double mass = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (w[i] > 0.0) {
      mass += w[i];
      weighted += w[i] * f.g[i];
    }
  }
  if (!(mass > 0.0)) {
    r.residual = inf;
    r.exterior_ok = false;
    return r;
  }
  r.constant = weighted / mass;
  double worst = 0.0;
  const double slack = tol * (1.0 + std::abs(r.constant));
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (w[i] > 0.0) {
      worst = std::max(worst, std::abs(f.g[i] - r.constant));
    } else if (f.g[i] < r.constant - slack) {
      r.exterior_ok = false;
    }
  }
  if (s.atom_allowed && f.g0 < r.constant - slack) r.exterior_ok = false;
  r.residual = worst / (1.0 + std::abs(r.constant));
  return r;
}

// Bracketed root of an increasing function h on the real line, starting at x0.
double solve_increasing(const std::function<double(double)>& h, double x0) {
  double lo = x0;
  double hi = x0;
  double step = 1.0;
  if (h(x0) < 0.0) {
    do {
      lo = hi;
      hi += step;
      step *= 2.0;
      if (step > 1e6) throw std::runtime_error("solver: could not bracket the multiplier");
    } while (h(hi) < 0.0);
  } else {
    do {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (step > 1e6) throw std::runtime_error("solver: could not bracket the multiplier");
    } while (h(lo) > 0.0);
  }
  std::uintmax_t iters = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(
      h, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

struct Proposal {
  std::vector<double> w;
  double atom = 0.0;
};

// Exact minimizer of E(rho) + <v, rho> (+ g0 * atom) over probability
// measures: the EL system with the potential held fixed.
Proposal fixed_point_map(const Setup& s, const Fields& f) {
  const double m = s.p.m;
  const std::size_t n = s.n();
  Proposal out;
  out.w.resize(n);
  const double vmin = *std::min_element(f.v.begin(), f.v.end());
  if (m < 1.0) {
    const double c = (1.0 - m) / m;
    const double e = -1.0 / (1.0 - m);
    auto fill = [&](double lambda) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        out.w[i] = s.vol[i] * std::pow(c * (f.v[i] - lambda), e);
        total += out.w[i];
      }
      return total;
    };
    if (s.atom_allowed && f.g0 < vmin) {
      const double mass = fill(f.g0);
      if (mass <= 1.0) {
        out.atom = 1.0 - mass;
        return out;
      }
    }
    // lambda = vmin - exp(x); log-mass decreases in x.
    auto h = [&](double x) { return -std::log(fill(vmin - std::exp(x))); };
    const double x = solve_increasing(h, std::log(1.0 + std::abs(vmin)));
    const double mass = fill(vmin - std::exp(x));
    for (double& w : out.w) w /= mass;
    return out;
  }
  const double c = (m - 1.0) / m;
  const double e = 1.0 / (m - 1.0);
  auto fill = [&](double lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = lambda - f.v[i];
      out.w[i] = gap > 0.0 ? s.vol[i] * std::pow(c * gap, e) : 0.0;
      total += out.w[i];
    }
    return total;
  };
  auto h = [&](double x) { return std::log(fill(vmin + std::exp(x))); };
  const double x = solve_increasing(h, 0.0);
  const double mass = fill(vmin + std::exp(x));
  for (double& w : out.w) w /= mass;
  return out;
}

struct State {
  std::vector<double> w;
  double atom = 0.0;
  std::vector<double> gw;  // G w
  double energy = 0.0;
};

double total_energy(const Setup& s, std::span<const double> w, double atom, std::span<const double> gw) {
  const double inter = dot(w, gw) + 2.0 * atom * dot(w, s.means());
  return entropy_part(s, w) + inter / (2.0 * s.p.k) + dot(w, s.ext);
}

void refresh(const Setup& s, State& st) {
  st.gw.assign(s.n(), 0.0);
  s.op->potential(st.w, 0.0, st.gw);
  st.energy = total_energy(s, st.w, st.atom, st.gw);
}

State initial_state(const Setup& s, const SolverConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  std::uniform_real_distribution<double> tail(2.0, 4.0);
  const double sigma = scale(rng);
  const double q = tail(rng);
  State st;
  st.w.resize(s.n());
  const int d = s.p.d;
  double total = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double r = 0.5 * (s.edges[i] + s.edges[i + 1]) / sigma;
    st.w[i] = s.vol[i] * std::pow(1.0 + r * r, -0.5 * (d + q));
    total += st.w[i];
  }
  st.atom = s.atom_allowed && s.problem != Problem::zone3 ? cfg.initial_atom : 0.0;
  for (double& w : st.w) w *= (1.0 - st.atom) / total;
  refresh(s, st);
  return st;
}

struct LineSearch {
  double step = 0.0;
  bool ok = false;
};

// Armijo backtracking along w + t (target - w); the quadratic part is exact in t.
LineSearch damped_step(const Setup& s, State& st, const Proposal& target, std::span<const double> g,
                       double g0, double armijo) {
  const std::size_t n = s.n();
  std::vector<double> dir(n);
  for (std::size_t i = 0; i < n; ++i) dir[i] = target.w[i] - st.w[i];
  const double datom = target.atom - st.atom;
  // Directions carry no mass, so g may be centred first; this avoids
  // cancellation between large far-field values.
  double centre = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (st.w[i] > 0.0 && std::isfinite(g[i])) {
      centre += st.w[i] * g[i];
      mass += st.w[i];
    }
  }
  centre = mass > 0.0 ? centre / mass : 0.0;
  double slope = (g0 - centre) * datom;
  for (std::size_t i = 0; i < n; ++i) {
    if (dir[i] != 0.0 && std::isfinite(g[i])) slope += (g[i] - centre) * dir[i];
  }
  if (!(slope < 0.0)) return {};
  std::vector<double> gt(n);
  s.op->potential(target.w, 0.0, gt);
  std::vector<double> gd(n);
  for (std::size_t i = 0; i < n; ++i) gd[i] = gt[i] - st.gw[i];
  const auto mk = s.means();
  const double wgw = dot(st.w, st.gw);
  const double wgd = dot(st.w, gd);
  const double dgd = dot(dir, gd);
  const double mw = dot(mk, st.w);
  const double md = dot(mk, dir);
  const double uw = dot(s.ext, st.w);
  const double ud = dot(s.ext, dir);
  const double k2 = 2.0 * s.p.k;
  // Accepted steps may raise F by at most this much (rounding in the sums).
  constexpr double noise = 1e-12;
  std::vector<double> trial(n);
  for (double t = 1.0; t > 1e-12; t *= 0.5) {
    // Convex combination keeps tiny far-field masses exact at t = 1.
    for (std::size_t i = 0; i < n; ++i) trial[i] = (1.0 - t) * st.w[i] + t * target.w[i];
    const double atom = (1.0 - t) * st.atom + t * target.atom;
    const double inter = wgw + 2.0 * t * wgd + t * t * dgd + 2.0 * atom * (mw + t * md);
    const double e = entropy_part(s, trial) + inter / k2 + uw + t * ud;
    if (e <= st.energy + armijo * t * slope + noise) {
      st.w.swap(trial);
      st.atom = atom;
      for (std::size_t i = 0; i < n; ++i) st.gw[i] += t * gd[i];
      st.energy = e;
      return {t, true};
    }
  }
  return {};
}

LineSearch multiplicative_step(const Setup& s, State& st, const Fields& f, double& eta, double armijo) {
  const std::size_t n = s.n();
  // Centre the field on the mass-weighted mean so the step is a pure redistribution.
  double centre = f.g0 * st.atom;
  for (std::size_t i = 0; i < n; ++i) {
    if (st.w[i] > 0.0) centre += st.w[i] * f.g[i];
  }
  double spread = s.atom_allowed ? st.atom * (f.g0 - centre) * (f.g0 - centre) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (st.w[i] > 0.0) spread += st.w[i] * (f.g[i] - centre) * (f.g[i] - centre);
  }
  // Nearly empty cells with m < 1 carry fields of order w^{m-1}; clipping keeps
  // the exponent finite. A monotone clip still gives a descent direction.
  const double clip = std::max(1.0, 10.0 * std::sqrt(spread));
  auto h = [&](double g) { return std::clamp(g - centre, -clip, clip); };
  double slope = s.atom_allowed ? -st.atom * (f.g0 - centre) * h(f.g0) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (st.w[i] > 0.0) slope -= st.w[i] * (f.g[i] - centre) * h(f.g[i]);
  }
  if (!(slope < 0.0) || !std::isfinite(slope)) return {};
  State trial = st;
  for (double t = std::min(1e3, 2.0 * eta); t > 1e-14; t *= 0.5) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trial.w[i] = st.w[i] > 0.0 ? std::max(st.w[i] * std::exp(-t * h(f.g[i])), 1e-300) : 0.0;
      total += trial.w[i];
    }
    trial.atom = s.atom_allowed ? st.atom * std::exp(-t * h(f.g0)) : 0.0;
    // Multiplicative updates never reach zero; drop an atom that is negligible
    // and still being pushed out.
    if (trial.atom < 1e-13 && f.g0 > centre) trial.atom = 0.0;
    total += trial.atom;
    if (!std::isfinite(total) || !(total > 0.0)) continue;
    for (double& x : trial.w) x /= total;
    trial.atom /= total;
    refresh(s, trial);
    if (trial.energy <= st.energy + armijo * t * slope) {
      st = std::move(trial);
      eta = t;
      return {t, true};
    }
  }
  return {};
}

double outer_mass(std::span<const double> w, double fraction) {
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(w.size())));
  double mass = 0.0;
  for (std::size_t i = w.size() - std::min(count, w.size()); i < w.size(); ++i) mass += w[i];
  return mass;
}

MinimizerResult run_once(const Setup& s, const SolverConfig& cfg) {
  MinimizerResult res;
  res.problem = s.problem;
  res.params = s.p;
  res.seed = cfg.seed;
  State st = initial_state(s, cfg);
  const double target = cfg.el_tolerance * cfg.target_fraction;
  double eta = 1.0;
  ELReport el;
  std::size_t it = 0;
  // The residual has a rounding floor of about eps * max V; stop once it
  // stops improving.
  constexpr std::size_t patience = 200;
  double best = inf;
  std::size_t best_iter = 0;
  for (;; ++it) {
    if (it % 64 == 0) refresh(s, st);
    const Fields f = fields(s, st.w, st.atom, st.gw);
    el = residual_from_fields(s, st.w, st.atom, f, cfg.el_tolerance);
    if (el.residual < 0.5 * best) {
      best = el.residual;
      best_iter = it;
    }
    IterationRecord rec{it, st.energy, el.residual, 0.0};
    if (el.residual <= target || it >= cfg.max_iters || it - best_iter > patience) {
      res.log.push_back(rec);
      break;
    }
    LineSearch ls;
    if (cfg.method == SolverMethod::fixed_point) {
      ls = damped_step(s, st, fixed_point_map(s, f), f.g, f.g0, cfg.armijo);
    } else {
      ls = multiplicative_step(s, st, f, eta, cfg.armijo);
    }
    rec.step = ls.step;
    res.log.push_back(rec);
    if (!ls.ok) break;
  }
  refresh(s, st);
  el = residual_from_fields(s, st.w, st.atom, fields(s, st.w, st.atom, st.gw), cfg.el_tolerance);
  res.density = RadialDensity::from_masses(s.p.d, st.atom, s.edges, st.w);
  res.report = free_energy(res.density, s.p, *s.op);
  res.atom_a = 1.0 - st.atom;
  res.el_residual = el.residual;
  res.el_exterior_ok = el.exterior_ok;
  res.el_constant = el.constant;
  res.iterations = it;
  res.converged = el.residual <= cfg.el_tolerance && el.exterior_ok;
  for (std::size_t i = s.n(); i-- > 0;) {
    if (st.w[i] > 0.0) {
      res.support_radius = s.edges[i + 1];
      break;
    }
  }
  const VirialDefects vd = virial_check(res.density, s.p, s.rescaled);
  res.virial_defect_r = vd.r;
  res.virial_defect_a = vd.a;
  return res;
}

}  // namespace

MinimizerResult minimize(Problem problem, const Params& p, const SolverConfig& cfg) {
  p.validate();
  cfg.validate();
  switch (problem) {
    case Problem::zone2:
      if (!in_zone2(p.m, p.k, p.d)) throw ZoneError("minimize_zone2: parameters outside Zone II");
      break;
    case Problem::zone3:
      if (!in_zone3(p.m)) throw ZoneError("minimize_zone3: requires m > 1");
      break;
    case Problem::rescaled:
      if (!(p.m > p.d / (p.d + 2.0) && p.m < 1.0)) {
        throw ZoneError("minimize_rescaled: requires d/(d+2) < m < 1");
      }
      break;
  }
  GridSpec grid = cfg.grid;
  MinimizerResult res;
  for (std::size_t attempt = 0;; ++attempt) {
    const Setup s = make_setup(problem, p, geometric_edges(grid));
    res = run_once(s, cfg);
    res.grid = grid;
    res.restarts = attempt;
    const auto w = res.density.masses();
    if (outer_mass(w, cfg.leak_fraction) <= cfg.leak_threshold || attempt >= cfg.max_restarts) break;
    grid.r_max *= 2.0;
  }
  return res;
}

MinimizerResult minimize_zone2(const Params& p, const SolverConfig& cfg) {
  return minimize(Problem::zone2, p, cfg);
}

MinimizerResult minimize_zone3(const Params& p, const SolverConfig& cfg) {
  return minimize(Problem::zone3, p, cfg);
}

MinimizerResult minimize_rescaled(const Params& p, const SolverConfig& cfg) {
  return minimize(Problem::rescaled, p, cfg);
}

ELReport el_residual(const RadialDensity& rho, const Params& p, bool rescaled, const InteractionOperator& op) {
  p.validate();
  if (p.m == 1.0) throw std::invalid_argument("el_residual: m = 1 is not supported");
  if (!op.matches(rho) || op.exponent() != p.k) {
    throw std::invalid_argument("el_residual: operator built for another grid");
  }
  Setup s;
  s.problem = rescaled ? Problem::rescaled : (p.m > 1.0 ? Problem::zone3 : Problem::zone2);
  s.p = p;
  s.edges.assign(rho.edges().begin(), rho.edges().end());
  s.vol = rho.volumes();
  s.ext.assign(rho.size(), 0.0);
  s.rescaled = rescaled;
  if (rescaled) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
      s.ext[i] = 0.5 * annulus_power_mean(p.d, s.edges[i], s.edges[i + 1], 2.0);
    }
  }
  s.op = std::shared_ptr<const InteractionOperator>(&op, [](const InteractionOperator*) {});
  s.atom_allowed = p.m < 1.0;
  const auto w = rho.masses();
  std::vector<double> gw(rho.size());
  op.potential(w, 0.0, gw);
  return residual_from_fields(s, w, rho.atom(), fields(s, w, rho.atom(), gw), 1e-6);
}

ELReport el_residual(const RadialDensity& rho, const Params& p, bool rescaled) {
  p.validate();
  if (rho.dim() != p.d) throw std::invalid_argument("el_residual: dimension mismatch");
  return el_residual(rho, p, rescaled, *shared_operator(rho.edges(), rho.dim(), p.k));
}

VirialDefects virial_check(const RadialDensity& rho, const Params& p, bool rescaled) {
  const EnergyReport rep = free_energy(rho, p);
  const double alpha = p.entropy_scaling();
  VirialDefects out;
  double num = alpha * rep.entropy + 0.5 * rep.interaction;
  double den = std::abs(rep.entropy) + std::abs(rep.interaction);
  if (rescaled) {
    num += rep.moment_2;
    den += rep.moment_2;
  }
  out.r = std::abs(num) / den;

  // Mass variation a -> a + da of the a.c. part, the atom taking up the rest.
  const RadialDensity ac = rho.with_atom(0.0);
  const double a = 1.0 - rho.atom();
  const double i_ac = interaction(ac, p);
  const double j_ac = rep.moment_k;
  const double k = p.k;
  double num_a = p.m * k * rep.entropy + i_ac + (1.0 - 2.0 * a) * j_ac;
  double den_a = k * std::abs(rep.entropy) + std::abs(i_ac) + std::abs((1.0 - 2.0 * a) * j_ac);
  if (rescaled) {
    num_a += 0.5 * k * rep.moment_2;
    den_a += 0.5 * k * rep.moment_2;
  }
  out.a = den_a > 0.0 ? std::abs(num_a) / den_a : 0.0;
  return out;
}

VirialDefects virial_check(const MinimizerResult& res) {
  return virial_check(res.density, res.params, res.problem == Problem::rescaled);
}

BoundCertificate lower_bound_profile_check(const MinimizerResult& res) {
  const Params& p = res.params;
  BoundCertificate c;
  c.kind = CertificateKind::pointwise;
  c.params = p;
  c.constant = -std::min(2.0, p.k) / (1.0 - p.m) + 0.1;
  c.tolerance = 0.0;
  const RadialDensity& rho = res.density;
  if (rho.atom() <= 0.0 || p.m >= 1.0) {
    // No atom: nothing to certify.
    c.lhs = c.constant;
    c.slack = 0.0;
    return c;
  }
  const auto e = rho.edges();
  const auto v = rho.values();
  const std::size_t last = std::max<std::size_t>(3, rho.size() / 5);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 1; i < std::min(last, rho.size()); ++i) {
    if (!(v[i] > 0.0)) continue;
    const double x = 0.5 * (std::log(e[i]) + std::log(e[i + 1]));
    const double y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("lower_bound_profile_check: too few charged annuli");
  const double nn = static_cast<double>(count);
  c.lhs = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  c.slack = c.constant - c.lhs;
  return c;
}

}  // namespace revhls
