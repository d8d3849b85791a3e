#include "resonance/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/roots.hpp>
#include <iomanip>
#include <numbers>
#include <thread>

namespace resonance {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unwrap_near(double value, double reference) {
  return value + kTwoPi * std::round((reference - value) / kTwoPi);
}

// Tracks (r, phi, psi) along a path with psi kept continuous.
struct PolarTracker {
  const PerturbedSystem& sys;
  double ratio;
  bool have = false;
  double psi = 0.0;

  PolarTracker(const PerturbedSystem& s) : sys(s) {
    ratio = static_cast<double>(s.resonance().kappa) / s.resonance().varkappa;
  }

  ActionAngle update(const Eigen::Vector2d& x, double t, double& psi_out) {
    const ActionAngle aa = sys.to_polar(x);
    double p = aa.phi - ratio * sys.S(t);
    if (have && sys.simulation_chart() == Chart::Cartesian) p = unwrap_near(p, psi);
    psi = p;
    have = true;
    psi_out = p;
    return aa;
  }
};

}  // namespace

SamplePath integrate_sde(const PerturbedSystem& sys, const Eigen::Vector2d& init, double t0, double T, double dt,
                         const NoiseStream& stream, int record_every) {
  if (sys.escaped(init)) throw DomainError("integrate_sde: initial state outside the well");
  if (record_every < 1) record_every = 1;
  SamplePath path;
  PolarTracker tracker(sys);
  Eigen::Vector2d x = init;
  const auto steps = static_cast<std::uint64_t>(std::ceil((T - t0) / dt - 1e-9));

  auto record = [&](double t, const Eigen::Vector2d& s) {
    double psi = 0.0;
    const ActionAngle aa = tracker.update(s, t, psi);
    path.t.push_back(t);
    path.state.push_back(s);
    path.r.push_back(aa.r);
    path.phi.push_back(aa.phi);
    path.psi.push_back(psi);
  };

  euler_maruyama(
      x, t0, T, dt, [&](const Eigen::Vector2d& s, double t) { return sys.drift(s, t); },
      [&](const Eigen::Vector2d& s, double t) { return sys.diffusion(s, t); },
      [&](std::uint64_t i, double h) { return stream.increment(i, h); },
      [&](const Eigen::Vector2d& s, double t) {
        if (!sys.escaped(s)) return false;
        path.escaped = true;
        path.escape_time = t;
        return true;
      },
      [&](std::uint64_t i, double t, const Eigen::Vector2d& s) {
        const bool last = i == steps;
        if (sys.escaped(s)) {
          if (!path.escaped) {
            path.escaped = true;
            path.escape_time = t;
          }
          return;
        }
        if (i % static_cast<std::uint64_t>(record_every) == 0 || last) record(t, s);
      });
  return path;
}

double resonance_metric(const AveragedSystem& avg, const ParticularSolution& ps, double rho, double psi, double t) {
  const double mu = avg.envelope.mu(t);
  const double d_rho = rho - ps.rho_star(mu);
  const double d_psi = psi - ps.psi_star(mu);
  return std::sqrt(d_rho * d_rho * std::pow(mu, -(avg.n - 1)) + d_psi * d_psi);
}

Horizon t_epsilon(const DecayEnvelope& env, int p, int n, double eps, double l, double t_star) {
  if (!(l > 0.0 && l < 1.0)) throw DomainError("t_epsilon: l must lie in (0, 1)");
  if (!(eps > 0.0)) throw DomainError("t_epsilon: eps must be positive");
  const int h = 2 * p - n;
  if (h < 0) throw DomainError("t_epsilon: requires 2p >= n");
  if (!zeta_divergent(env, h)) return {HorizonKind::Infinite, std::numeric_limits<double>::infinity()};
  const double target = std::pow(eps, -2.0 * (1.0 - l));
  if (h == 0) return {HorizonKind::TEpsilon, target};
  auto excess = [&](double T) { return zeta(env, h, t_star, t_star + T).value - target; };
  double lo = 0.0, hi = 1.0;
  while (excess(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalFailure("t_epsilon: no bracket");
  }
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-10 * std::abs(b); };
  const auto root = boost::math::tools::bisect(excess, lo, hi, tol);
  return {HorizonKind::TEpsilon, 0.5 * (root.first + root.second)};
}

std::pair<double, double> wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double nn = trials;
  const double p = successes / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

PathOutcome simulate_capture_path(const PerturbedSystem& sys, const AveragedSystem& avg, const ParticularSolution& ps,
                                  const CaptureOptions& opt, double dt, double horizon, std::uint64_t index,
                                  PathRecord* rec) {
  const NoiseStream stream(opt.seed, index);
  const double ts = opt.t_star;
  const double mu_s = avg.envelope.mu(ts);
  const double ratio = static_cast<double>(avg.kappa) / avg.varkappa;

  const Eigen::Vector2d u = stream.uniforms(NoiseStream::kInitStep);
  const double radius = opt.boundary ? opt.delta1 : opt.delta1 * std::sqrt(u(0));
  const double angle = kTwoPi * u(1);
  double rho = ps.rho_star(mu_s) + radius * std::cos(angle) * std::pow(mu_s, 0.5 * (avg.n - 1));
  double psi = ps.psi_star(mu_s) + radius * std::sin(angle);
  if (opt.near_identity) {
    const Eigen::Vector2d RP = avg.near_identity_inverse(rho, psi, sys.S(ts), ts);
    rho = RP(0);
    psi = RP(1);
  }
  const double r_init = avg.r0 + std::sqrt(mu_s) * rho;

  PathOutcome out;
  const bool inside = std::abs(r_init) < 0.98 * sys.r_bound();
  Eigen::Vector2d x = inside ? sys.from_polar(r_init, ratio * sys.S(ts) + psi) : Eigen::Vector2d::Zero();
  if (!inside || sys.escaped(x)) {
    out.escaped = true;
    out.escape_time = ts;
    out.sup_metric = std::numeric_limits<double>::infinity();
    return out;
  }

  const auto every = static_cast<std::uint64_t>(std::max(1, opt.monitor_every));
  const auto rec_every = static_cast<std::uint64_t>(std::max(1, opt.record_every));
  double psi_prev = psi;
  bool exited = false;

  auto measure = [&](const Eigen::Vector2d& s, double t, double& r, double& phi, double& psi_out) {
    const ActionAngle aa = sys.to_polar(s);
    const double S = sys.S(t);
    double p = aa.phi - ratio * S;
    if (sys.simulation_chart() == Chart::Cartesian) p = unwrap_near(p, psi_prev);
    psi_prev = p;
    r = aa.r;
    phi = aa.phi;
    const double mu = avg.envelope.mu(t);
    double R = (aa.r - avg.r0) / std::sqrt(mu);
    double P = p;
    if (opt.near_identity) {
      const Eigen::Vector2d rp = avg.near_identity(R, P, S, t);
      R = rp(0);
      P = rp(1);
    }
    psi_out = p;
    return resonance_metric(avg, ps, R, P, t);
  };

  euler_maruyama(
      x, ts, ts + horizon, dt, [&](const Eigen::Vector2d& s, double t) { return sys.drift(s, t); },
      [&](const Eigen::Vector2d& s, double t) { return sys.diffusion(s, t); },
      [&](std::uint64_t i, double h) { return stream.increment(i, h); },
      [&](const Eigen::Vector2d& s, double t) {
        if (sys.escaped(s)) {
          out.escaped = true;
          out.escape_time = t;
          return true;
        }
        return opt.stop_on_exit && exited;
      },
      [&](std::uint64_t i, double t, const Eigen::Vector2d& s) {
        const bool want_record = rec != nullptr && i % rec_every == 0;
        if (i % every != 0 && !want_record) return;
        if (sys.escaped(s)) return;
        double r, phi, p;
        const double M = measure(s, t, r, phi, p);
        out.sup_metric = std::max(out.sup_metric, M);
        if (!exited && M >= opt.eps2) {
          exited = true;
          out.exit_time = t;
        }
        if (want_record) {
          rec->t.push_back(t);
          rec->xy.push_back(sys.cartesian(s));
          rec->r.push_back(r);
          rec->phi.push_back(phi);
          rec->psi.push_back(p);
          rec->metric.push_back(M);
        }
      });
  if (out.escaped) out.sup_metric = std::numeric_limits<double>::infinity();
  out.captured = !exited && !out.escaped;
  return out;
}

}  // namespace

CaptureStats capture_probability(const PerturbedSystem& sys, const AveragedSystem& avg, const ParticularSolution& ps,
                                 const CaptureOptions& opt) {
  if (opt.n_paths < 1) throw DomainError("capture_probability: n_paths must be positive");
  if (!(opt.delta1 >= 0.0) || !(opt.eps2 > 0.0)) throw DomainError("capture_probability: bad thresholds");
  CaptureStats stats;
  stats.n_paths = opt.n_paths;
  stats.delta1 = opt.delta1;
  stats.eps2 = opt.eps2;
  stats.seed = opt.seed;
  double horizon = opt.horizon.value;
  if (opt.horizon.kind == HorizonKind::Infinite || !std::isfinite(horizon)) {
    horizon = opt.t_max;
    stats.horizon_clamped = true;
  }
  stats.horizon = horizon;
  const double dt = opt.dt > 0.0 ? opt.dt : 1e-3 * kTwoPi / avg.s0;

  stats.outcomes.resize(static_cast<std::size_t>(opt.n_paths));
  if (opt.keep_paths) stats.paths.resize(stats.outcomes.size());

  unsigned workers = opt.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.workers;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(opt.n_paths));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (int i = next++; i < opt.n_paths; i = next++) {
        PathRecord* rec = opt.keep_paths ? &stats.paths[static_cast<std::size_t>(i)] : nullptr;
        stats.outcomes[static_cast<std::size_t>(i)] =
            simulate_capture_path(sys, avg, ps, opt, dt, horizon, static_cast<std::uint64_t>(i), rec);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next = opt.n_paths;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const auto& o : stats.outcomes) stats.n_captured += o.captured ? 1 : 0;
  stats.p_hat = static_cast<double>(stats.n_captured) / stats.n_paths;
  std::tie(stats.ci_low, stats.ci_high) = wilson_interval(stats.n_captured, stats.n_paths);
  return stats;
}

void write_path_csv(std::ostream& os, const SamplePath& path, const PerturbedSystem& sys,
                    const AveragedSystem* avg, const ParticularSolution* ps) {
  os << "t,x1,x2,r,phi,psi,M\n" << std::setprecision(12);
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    const Eigen::Vector2d xy = sys.cartesian(path.state[i]);
    os << path.t[i] << ',' << xy(0) << ',' << xy(1) << ',' << path.r[i] << ',' << path.phi[i] << ','
       << path.psi[i] << ',';
    if (avg != nullptr && ps != nullptr) {
      const double rho = (path.r[i] - avg->r0) / std::sqrt(avg->envelope.mu(path.t[i]));
      os << resonance_metric(*avg, *ps, rho, path.psi[i], path.t[i]) << '\n';
    } else {
      os << "nan\n";
    }
  }
}

void write_capture_paths_csv(std::ostream& os, const CaptureStats& stats) {
  os << "path_id,t,x1,x2,r,phi,psi,M\n" << std::setprecision(12);
  for (std::size_t k = 0; k < stats.paths.size(); ++k) {
    const PathRecord& p = stats.paths[k];
    for (std::size_t i = 0; i < p.t.size(); ++i)
      os << k << ',' << p.t[i] << ',' << p.xy[i](0) << ',' << p.xy[i](1) << ',' << p.r[i] << ',' << p.phi[i]
         << ',' << p.psi[i] << ',' << p.metric[i] << '\n';
  }
}

}  // namespace resonance
