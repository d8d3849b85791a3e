#include "resonance/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "resonance/chebyshev.hpp"
#include "resonance/errors.hpp"

namespace resonance {

namespace {

constexpr int kFitModes = TrigPoly::kMaxJ;
constexpr int kFitSModes = 16;
constexpr double kTailEnergy = 1e-10;

double generalized_binomial(int e, int q) {
  double b = 1.0;
  for (int i = 0; i < q; ++i) b *= static_cast<double>(e - i) / static_cast<double>(i + 1);
  return b;
}

TrigPoly sin_phi() { return TrigPoly::real_mode(1, 0, Complex(0.0, -0.5)); }
TrigPoly cos_phi() { return TrigPoly::real_mode(1, 0, Complex(0.5, 0.0)); }
TrigPoly harmonic_S(double c0, double c1) {
  return TrigPoly::constant(c0) + TrigPoly::real_mode(0, 1, Complex(0.0, -0.5 * c1));
}

Eigen::MatrixXcd dft_matrix(int grid, int modes) {
  Eigen::MatrixXcd E(2 * modes + 1, grid);
  for (int a = -modes; a <= modes; ++a) {
    for (int m = 0; m < grid; ++m) {
      const double arg = -2.0 * std::numbers::pi * a * m / grid;
      E(a + modes, m) = Complex(std::cos(arg), std::sin(arg)) / static_cast<double>(grid);
    }
  }
  return E;
}

void check_tail(double total, double kept, const char* what) {
  if (total - kept > kTailEnergy * total + 1e-28) {
    throw TruncationError(std::string(what) + ": Fourier tail beyond retained modes is too large (relative " + std::to_string(std::log10((total - kept) / total)) + ")");
  }
}

}  // namespace

PerturbedSystem::PerturbedSystem(std::string name, DecayEnvelope env, PerturbationPhase phase, double epsilon)
    : name_(std::move(name)), env_(std::move(env)), phase_(std::move(phase)), epsilon_(epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("noise scale epsilon must be non-negative");
}

void PerturbedSystem::set_resonance(int n, int p, int kappa, int varkappa, double r0, double eta) {
  if (n < 1 || p < 1) throw DomainError("orders n and p must be positive integers");
  if (kappa < 1 || varkappa < 1 || std::gcd(kappa, varkappa) != 1) {
    throw DomainError("kappa and varkappa must be coprime positive integers");
  }
  if (eta == 0.0 || !std::isfinite(eta)) throw SingularSystemError("resonance is degenerate: eta = 0");
  res_ = {n, p, kappa, varkappa, r0, eta};
}

void PerturbedSystem::check_state(double r) const {
  if (!(std::abs(r) < r_bound())) throw DomainError("state outside the amplitude domain |r| < R");
}

double PerturbedSystem::taylor_radius() const {
  const double r0 = std::abs(res_.r0);
  return std::min(0.15 * r0, 0.35 * (r_bound() - r0));
}

Eigen::VectorXd PerturbedSystem::nu_taylor(int q_max) const {
  auto f = [this](double r) {
    Eigen::VectorXd v(1);
    v(0) = nu(r);
    return v;
  };
  return chebyshev_taylor(f, res_.r0, taylor_radius(), q_max).col(0);
}

const std::vector<TrigPoly>& PerturbedSystem::cached_taylor(
    const CoefficientTag& tag, const std::function<std::vector<TrigPoly>()>& compute) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(tag);
    if (it != cache_.end()) return it->second;
  }
  std::vector<TrigPoly> value = compute();
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return cache_.emplace(tag, std::move(value)).first->second;
}

TrigPoly PerturbedSystem::taylor_coefficient(const CoefficientTag& tag, int q) const {
  if (q < 0 || q > kTaylorDepth) throw UnsupportedOrderError("Taylor depth in r exceeds the supported range");
  const auto& fits = cached_taylor(tag, [&] {
    auto f = [this, &tag](double r, double phi, double S) { return coefficient(tag, r, phi, S); };
    std::vector<TrigPoly> out = fit_taylor_phi_S(f, res_.r0, taylor_radius(), kTaylorDepth);
    for (auto& t : out) {
      t = t.resonant_substitute(res_.kappa, res_.varkappa);
      t.prune(1e-14);
    }
    return out;
  });
  return fits[q];
}

Eigen::Vector2d PerturbedSystem::polar_drift(double r, double phi, double t) const {
  check_state(r);
  const double mu = env_.mu(t);
  const double s = S(t);
  Eigen::Vector2d a(0.0, nu(r));
  for (int j : drift_orders()) {
    const double mj = std::pow(mu, j);
    for (int i = 0; i < 2; ++i) a(i) += mj * coefficient({false, i, 0, j}, r, phi, s);
  }
  return a;
}

Eigen::Matrix2d PerturbedSystem::polar_diffusion(double r, double phi, double t) const {
  check_state(r);
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  if (epsilon_ == 0.0) return A;
  const double mu = env_.mu(t);
  const double s = S(t);
  for (int j : diffusion_orders()) {
    const double mj = std::pow(mu, j);
    for (int i = 0; i < 2; ++i) {
      for (int c = 0; c < 2; ++c) A(i, c) += mj * coefficient({true, i, c, j}, r, phi, s);
    }
  }
  return epsilon_ * A;
}

Eigen::Vector2d PerturbedSystem::drift(const Eigen::Vector2d& x, double t) const { return polar_drift(x(0), x(1), t); }

Eigen::Matrix2d PerturbedSystem::diffusion(const Eigen::Vector2d& x, double t) const {
  return polar_diffusion(x(0), x(1), t);
}

ActionAngle PerturbedSystem::to_polar(const Eigen::Vector2d& x) const { return {x(0), x(1)}; }

Eigen::Vector2d PerturbedSystem::from_polar(double r, double phi) const { return {r, phi}; }

std::vector<TrigPoly> fit_taylor_phi_S(const std::function<double(double, double, double)>& f, double r0,
                                       double delta, int q_max, int grid) {
  const double h = 2.0 * std::numbers::pi / grid;
  auto sample = [&](double r) {
    Eigen::VectorXd v(grid * grid);
    for (int m = 0; m < grid; ++m) {
      for (int n = 0; n < grid; ++n) v(m * grid + n) = f(r, m * h, n * h);
    }
    return v;
  };
  const Eigen::MatrixXd taylor = chebyshev_taylor(sample, r0, delta, q_max);
  const Eigen::MatrixXcd E = dft_matrix(grid, kFitModes);
  const Eigen::MatrixXcd ES = dft_matrix(grid, kFitSModes);
  std::vector<TrigPoly> out;
  for (int q = 0; q <= q_max; ++q) {
    const Eigen::MatrixXd F = taylor.row(q).reshaped(grid, grid).transpose();
    const Eigen::MatrixXcd C = E * F * ES.transpose();
    const double total = F.squaredNorm() / (grid * grid);
    check_tail(total, C.squaredNorm(), "coefficient fit");
    TrigPoly t(1);
    for (int a = -kFitModes; a <= kFitModes; ++a) {
      for (int b = -kFitSModes; b <= kFitSModes; ++b) {
        Poly p(1);
        p(0) = C(a + kFitModes, b + kFitSModes);
        t.add_to_mode(a, b, p);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

// Fourier series in phi of each row (order q) of a Taylor table sampled on a uniform grid.
std::vector<TrigPoly> fourier_phi_rows(const Eigen::MatrixXd& taylor) {
  const int grid = static_cast<int>(taylor.cols());
  const Eigen::MatrixXcd E = dft_matrix(grid, kFitModes);
  std::vector<TrigPoly> out;
  for (Eigen::Index q = 0; q < taylor.rows(); ++q) {
    const Eigen::VectorXd F = taylor.row(q).transpose();
    const Eigen::VectorXcd C = E * F;
    check_tail(F.squaredNorm() / grid, C.squaredNorm(), "coefficient fit");
    TrigPoly t(1);
    for (int a = -kFitModes; a <= kFitModes; ++a) {
      Poly p(1);
      p(0) = C(a + kFitModes);
      t.add_to_mode(a, 0, p);
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<TrigPoly> fit_taylor_phi(const std::function<double(double, double)>& f, double r0, double delta,
                                     int q_max, int grid) {
  const double h = 2.0 * std::numbers::pi / grid;
  auto sample = [&](double r) {
    Eigen::VectorXd v(grid);
    for (int m = 0; m < grid; ++m) v(m) = f(r, m * h);
    return v;
  };
  return fourier_phi_rows(chebyshev_taylor(sample, r0, delta, q_max));
}

// ---------------------------------------------------------------------------

Example1System::Example1System(const Example1Params& prm, DecayEnvelope env)
    : PerturbedSystem("example1", env, PerturbationPhase{prm.s0, {}, env.tau0}, prm.epsilon), prm_(prm) {
  if (!(prm.theta > 0.0)) throw DomainError("theta must be positive");
  const double target = prm.kappa * prm.s0 / prm.varkappa;
  if (!(prm.s0 > 0.0) || !(target < 1.0)) {
    throw NoResonanceError("no amplitude with nu(r0) = kappa s0 / varkappa in (0, R)");
  }
  const double r0 = std::sqrt((1.0 - target) / prm.theta);
  set_resonance(2, prm.p, prm.kappa, prm.varkappa, r0, -2.0 * prm.theta * r0);
  params_ = {{"theta", prm.theta}, {"Q0", prm.Q0}, {"Q1", prm.Q1}, {"Z0", prm.Z0}, {"Z1", prm.Z1},
             {"B0", prm.B0},       {"B1", prm.B1}, {"s0", prm.s0}, {"epsilon", prm.epsilon}};
}

Eigen::VectorXd Example1System::nu_taylor(int q_max) const {
  const double r0 = resonance().r0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(q_max + 1);
  v(0) = nu(r0);
  if (q_max >= 1) v(1) = -2.0 * prm_.theta * r0;
  if (q_max >= 2) v(2) = -prm_.theta;
  return v;
}

std::vector<int> Example1System::drift_orders() const {
  std::vector<int> o{2};
  if (2 * prm_.p != 2) o.push_back(2 * prm_.p);
  return o;
}

std::map<int, TrigPoly> Example1System::laurent(const CoefficientTag& tag) const {
  std::map<int, TrigPoly> out;
  auto add = [&out](int e, const TrigPoly& t) {
    auto it = out.find(e);
    if (it == out.end()) {
      out.emplace(e, t);
    } else {
      it->second += t;
    }
  };
  const TrigPoly s = sin_phi(), c = cos_phi();
  const TrigPoly Q = harmonic_S(prm_.Q0, prm_.Q1);
  const TrigPoly Z = harmonic_S(prm_.Z0, prm_.Z1);
  const TrigPoly B = harmonic_S(prm_.B0, prm_.B1);
  const double e2 = prm_.epsilon * prm_.epsilon;
  if (tag.diffusion) {
    if (tag.order != prm_.p || tag.column != 0) return out;
    if (tag.component == 0) add(0, -(B * s));
    if (tag.component == 1) add(-1, -(B * c));
    return out;
  }
  if (tag.order == 2) {
    if (tag.component == 0) {
      add(1, Q * s * s);
      add(0, -(Z * s));
    } else {
      add(0, Q * s * c);
      add(-1, -(Z * c));
    }
  }
  if (tag.order == 2 * prm_.p && e2 != 0.0) {
    const TrigPoly B2 = B * B;
    if (tag.component == 0) {
      add(-1, (0.5 * e2) * (B2 * c * c));
    } else {
      add(-2, (-e2) * (B2 * s * c));
    }
  }
  return out;
}

double Example1System::coefficient(const CoefficientTag& tag, double r, double phi, double S) const {
  double v = 0.0;
  for (const auto& [e, t] : laurent(tag)) v += std::pow(r, e) * t.evaluate(0.0, phi, S);
  return v;
}

TrigPoly Example1System::taylor_coefficient(const CoefficientTag& tag, int q) const {
  const double r0 = resonance().r0;
  TrigPoly sum(1);
  for (const auto& [e, t] : laurent(tag)) sum += (generalized_binomial(e, q) * std::pow(r0, e - q)) * t;
  TrigPoly out = sum.resonant_substitute(resonance().kappa, resonance().varkappa);
  out.prune(0.0);
  return out;
}

Eigen::Vector2d Example1System::cartesian(const Eigen::Vector2d& x) const {
  return {x(0) * std::cos(x(1)), -x(0) * std::sin(x(1))};
}

// ---------------------------------------------------------------------------

DuffingSystem::DuffingSystem(const DuffingParams& prm, DecayEnvelope env)
    : PerturbedSystem("duffing", env, PerturbationPhase{prm.s0, {}, env.tau0}, prm.epsilon),
      prm_(prm),
      osc_(prm.theta) {
  if (!(prm.s0 > 0.0)) throw NoResonanceError("s0 must be positive");
  const double r0 = osc_.resonant_amplitude(prm.kappa * prm.s0 / prm.varkappa);
  set_resonance(prm.n, prm.p, prm.kappa, prm.varkappa, r0, osc_.frequency_derivative(r0));
  build_orbit_grid();
  params_ = {{"theta", prm.theta}, {"P0", prm.P0}, {"P1", prm.P1}, {"Q0", prm.Q0},          {"Q1", prm.Q1},
             {"B0", prm.B0},       {"B1", prm.B1}, {"s0", prm.s0}, {"epsilon", prm.epsilon}};
}

std::vector<int> DuffingSystem::drift_orders() const {
  std::vector<int> o{prm_.n};
  if (2 * prm_.p != prm_.n) o.push_back(2 * prm_.p);
  return o;
}

void DuffingSystem::build_orbit_grid() {
  const double r0 = resonance().r0;
  const double delta = taylor_radius();
  const Eigen::VectorXd r = chebyshev_nodes(r0, delta, kNodes);
  const Eigen::MatrixXd D = chebyshev_diff_matrix(delta, kNodes);
  Eigen::MatrixXd x1(kNodes, kGrid), x2(kNodes, kGrid);
  Eigen::VectorXd nu(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    nu(i) = osc_.frequency(r(i));
    for (int m = 0; m < kGrid; ++m) {
      const Eigen::Vector2d x = osc_.position(2.0 * std::numbers::pi * m / kGrid, r(i));
      x1(i, m) = x(0);
      x2(i, m) = x(1);
    }
  }
  const Eigen::MatrixXd x1r = D * x1, x2r = D * x2, x1rr = D * x1r;
  const Eigen::VectorXd nu_r = D * nu;
  orbit_grid_.resize(static_cast<std::size_t>(kNodes * kGrid));
  for (int i = 0; i < kNodes; ++i) {
    for (int m = 0; m < kGrid; ++m) {
      orbit_grid_[static_cast<std::size_t>(i * kGrid + m)] = {r(i),        x1(i, m), x2(i, m), x1r(i, m),
                                                              x2r(i, m),   x1rr(i, m), nu(i),  nu_r(i)};
    }
  }
  Eigen::MatrixXd nu_values(kNodes, 1);
  nu_values.col(0) = nu;
  const Eigen::MatrixXd nu_t = chebyshev_taylor_from_values(nu_values, delta, 1);
  set_resonance(prm_.n, prm_.p, prm_.kappa, prm_.varkappa, r0, nu_t(1, 0));
}

double DuffingSystem::angle_hessian_x2(const OrbitPoint& o) {
  const double x2nu_r = o.x2r / o.nu - o.x2 * o.nu_r / (o.nu * o.nu);
  const double G = -o.nu * o.x1r / o.r;
  const double G_phi = -o.nu * x2nu_r / o.r;
  const double G_r = -(o.nu_r * o.x1r + o.nu * o.x1rr - o.nu * o.x1r / o.r) / o.r;
  return G * G_phi + o.x2 / o.r * G_r;
}

double DuffingSystem::angle_hessian_x2(double r, double phi) const {
  const AngleCoords ac = osc_.angle_coords(phi, r);
  const double nu = osc_.frequency(r);
  const double dnu = osc_.frequency_derivative(r);
  const double x1r = ac.X_r(0);
  const double h = osc_.fd_step(r);
  const double x2nu_r =
      (osc_.position(phi, r + h)(1) / osc_.frequency(r + h) - osc_.position(phi, r - h)(1) / osc_.frequency(r - h)) /
      (2.0 * h);
  const double x1rr = osc_.position_rr(phi, r)(0);
  const double G = -nu * x1r / r;
  const double G_phi = -nu * x2nu_r / r;
  const double G_r = -(dnu * x1r + nu * x1rr - nu * x1r / r) / r;
  return G * G_phi + ac.X(1) / r * G_r;
}

double DuffingSystem::coefficient(const CoefficientTag& tag, double r, double phi, double S) const {
  if (tag.diffusion) {
    if (tag.order != prm_.p || tag.column != 0) return 0.0;
    const AngleCoords ac = osc_.angle_coords(phi, r);
    if (tag.component == 0) return B(S) * ac.X(1) / r;
    return -B(S) * osc_.frequency(r) * ac.X_r(0) / r;
  }
  double v = 0.0;
  if (tag.order == prm_.n) {
    const AngleCoords ac = osc_.angle_coords(phi, r);
    const double g = P(S) * ac.X(0) + Q(S) * ac.X(1);
    v += tag.component == 0 ? ac.X(1) * g / r : -osc_.frequency(r) * ac.X_r(0) * g / r;
  }
  if (tag.order == 2 * prm_.p) {
    const double e2b2 = prm_.epsilon * prm_.epsilon * B(S) * B(S);
    if (e2b2 != 0.0) {
      if (tag.component == 0) {
        const double x1 = osc_.position(phi, r)(0);
        v += e2b2 * osc_.potential(x1) / (r * r * r);
      } else {
        v += 0.5 * e2b2 * angle_hessian_x2(r, phi);
      }
    }
  }
  return v;
}

TrigPoly DuffingSystem::taylor_coefficient(const CoefficientTag& tag, int q) const {
  if (q < 0 || q > kTaylorDepth) throw UnsupportedOrderError("Taylor depth in r exceeds the supported range");
  const auto& fits = cached_taylor(tag, [&] {
    using Term = std::pair<TrigPoly, std::function<double(const OrbitPoint&)>>;
    std::vector<Term> terms;
    const TrigPoly Ps = harmonic_S(prm_.P0, prm_.P1);
    const TrigPoly Qs = harmonic_S(prm_.Q0, prm_.Q1);
    const TrigPoly Bs = harmonic_S(prm_.B0, prm_.B1);
    const auto& osc = osc_;
    if (tag.diffusion) {
      if (tag.order == prm_.p && tag.column == 0) {
        if (tag.component == 0) {
          terms.emplace_back(Bs, [](const OrbitPoint& o) { return o.x2 / o.r; });
        } else {
          terms.emplace_back(Bs, [](const OrbitPoint& o) { return -o.nu * o.x1r / o.r; });
        }
      }
    } else {
      if (tag.order == prm_.n) {
        if (tag.component == 0) {
          terms.emplace_back(Ps, [](const OrbitPoint& o) { return o.x1 * o.x2 / o.r; });
          terms.emplace_back(Qs, [](const OrbitPoint& o) { return o.x2 * o.x2 / o.r; });
        } else {
          terms.emplace_back(Ps, [](const OrbitPoint& o) { return -o.nu * o.x1r * o.x1 / o.r; });
          terms.emplace_back(Qs, [](const OrbitPoint& o) { return -o.nu * o.x1r * o.x2 / o.r; });
        }
      }
      const double e2 = prm_.epsilon * prm_.epsilon;
      if (tag.order == 2 * prm_.p && e2 != 0.0) {
        const TrigPoly B2 = Bs * Bs;
        if (tag.component == 0) {
          terms.emplace_back(e2 * B2,
                             [&osc](const OrbitPoint& o) { return osc.potential(o.x1) / (o.r * o.r * o.r); });
        } else {
          terms.emplace_back((0.5 * e2) * B2, [](const OrbitPoint& o) { return angle_hessian_x2(o); });
        }
      }
    }
    std::vector<TrigPoly> out(kTaylorDepth + 1, TrigPoly(resonance().varkappa));
    const double delta = taylor_radius();
    for (const auto& [s_part, g] : terms) {
      Eigen::MatrixXd values(kNodes, kGrid);
      for (int i = 0; i < kNodes; ++i) {
        for (int m = 0; m < kGrid; ++m) values(i, m) = g(orbit_grid_[static_cast<std::size_t>(i * kGrid + m)]);
      }
      const std::vector<TrigPoly> gq = fourier_phi_rows(chebyshev_taylor_from_values(values, delta, kTaylorDepth));
      for (int k = 0; k <= kTaylorDepth; ++k) {
        TrigPoly prod = s_part * gq[k];
        prod.prune(1e-15);
        out[k] += prod.resonant_substitute(resonance().kappa, resonance().varkappa);
      }
    }
    for (auto& t : out) t.prune(1e-14);
    return out;
  });
  return fits[q];
}

Eigen::Vector2d DuffingSystem::drift(const Eigen::Vector2d& x, double t) const {
  const double mu = envelope().mu(t);
  const double s = S(t);
  const double g = P(s) * x(0) + Q(s) * x(1);
  return {x(1), -osc_.force(x(0)) + std::pow(mu, prm_.n) * g};
}

Eigen::Matrix2d DuffingSystem::diffusion(const Eigen::Vector2d&, double t) const {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(1, 0) = epsilon() * std::pow(envelope().mu(t), prm_.p) * B(S(t));
  return A;
}

ActionAngle DuffingSystem::to_polar(const Eigen::Vector2d& x) const {
  return osc_.action_angle_from_state(x(0), x(1));
}

Eigen::Vector2d DuffingSystem::from_polar(double r, double phi) const { return osc_.position(phi, r); }

double DuffingSystem::amplitude(const Eigen::Vector2d& x) const {
  if (std::abs(x(0)) >= 1.0 / std::sqrt(osc_.theta())) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(0.0, 2.0 * osc_.potential(x(0)) + x(1) * x(1)));
}

}  // namespace resonance
