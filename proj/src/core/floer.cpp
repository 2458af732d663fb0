#include "core/floer.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "core/error.hpp"

namespace fsforge {

namespace {

constexpr int kBlendMargin = 5;  // cells of corner blending on the constant rows

double smoothstep01(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

void check_shape(const FloerProblem& p, const Field& u) {
  if (u.ns != p.grid.ns || u.nt != p.grid.nt)
    fail(ErrorCode::shape_mismatch,
         "field is " + std::to_string(u.ns) + "x" + std::to_string(u.nt) + ", grid wants " +
             std::to_string(p.grid.ns) + "x" + std::to_string(p.grid.nt));
}

}  // namespace

FloerProblem make_floer_problem(const Polynomial& F, double theta, const Flowline& g0,
                                const Flowline& g1, const std::vector<CriticalDatum>& crit,
                                const FloerGrid& grid) {
  if (std::abs(g0.theta - theta) > 1e-12 || std::abs(g1.theta - theta) > 1e-12)
    fail(ErrorCode::precondition, "boundary flowlines carry a different angle than the problem");
  if (g0.source != g1.source || g0.target != g1.target)
    fail(ErrorCode::precondition, "boundary flowlines do not share endpoints");
  if (grid.ns < 16 || grid.nt < 16)
    fail(ErrorCode::precondition, "grid must be at least 16x16");
  FloerProblem p;
  p.F = F;
  p.theta = theta;
  p.gamma0 = FlowlineEval(F, g0, crit);
  p.gamma1 = FlowlineEval(F, g1, crit);
  p.x0 = crit[g0.source].point;
  p.x1 = crit[g0.target].point;
  p.grid = grid;
  return p;
}

Field boundary_data(const FloerProblem& p) {
  const auto& g = p.grid;
  Field b(g.ns, g.nt);
  for (int j = 0; j < g.nt; ++j) {
    b.at(0, j) = p.gamma0(g.t_at(j));
    b.at(g.ns - 1, j) = p.gamma1(g.t_at(j));
  }
  auto ramp_row = [&](int j, cplx mid, cplx left_corner, cplx right_corner) {
    for (int i = 0; i < g.ns; ++i) {
      cplx val = mid;
      if (i <= kBlendMargin) {
        double w = 0.5 * (1.0 + std::cos(std::numbers::pi * i / kBlendMargin));
        val = mid + w * (left_corner - mid);
      } else if (i >= g.ns - 1 - kBlendMargin) {
        double w = 0.5 * (1.0 + std::cos(std::numbers::pi * (g.ns - 1 - i) / kBlendMargin));
        val = mid + w * (right_corner - mid);
      }
      b.at(i, j) = val;
    }
  };
  ramp_row(0, p.x0, p.gamma0(-g.T), p.gamma1(-g.T));
  ramp_row(g.nt - 1, p.x1, p.gamma0(g.T), p.gamma1(g.T));
  return b;
}

Field initial_guess(const FloerProblem& p) {
  const auto& g = p.grid;
  Field u(g.ns, g.nt);
  for (int i = 0; i < g.ns; ++i) {
    double sig = smoothstep01((g.s_at(i) + g.S) / (2.0 * g.S));
    for (int j = 0; j < g.nt; ++j) {
      double t = g.t_at(j);
      u.at(i, j) = (1.0 - sig) * p.gamma0(t) + sig * p.gamma1(t);
    }
  }
  Field b = boundary_data(p);
  for (int j = 0; j < g.nt; ++j) {
    u.at(0, j) = b.at(0, j);
    u.at(g.ns - 1, j) = b.at(g.ns - 1, j);
  }
  for (int i = 0; i < g.ns; ++i) {
    u.at(i, 0) = b.at(i, 0);
    u.at(i, g.nt - 1) = b.at(i, g.nt - 1);
  }
  return u;
}

Field residual(const FloerProblem& p, const Field& u) {
  check_shape(p, u);
  const auto& g = p.grid;
  Field r(g.ns, g.nt);
  const cplx phase = std::polar(1.0, -p.theta);
  Polynomial dF = p.F.derivative();
  const double i2hs = 1.0 / (2.0 * g.hs()), i2ht = 1.0 / (2.0 * g.ht());
  for (int i = 1; i < g.ns - 1; ++i)
    for (int j = 1; j < g.nt - 1; ++j) {
      cplx Ds = (u.at(i + 1, j) - u.at(i - 1, j)) * i2hs;
      cplx Dt = (u.at(i, j + 1) - u.at(i, j - 1)) * i2ht;
      cplx grad = std::conj(phase * dF(u.at(i, j)));
      r.at(i, j) = Ds + cplx(0, 1) * (Dt - grad);
    }
  return r;
}

double residual_l2(const Field& r) {
  double s = 0.0;
  for (const auto& v : r.v) s += std::norm(v);
  return std::sqrt(s);
}

FloerField solve(const FloerProblem& p, const SolveOptions& opt) {
  const auto& g = p.grid;
  const int mi = g.ns - 2, mj = g.nt - 2;  // interior extents
  const int n_unk = 2 * mi * mj;
  const double r_max = 10.0 * (1.0 + std::max(std::abs(p.x0), std::abs(p.x1)));
  const double tol = opt.tol_factor * std::sqrt(double(g.ns) * g.nt);

  Field u = opt.start ? *opt.start : initial_guess(p);
  check_shape(p, u);
  Polynomial d2 = p.F.derivative().derivative();
  const cplx phase = std::polar(1.0, -p.theta);
  const double i2hs = 1.0 / (2.0 * g.hs()), i2ht = 1.0 / (2.0 * g.ht());

  auto unknown = [&](int i, int j) { return 2 * ((i - 1) * mj + (j - 1)); };
  auto pack_residual = [&](const Field& r, Eigen::VectorXd& v) {
    for (int i = 1; i <= mi; ++i)
      for (int j = 1; j <= mj; ++j) {
        v[unknown(i, j)] = r.at(i, j).real();
        v[unknown(i, j) + 1] = r.at(i, j).imag();
      }
  };

  Eigen::SparseMatrix<double> J(n_unk, n_unk);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::vector<Eigen::Triplet<double>> trips;
  bool analyzed = false;

  FloerField out;
  Field r = residual(p, u);
  double rnorm = residual_l2(r);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (rnorm < tol) {
      out.converged = true;
      break;
    }
    trips.clear();
    auto add_complex_linear = [&](int row, int col, cplx a) {
      trips.emplace_back(row, col, a.real());
      trips.emplace_back(row, col + 1, -a.imag());
      trips.emplace_back(row + 1, col, a.imag());
      trips.emplace_back(row + 1, col + 1, a.real());
    };
    auto add_conj_linear = [&](int row, int col, cplx q) {
      trips.emplace_back(row, col, q.real());
      trips.emplace_back(row, col + 1, q.imag());
      trips.emplace_back(row + 1, col, q.imag());
      trips.emplace_back(row + 1, col + 1, -q.real());
    };
    for (int i = 1; i <= mi; ++i)
      for (int j = 1; j <= mj; ++j) {
        int row = unknown(i, j);
        if (i + 1 <= mi) add_complex_linear(row, unknown(i + 1, j), cplx(i2hs, 0));
        if (i - 1 >= 1) add_complex_linear(row, unknown(i - 1, j), cplx(-i2hs, 0));
        if (j + 1 <= mj) add_complex_linear(row, unknown(i, j + 1), cplx(0, i2ht));
        if (j - 1 >= 1) add_complex_linear(row, unknown(i, j - 1), cplx(0, -i2ht));
        cplx q = cplx(0, -1) * std::conj(phase * d2(u.at(i, j)));
        add_conj_linear(row, row, q);
      }
    J.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      fail(ErrorCode::no_convergence, "jacobian factorization failed at iteration " +
                                          std::to_string(iter));
    Eigen::VectorXd rv(n_unk);
    pack_residual(r, rv);
    Eigen::VectorXd step = lu.solve(-rv);

    bool accepted = false;
    for (double alpha = 1.0; alpha >= 1.0 / 256; alpha *= 0.5) {
      Field trial = u;
      for (int i = 1; i <= mi; ++i)
        for (int j = 1; j <= mj; ++j)
          trial.at(i, j) += alpha * cplx(step[unknown(i, j)], step[unknown(i, j) + 1]);
      double peak = 0.0;
      for (const auto& v : trial.v) peak = std::max(peak, std::abs(v));
      if (peak > r_max)
        fail(ErrorCode::diverged_field,
             "field magnitude " + std::to_string(peak) + " exceeded " + std::to_string(r_max));
      Field rt = residual(p, trial);
      double rn = residual_l2(rt);
      if (rn < (1.0 - 1e-4 * alpha) * rnorm) {
        u = std::move(trial);
        r = std::move(rt);
        rnorm = rn;
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    if (!accepted)
      fail(ErrorCode::no_convergence,
           "line search stalled at residual " + std::to_string(rnorm));
  }
  if (!out.converged && rnorm >= tol)
    fail(ErrorCode::no_convergence,
         "residual " + std::to_string(rnorm) + " above tolerance " + std::to_string(tol) +
             " after " + std::to_string(out.iterations) + " iterations");
  out.converged = true;
  out.values = std::move(u);
  out.residual_norm = rnorm;
  out.energy = energy(p, out.values);
  return out;
}

namespace {

/* Second-order derivative stencils: central inside, one-sided at edges. */
cplx d_ds(const Field& u, int i, int j, double hs) {
  if (i == 0) return (-3.0 * u.at(0, j) + 4.0 * u.at(1, j) - u.at(2, j)) / (2 * hs);
  if (i == u.ns - 1)
    return (3.0 * u.at(i, j) - 4.0 * u.at(i - 1, j) + u.at(i - 2, j)) / (2 * hs);
  return (u.at(i + 1, j) - u.at(i - 1, j)) / (2 * hs);
}
cplx d_dt(const Field& u, int i, int j, double ht) {
  if (j == 0) return (-3.0 * u.at(i, 0) + 4.0 * u.at(i, 1) - u.at(i, 2)) / (2 * ht);
  if (j == u.nt - 1)
    return (3.0 * u.at(i, j) - 4.0 * u.at(i, j - 1) + u.at(i, j - 2)) / (2 * ht);
  return (u.at(i, j + 1) - u.at(i, j - 1)) / (2 * ht);
}

}  // namespace

double energy(const FloerProblem& p, const Field& u) {
  check_shape(p, u);
  const auto& g = p.grid;
  const cplx phase = std::polar(1.0, -p.theta);
  Polynomial dF = p.F.derivative();
  double e = 0.0;
  for (int i = 0; i < g.ns; ++i)
    for (int j = 0; j < g.nt; ++j) {
      double w = ((i == 0 || i == g.ns - 1) ? 0.5 : 1.0) *
                 ((j == 0 || j == g.nt - 1) ? 0.5 : 1.0);
      cplx us = d_ds(u, i, j, g.hs());
      cplx ut = d_dt(u, i, j, g.ht());
      cplx grad = std::conj(phase * dF(u.at(i, j)));
      e += w * 0.5 * (std::norm(us) + std::norm(ut - grad));
    }
  return e * g.hs() * g.ht();
}

double plain_energy(const FloerProblem& p, const Field& u, double lambda) {
  check_shape(p, u);
  const auto& g = p.grid;
  double e = 0.0;
  for (int i = 0; i < g.ns; ++i)
    for (int j = 0; j < g.nt; ++j) {
      if (std::abs(g.s_at(i)) > lambda || std::abs(g.t_at(j)) > lambda) continue;
      cplx us = d_ds(u, i, j, g.hs());
      cplx ut = d_dt(u, i, j, g.ht());
      e += 0.5 * (std::norm(us) + std::norm(ut));
    }
  return e * g.hs() * g.ht();
}

EnergyIdentityReport energy_identity_check(const FloerProblem& p, const FloerField& f,
                                           double action0, double action1, double tol_scale) {
  EnergyIdentityReport rep;
  rep.energy = energy(p, f.values);
  rep.action0 = action0;
  rep.action1 = action1;
  rep.gap = std::abs(rep.energy - (action1 - action0));
  rep.tol = tol_scale * (1.0 + std::abs(action0) + std::abs(action1));
  rep.pass = rep.gap < rep.tol;
  return rep;
}

HolomorphyReport holomorphy_diagnostic(const FloerProblem& p, const Field& u,
                                       double rho_floor, double tol) {
  check_shape(p, u);
  const auto& g = p.grid;
  HolomorphyReport rep;
  rep.rho_floor = rho_floor;
  rep.c_expected = cplx(0, 0.5) * std::polar(1.0, p.theta);
  Polynomial dF = p.F.derivative();

  std::vector<cplx> cs;
  cs.reserve(size_t(g.ns) * g.nt);
  for (int i = 1; i < g.ns - 1; ++i)
    for (int j = 1; j < g.nt - 1; ++j) {
      cplx z = u.at(i, j);
      double rho = std::norm(dF(z));
      if (rho <= rho_floor) continue;
      cplx dbar = 0.5 * (d_ds(u, i, j, g.hs()) + cplx(0, 1) * d_dt(u, i, j, g.ht()));
      cs.push_back(dF(z) * dbar / rho);  // chain rule: dbar(F o u) = F'(u) dbar u
    }
  rep.admissible_nodes = static_cast<int>(cs.size());
  if (cs.empty()) {
    rep.pass = true;
    rep.note = "no admissible nodes";
  } else {
    cplx mean = 0.0;
    for (const auto& c : cs) mean += c;
    mean /= double(cs.size());
    rep.c_mean = mean;
    for (const auto& c : cs) rep.c_max_dev = std::max(rep.c_max_dev, std::abs(c - mean));
    rep.c_expected_dev = std::abs(mean - rep.c_expected);
    rep.pass = rep.c_max_dev < tol;
  }

  for (int i = 0; i < g.ns; ++i)
    for (int j = 0; j < g.nt; ++j) {
      double m = std::abs(p.F(u.at(i, j)));
      bool bdy = i == 0 || j == 0 || i == g.ns - 1 || j == g.nt - 1;
      (bdy ? rep.sup_boundary_v : rep.sup_interior_v) =
          std::max(bdy ? rep.sup_boundary_v : rep.sup_interior_v, m);
    }
  return rep;
}

RotationReport rotation_covariance_check(const FloerProblem& p, const Field& u, double phi,
                                         std::uint64_t seed, double tol) {
  check_shape(p, u);
  const auto& g = p.grid;
  RotationReport rep;
  rep.phi = phi;
  const cplx eip = std::polar(1.0, phi);
  Polynomial dF = p.F.derivative();
  const cplx phase = std::polar(1.0, -p.theta);
  const double i2hs = 1.0 / (2.0 * g.hs()), i2ht = 1.0 / (2.0 * g.ht());

  Field base = residual(p, u);
  for (int i = 1; i < g.ns - 1; ++i)
    for (int j = 1; j < g.nt - 1; ++j) {
      rep.base_residual_sup = std::max(rep.base_residual_sup, std::abs(base.at(i, j)));
      cplx Ds = (u.at(i + 1, j) - u.at(i - 1, j)) * i2hs;
      cplx Dt = (u.at(i, j + 1) - u.at(i, j - 1)) * i2ht;
      // Directional stencils along the rotated axes; the deformed height
      // function (F -> e^{-i phi} F) has gradient e^{i phi} grad f_theta.
      cplx Dsp = std::cos(phi) * Ds - std::sin(phi) * Dt;
      cplx Dtp = std::sin(phi) * Ds + std::cos(phi) * Dt;
      cplx grad = std::conj(phase * dF(u.at(i, j)));
      cplx rp = Dsp + cplx(0, 1) * (Dtp - eip * grad);
      rep.frame_residual_sup = std::max(rep.frame_residual_sup, std::abs(rp));
      rep.frame_covariance_dev =
          std::max(rep.frame_covariance_dev, std::abs(rp - eip * base.at(i, j)));
    }

  // Literal resample route.
  rep.resample_exact = std::abs(phi - std::numbers::pi / 2) < 1e-15 && g.ns == g.nt &&
                       std::abs(g.S - g.T) < 1e-15;
  Field ru(g.ns, g.nt);
  FloerGrid rg = g;
  double second_diff = 0.0;
  if (rep.resample_exact) {
    for (int i = 0; i < g.ns; ++i)
      for (int j = 0; j < g.nt; ++j) ru.at(i, j) = u.at(j, g.ns - 1 - i);
  } else {
    double L = std::min(g.S, g.T) / (std::abs(std::cos(phi)) + std::abs(std::sin(phi)));
    rg.S = rg.T = L;
    auto bilinear = [&](cplx z) {
      double xi = (z.real() + g.S) / g.hs(), yj = (z.imag() + g.T) / g.ht();
      int i0 = std::clamp(static_cast<int>(std::floor(xi)), 0, g.ns - 2);
      int j0 = std::clamp(static_cast<int>(std::floor(yj)), 0, g.nt - 2);
      double a = xi - i0, b = yj - j0;
      return (1 - a) * (1 - b) * u.at(i0, j0) + a * (1 - b) * u.at(i0 + 1, j0) +
             (1 - a) * b * u.at(i0, j0 + 1) + a * b * u.at(i0 + 1, j0 + 1);
    };
    for (int i = 0; i < g.ns; ++i)
      for (int j = 0; j < g.nt; ++j)
        ru.at(i, j) = bilinear(std::conj(eip) * cplx(rg.s_at(i), rg.t_at(j)));
  }
  double lip = 0.0;  // curvature and gradient-Lipschitz scales for the bound
  Polynomial d2 = p.F.derivative().derivative();
  for (int i = 1; i < g.ns - 1; ++i)
    for (int j = 1; j < g.nt - 1; ++j) {
      cplx dss = (u.at(i + 1, j) - 2.0 * u.at(i, j) + u.at(i - 1, j)) / (g.hs() * g.hs());
      cplx dtt = (u.at(i, j + 1) - 2.0 * u.at(i, j) + u.at(i, j - 1)) / (g.ht() * g.ht());
      second_diff = std::max(second_diff, std::abs(dss) + std::abs(dtt));
      lip = std::max(lip, std::abs(d2(u.at(i, j))));
    }
  const double i2hsp = 1.0 / (2.0 * rg.hs()), i2htp = 1.0 / (2.0 * rg.ht());
  for (int i = 1; i < g.ns - 1; ++i)
    for (int j = 1; j < g.nt - 1; ++j) {
      cplx Ds = (ru.at(i + 1, j) - ru.at(i - 1, j)) * i2hsp;
      cplx Dt = (ru.at(i, j + 1) - ru.at(i, j - 1)) * i2htp;
      cplx grad = eip * std::conj(phase * dF(ru.at(i, j)));
      rep.resample_residual_sup =
          std::max(rep.resample_residual_sup, std::abs(Ds + cplx(0, 1) * (Dt - grad)));
    }
  const double h_sum = g.hs() + g.ht();
  rep.resample_bound = rep.base_residual_sup + 0.5 * second_diff * h_sum +
                       (1.0 + lip) * second_diff * h_sum * h_sum / 8.0;
  rep.resample_within_bound = rep.resample_residual_sup <= rep.resample_bound;

  // Two expression routes for the same discrete operator at random nodes.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> di(1, g.ns - 2), dj(1, g.nt - 2);
  for (int k = 0; k < 100; ++k) {
    int i = di(rng), j = dj(rng);
    cplx Ds = (u.at(i + 1, j) - u.at(i - 1, j)) * i2hs;
    cplx Dt = (u.at(i, j + 1) - u.at(i, j - 1)) * i2ht;
    cplx route_a = Ds + cplx(0, 1) * (Dt - std::conj(phase * dF(u.at(i, j))));
    cplx dbar = 0.5 * (Ds + cplx(0, 1) * Dt);
    cplx route_b = 2.0 * dbar - cplx(0, 1) * (std::polar(1.0, p.theta) * std::conj(dF(u.at(i, j))));
    rep.witten_agreement_max = std::max(rep.witten_agreement_max, std::abs(route_a - route_b));
  }

  const double eps_scale = 1e-12 * (1.0 + rep.base_residual_sup + rep.frame_residual_sup);
  bool resample_ok = rep.resample_exact ? rep.resample_residual_sup < tol
                                        : rep.resample_within_bound;
  rep.pass = rep.frame_residual_sup < tol && rep.frame_covariance_dev < eps_scale &&
             rep.witten_agreement_max < eps_scale && resample_ok;
  return rep;
}

M1Report m1_estimate(const Polynomial& F, const std::vector<CriticalDatum>& crit,
                     const std::vector<Flowline>& gens, const std::vector<int>& gradings,
                     const M1Options& opts) {
  if (gens.size() != gradings.size())
    fail(ErrorCode::shape_mismatch, "one grading per generator required");
  M1Report rep;
  rep.rank = static_cast<int>(gens.size());
  rep.matrix.assign(rep.rank, std::vector<int>(rep.rank, 0));
  if (rep.rank < 2) {
    rep.notes.push_back("rank < 2: no grading-difference-1 pairs");
    return rep;
  }

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int row = 0; row < rep.rank; ++row)
    for (int col = 0; col < rep.rank; ++col) {
      if (row == col || gradings[row] != gradings[col] + 1) continue;
      M1Entry e;
      e.row = row;
      e.col = col;
      if (auto it = opts.supplied.find({row, col}); it != opts.supplied.end()) {
        e.count_mod2 = it->second & 1;
        e.confidence = 'H';
        e.note = "supplied";
      } else if (!opts.attempt_solves) {
        e.note = "not attempted";
      } else {
        auto cluster_count = [&](const FloerGrid& grid) {
          FloerProblem p = make_floer_problem(F, gens[col].theta, gens[col], gens[row], crit, grid);
          std::vector<Field> found;
          for (int s = 0; s < opts.seeds; ++s) {
            Field start = initial_guess(p);
            double amp = 0.05 * s;
            for (int i = 1; i < grid.ns - 1; ++i)
              for (int j = 1; j < grid.nt - 1; ++j) {
                double bump = std::exp(-(grid.s_at(i) * grid.s_at(i) + grid.t_at(j) * grid.t_at(j)));
                start.at(i, j) += amp * bump * cplx(gauss(rng), gauss(rng));
              }
            SolveOptions so;
            so.start = &start;
            try {
              FloerField f = solve(p, so);
              bool fresh = true;
              for (const auto& prev : found) {
                double d2sum = 0.0;
                for (size_t k = 0; k < prev.v.size(); ++k)
                  d2sum += std::norm(prev.v[k] - f.values.v[k]);
                if (std::sqrt(d2sum / prev.v.size()) < 1e-3) fresh = false;
              }
              if (fresh) found.push_back(f.values);
            } catch (const Error& err) {
              e.note += std::string(e.note.empty() ? "" : "; ") + "seed " + std::to_string(s) +
                        ": " + err.what();
            }
          }
          return static_cast<int>(found.size());
        };
        int c0 = cluster_count(opts.grid);
        FloerGrid fine = opts.grid;
        fine.ns = opts.grid.ns / 2 * 3;
        fine.nt = opts.grid.nt / 2 * 3;
        int c1 = cluster_count(fine);
        e.count_mod2 = c0 & 1;
        e.confidence = (c0 == c1) ? 'H' : 'L';
        if (e.note.empty()) e.note = "clusters " + std::to_string(c0) + "/" + std::to_string(c1);
      }
      rep.matrix[row][col] = e.count_mod2;
      rep.entries.push_back(std::move(e));
    }
  return rep;
}

}  // namespace fsforge
