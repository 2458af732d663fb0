#include "core/category.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace fsforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string pair_name(std::pair<int, int> p) {
  return std::to_string(p.first) + "->" + std::to_string(p.second);
}

}  // namespace

DirectedCategoryData assemble(const PhaseGeometry& geom, const AssembleInput& in) {
  DirectedCategoryData data;
  data.objects = geom.order;
  const int n = static_cast<int>(geom.order.size());
  std::vector<int> pos(n);
  for (int k = 0; k < n; ++k) pos[geom.order[k]] = k;

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      HomSpace h;
      if (i == j) {
        h.kind = HomKind::identity;
        h.gens.push_back({"id_" + std::to_string(i), 0, 0.0, "unit"});
      } else if (pos[i] > pos[j]) {
        auto it = in.homs.find({i, j});
        if (it != in.homs.end() && !it->second.empty())
          fail(ErrorCode::directedness_violation,
               "nonzero Hom " + pair_name({i, j}) + " supplied against the clockwise order");
        h.kind = HomKind::zero;
      } else {
        h.kind = HomKind::flowlines;
        if (auto it = in.homs.find({i, j}); it != in.homs.end()) {
          h.gens = it->second;
          for (auto& g : h.gens)
            if (g.provenance.empty()) g.provenance = "flow-module shooting";
        }
      }
      data.homs[{i, j}] = std::move(h);
    }

  for (const auto& [key, block] : in.m1) {
    const HomSpace& h = data.homs.at(key);
    if (block.counts.rows != h.rank() || block.counts.cols != h.rank())
      fail(ErrorCode::shape_mismatch, "m1 block for " + pair_name(key) + " is " +
                                          std::to_string(block.counts.rows) + "x" +
                                          std::to_string(block.counts.cols) + ", hom rank " +
                                          std::to_string(h.rank()));
    for (int r = 0; r < block.counts.rows; ++r)
      for (int c = 0; c < block.counts.cols; ++c)
        if (block.counts.at(r, c) && h.gens[r].grading != h.gens[c].grading + 1)
          fail(ErrorCode::precondition,
               "m1 entry (" + std::to_string(r) + "," + std::to_string(c) + ") of " +
                   pair_name(key) + " does not raise grading by 1");
    M1Block b = block;
    if (b.provenance.empty()) b.provenance = "supplied";
    data.m1[key] = std::move(b);
  }
  data.m2 = in.m2;
  return data;
}

namespace {

/* Verified view: LOW-confidence entries are excluded from relations. */
F2Matrix verified_m1(const DirectedCategoryData& data, std::pair<int, int> key) {
  const HomSpace& h = data.homs.at(key);
  auto it = data.m1.find(key);
  F2Matrix m(h.rank(), h.rank());
  if (it == data.m1.end()) return m;
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) {
      bool low = !it->second.confidence.empty() && it->second.confidence[r][c] == 'L';
      m.at(r, c) = low ? 0 : it->second.counts.at(r, c);
    }
  return m;
}

}  // namespace

AInfReport verify_a_infinity(const DirectedCategoryData& data, int max_n,
                             bool throw_on_failure) {
  AInfReport rep;
  auto failed = [&](AInfReport r) {
    r.ok = false;
    if (throw_on_failure) fail(ErrorCode::relation_failure, r.witness);
    return r;
  };

  for (const auto& [key, hom] : data.homs) {
    if (hom.rank() == 0) continue;
    F2Matrix m = verified_m1(data, key);
    F2Matrix sq = m.multiply(m);
    for (int r = 0; r < sq.rows; ++r)
      for (int c = 0; c < sq.cols; ++c)
        if (sq.at(r, c)) {
          AInfReport w;
          w.relation = "m1m1";
          w.hom = key;
          w.row = r;
          w.col = c;
          w.witness = "m1^2 != 0 on Hom " + pair_name(key) + " at (" + std::to_string(r) +
                      "," + std::to_string(c) + ")";
          return failed(w);
        }
  }
  if (max_n < 2) return rep;

  for (const auto& [triple, t] : data.m2) {
    auto [i, j, k] = triple;
    const HomSpace& hij = data.homs.at({i, j});
    const HomSpace& hjk = data.homs.at({j, k});
    const HomSpace& hik = data.homs.at({i, k});
    if (t.d_out != hik.rank() || t.d_b != hij.rank() || t.d_c != hjk.rank())
      fail(ErrorCode::shape_mismatch, "m2 tensor shape mismatch at triple (" +
                                          std::to_string(i) + "," + std::to_string(j) + "," +
                                          std::to_string(k) + ")");
    F2Matrix m_ij = verified_m1(data, {i, j});
    F2Matrix m_jk = verified_m1(data, {j, k});
    F2Matrix m_ik = verified_m1(data, {i, k});

    // Leibniz: m1(m2(a,b)) = m2(m1 a, b) + m2(a, m1 b), a in Hom(j,k), b in Hom(i,j).
    for (int b = 0; b < t.d_b; ++b)
      for (int c = 0; c < t.d_c; ++c)
        for (int out = 0; out < t.d_out; ++out) {
          int lhs = 0, rhs = 0;
          for (int d = 0; d < t.d_out; ++d) lhs ^= m_ik.at(out, d) & t.at(d, b, c);
          for (int d = 0; d < t.d_c; ++d) rhs ^= t.at(out, b, d) & m_jk.at(d, c);
          for (int d = 0; d < t.d_b; ++d) rhs ^= t.at(out, d, c) & m_ij.at(d, b);
          if (lhs != rhs) {
            AInfReport w;
            w.relation = "leibniz";
            w.triple = triple;
            w.row = out;
            w.col = b;
            w.slot = c;
            w.witness = "Leibniz fails at triple (" + std::to_string(i) + "," +
                        std::to_string(j) + "," + std::to_string(k) + ") inputs (b=" +
                        std::to_string(b) + ", a=" + std::to_string(c) + ") component " +
                        std::to_string(out);
            return failed(w);
          }
        }

    // Strict unitality whenever an identity sits in a slot.
    if (i == j || j == k) {
      for (int b = 0; b < t.d_b; ++b)
        for (int c = 0; c < t.d_c; ++c)
          for (int out = 0; out < t.d_out; ++out) {
            int expect = (i == j) ? (out == c ? 1 : 0) : (out == b ? 1 : 0);
            if (t.at(out, b, c) != expect) {
              AInfReport w;
              w.relation = "unit";
              w.triple = triple;
              w.row = out;
              w.col = b;
              w.slot = c;
              w.witness = "strict unitality fails at triple (" + std::to_string(i) + "," +
                          std::to_string(j) + "," + std::to_string(k) + ") component " +
                          std::to_string(out);
              return failed(w);
            }
          }
    }
  }
  return rep;
}

PLLattice make_pl_lattice(std::vector<std::string> basis, Eigen::MatrixXi pairing) {
  if (pairing.rows() != pairing.cols() ||
      pairing.rows() != static_cast<Eigen::Index>(basis.size()))
    fail(ErrorCode::shape_mismatch, "pairing must be square over the basis");
  if (pairing != (-pairing.transpose()).eval() || pairing.diagonal().any())
    fail(ErrorCode::precondition, "pairing must be antisymmetric with zero diagonal");
  return {std::move(basis), std::move(pairing)};
}

Eigen::VectorXi pl_transform(const PLLattice& lat, const Eigen::VectorXi& c,
                             const Eigen::VectorXi& x) {
  if (c.size() != lat.pairing.rows() || x.size() != lat.pairing.rows())
    fail(ErrorCode::shape_mismatch, "classes must live in the lattice");
  int pair = x.dot(lat.pairing * c);
  return x + pair * c;
}

int wall_crossing_predict(int n12, int n23, int n13) { return (n13 + n12 * n23) & 1; }

Polynomial CoefficientFamily::at(double t) const {
  std::vector<cplx> c(std::max(base.size(), velocity.size()), cplx(0, 0));
  for (size_t k = 0; k < base.size(); ++k) c[k] += base[k];
  for (size_t k = 0; k < velocity.size(); ++k) c[k] += t * velocity[k];
  return Polynomial(std::move(c));
}

namespace {

std::map<std::pair<int, int>, int> count_all_pairs(const Polynomial& F,
                                                   const std::vector<int>& slot_of_label,
                                                   const ShootingConfig& cfg,
                                                   const Tolerances& tol) {
  std::vector<CriticalDatum> crit = critical_points(F, tol);
  std::map<std::pair<int, int>, int> counts;
  const int n = static_cast<int>(slot_of_label.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      try {
        counts[{a, b}] =
            find_connections(F, crit, slot_of_label[a], slot_of_label[b], cfg, tol).count_mod2;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::interior_critical_value ||
            e.code() == ErrorCode::degenerate_values)
          fail(ErrorCode::count_undefined,
               "count " + pair_name({a, b}) + " undefined at an endpoint: " + e.what());
        throw;
      }
    }
  return counts;
}

}  // namespace

WallCrossingEvent deform_and_recount(const CoefficientFamily& fam, double t_before,
                                     double t_after, std::pair<int, int> pair,
                                     const ShootingConfig& cfg, const Tolerances& tol) {
  WallCrossingEvent ev;
  ev.frame = pair;
  ev.t_before = t_before;
  ev.t_after = t_after;
  ev.t_cross = std::numeric_limits<double>::quiet_NaN();

  std::vector<CriticalDatum> before = critical_points(fam.at(t_before), tol);
  const int n = static_cast<int>(before.size());
  if (n != 3)
    fail(ErrorCode::invalid_argument,
         "wall-crossing recounts support exactly three critical points, got " +
             std::to_string(n));
  const int i = pair.first, k = pair.second;
  if (i < 0 || i >= n || k < 0 || k >= n || i == k)
    fail(ErrorCode::invalid_argument, "frame pair out of range");
  ev.moving = 3 - i - k;

  // Labels follow the critical points continuously (nearest-point matching
  // step to step); the same scan watches the orientation of the middle
  // value against the (i,k) segment.
  const int m = ev.moving;
  const int scan = 800;
  int sign_prev = 0;
  std::vector<cplx> pts = {before[0].point, before[1].point, before[2].point};
  std::vector<int> lab = {0, 1, 2};  // lab[slot] = label
  double last_t = t_before;
  for (int s = 0; s <= scan; ++s) {
    double t = t_before + (t_after - t_before) * s / scan;
    std::vector<CriticalDatum> cur = critical_points(fam.at(t), tol);
    std::vector<int> new_lab(3, -1);
    std::vector<char> used(3, 0);
    for (int a = 0; a < 3; ++a) {
      int best = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int b = 0; b < 3; ++b) {
        double d = std::abs(cur[a].point - pts[b]);
        if (d < bd) {
          bd = d;
          best = b;
        }
      }
      if (used[best])
        fail(ErrorCode::inconclusive, "tracking ambiguity in crossing scan");
      used[best] = 1;
      new_lab[a] = lab[best];
    }
    lab = new_lab;
    for (int a = 0; a < 3; ++a) pts[a] = cur[a].point;

    cplx v[3];
    for (int a = 0; a < 3; ++a) v[lab[a]] = cur[a].value;
    cplx seg = v[k] - v[i], rel = v[m] - v[i];
    double cross = seg.real() * rel.imag() - seg.imag() * rel.real();
    double proj = (seg.real() * rel.real() + seg.imag() * rel.imag()) / std::norm(seg);
    int sign = cross > 0 ? 1 : (cross < 0 ? -1 : 0);
    if (s > 0 && sign != 0 && sign_prev != 0 && sign != sign_prev) {
      if (proj > 0.05 && proj < 0.95) {
        ++ev.crossings;
        ev.t_cross = 0.5 * (last_t + t);
      }
    }
    if (sign != 0) sign_prev = sign;
    last_t = t;
  }
  if (ev.crossings > 1)
    fail(ErrorCode::multiple_crossings,
         std::to_string(ev.crossings) + " crossings of the " + pair_name(pair) + " segment");

  // slot_of_label maps: identity at t_before; from the tracked labels at t_after.
  std::vector<int> slot_before = {0, 1, 2};
  std::vector<int> slot_after(3);
  for (int slot = 0; slot < 3; ++slot) slot_after[lab[slot]] = slot;

  ev.counts_before = count_all_pairs(fam.at(t_before), slot_before, cfg, tol);
  ev.recounted_counts = count_all_pairs(fam.at(t_after), slot_after, cfg, tol);

  ev.predicted_counts = ev.counts_before;
  if (ev.crossings == 1) {
    ev.predicted_counts[{i, k}] = wall_crossing_predict(
        ev.counts_before.at({i, m}), ev.counts_before.at({m, k}), ev.counts_before.at({i, k}));
    ev.predicted_counts[{k, i}] = wall_crossing_predict(
        ev.counts_before.at({k, m}), ev.counts_before.at({m, i}), ev.counts_before.at({k, i}));
  }
  ev.agree = ev.predicted_counts == ev.recounted_counts;
  return ev;
}

std::vector<ExceptionalAngle> exceptional_angles(const std::vector<cplx>& values) {
  const int n = static_cast<int>(values.size());
  for (const auto& v : values)
    if (std::abs(v) == 0.0) fail(ErrorCode::value_at_origin, "value at the origin has no angle");

  auto order_at = [&](double alpha) {
    std::vector<int> ord(n);
    for (int i = 0; i < n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      return clockwise_angle_from(alpha, values[a]) < clockwise_angle_from(alpha, values[b]);
    });
    return ord;
  };

  std::vector<ExceptionalAngle> out;
  for (int m = 0; m < n; ++m) {
    ExceptionalAngle e;
    double a = std::fmod(std::arg(values[m]), kTwoPi);
    if (a < 0) a += kTwoPi;
    e.angle = a;
    e.moving = m;
    double gap = kTwoPi;
    for (int j = 0; j < n; ++j) {
      if (j == m) continue;
      double d = std::abs(std::remainder(std::arg(values[j]) - std::arg(values[m]), kTwoPi));
      gap = std::min(gap, d);
    }
    double eps = std::min(1e-6, gap / 100.0);
    e.order_before = order_at(a - eps);
    e.order_after = order_at(a + eps);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const ExceptionalAngle& a, const ExceptionalAngle& b) { return a.angle < b.angle; });
  return out;
}

}  // namespace fsforge
