#pragma once

// Posterior probabilities of first-order stochastic (FSD), generalised
// Lorenz (GLD) and Lorenz (LD) dominance between two years, estimated by
// pairing draws by index and checking weak inequalities on a u-grid.

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "incdyn/dists.hpp"
#include "incdyn/error.hpp"
#include "incdyn/mcmc.hpp"

namespace incdyn {

/// Strictly increasing population shares in (0,1).
class UGrid {
 public:
  explicit UGrid(std::vector<double> u) : u_(std::move(u)) {
    if (u_.empty()) throw DomainError("u-grid is empty");
    for (std::size_t i = 0; i < u_.size(); ++i) {
      if (!(u_[i] > 0.0 && u_[i] < 1.0)) throw DomainError("u-grid values must lie in (0,1)");
      if (i > 0 && !(u_[i] > u_[i - 1])) throw DomainError("u-grid must be strictly increasing");
    }
  }

  /// u_i = i / (points + 1), i = 1..points. The default is 0.001..0.999.
  static UGrid uniform(std::size_t points = 999) {
    if (points == 0) throw UsageError("grid needs at least one point");
    std::vector<double> u(points);
    const double denom = static_cast<double>(points + 1);
    for (std::size_t i = 0; i < points; ++i) u[i] = static_cast<double>(i + 1) / denom;
    return UGrid(std::move(u));
  }

  /// The poorest 10%: u = 0.001..0.100.
  static UGrid poorest_tenth() { return uniform(999).restrict(0.001, 0.100); }

  /// Points of this grid inside [lo, hi] (with a small tolerance so that
  /// decimal bounds such as 0.1 match grid values).
  UGrid restrict(double lo, double hi) const {
    if (!(lo < hi)) throw UsageError("range must satisfy lo < hi");
    constexpr double eps = 1e-12;
    std::vector<double> out;
    for (double v : u_) {
      if (v >= lo - eps && v <= hi + eps) out.push_back(v);
    }
    if (out.empty()) throw UsageError("range selects no grid points");
    return UGrid(std::move(out));
  }

  const std::vector<double>& values() const { return u_; }
  std::size_t size() const { return u_.size(); }
  double operator[](std::size_t i) const { return u_[i]; }

 private:
  std::vector<double> u_;
};

enum class Relation { FSD, GLD, LD };
enum class CurveKind { Quantile, GeneralisedLorenz, Lorenz };

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::FSD: return "FSD";
    case Relation::GLD: return "GLD";
    case Relation::LD: return "LD";
  }
  return "?";
}

inline Relation parse_relation(std::string_view s) {
  std::string up(s);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "FSD") return Relation::FSD;
  if (up == "GLD") return Relation::GLD;
  if (up == "LD") return Relation::LD;
  throw UsageError("unknown relation '" + std::string(s) + "' (expected fsd, gld or ld)");
}

inline CurveKind curve_kind_for(Relation r) {
  switch (r) {
    case Relation::FSD: return CurveKind::Quantile;
    case Relation::GLD: return CurveKind::GeneralisedLorenz;
    case Relation::LD: return CurveKind::Lorenz;
  }
  return CurveKind::Quantile;
}

/// Curve of one parameter vector on the grid; empty when a Lorenz-type
/// curve is requested and the mean does not exist.
inline std::optional<std::vector<double>> curve_values(const ParameterVector& par, CurveKind kind,
                                                       const UGrid& grid) {
  std::vector<double> out(grid.size());
  if (kind == CurveKind::Quantile) {
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = quantile(par, grid[i]);
    return out;
  }
  const auto mu = mean(par).value;
  if (!mu) return std::nullopt;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double l = lorenz(par, grid[i]);
    out[i] = kind == CurveKind::Lorenz ? l : *mu * l;
  }
  return out;
}

/// Curves of every kept draw of one year (rows = draws, columns = grid).
struct CurveMatrix {
  CurveKind kind = CurveKind::Quantile;
  Eigen::MatrixXd values;
  std::vector<char> valid;

  std::size_t draws() const { return valid.size(); }
};

/// Evaluates Lorenz and generalised Lorenz together, since GL = mean x L.
struct YearCurves {
  CurveMatrix quantile;
  CurveMatrix lorenz;
  CurveMatrix gen_lorenz;

  const CurveMatrix& for_relation(Relation r) const {
    switch (r) {
      case Relation::FSD: return quantile;
      case Relation::GLD: return gen_lorenz;
      case Relation::LD: return lorenz;
    }
    return quantile;
  }
};

inline std::size_t year_index(const DrawSet& draws, const std::string& label) {
  for (std::size_t t = 0; t < draws.years.size(); ++t) {
    if (draws.years[t] == label) return t;
  }
  throw UsageError("year '" + label + "' is not in the fitted panel");
}

inline YearCurves year_curves(const DrawSet& draws, std::size_t t, const UGrid& grid, bool need_quantile = true,
                              bool need_lorenz = true) {
  if (t >= draws.num_years()) throw UsageError("year index out of range");
  const auto M = static_cast<Eigen::Index>(draws.num_draws());
  const auto G = static_cast<Eigen::Index>(grid.size());
  YearCurves out;
  out.quantile.kind = CurveKind::Quantile;
  out.lorenz.kind = CurveKind::Lorenz;
  out.gen_lorenz.kind = CurveKind::GeneralisedLorenz;
  if (need_quantile) {
    out.quantile.values.resize(M, G);
    out.quantile.valid.assign(static_cast<std::size_t>(M), 1);
  }
  if (need_lorenz) {
    out.lorenz.values.resize(M, G);
    out.gen_lorenz.values.resize(M, G);
    out.lorenz.valid.assign(static_cast<std::size_t>(M), 0);
    out.gen_lorenz.valid.assign(static_cast<std::size_t>(M), 0);
  }
  for (Eigen::Index m = 0; m < M; ++m) {
    const auto par = draws.params(static_cast<std::size_t>(m), t);
    if (need_quantile) {
      for (Eigen::Index i = 0; i < G; ++i) out.quantile.values(m, i) = quantile(par, grid[static_cast<std::size_t>(i)]);
    }
    if (need_lorenz) {
      const auto mu = mean(par).value;
      if (!mu) continue;
      out.lorenz.valid[static_cast<std::size_t>(m)] = 1;
      out.gen_lorenz.valid[static_cast<std::size_t>(m)] = 1;
      for (Eigen::Index i = 0; i < G; ++i) {
        const double l = lorenz(par, grid[static_cast<std::size_t>(i)]);
        out.lorenz.values(m, i) = l;
        out.gen_lorenz.values(m, i) = *mu * l;
      }
    }
  }
  return out;
}

struct DominanceReport {
  Relation relation = Relation::FSD;
  double p_a_dominates_b = 0.0;
  double p_b_dominates_a = 0.0;
  double p_neither = 0.0;
  std::vector<double> grid;
  std::vector<double> curve_ab;  // per-u fraction of draws with C_A(u) >= C_B(u)
  std::vector<double> curve_ba;
  std::size_t draw_count = 0;
  std::size_t excluded_draws = 0;
};

/// Core estimator on precomputed curves. Draw m of A is paired with draw m
/// of B; a pair where either curve is invalid satisfies neither direction.
/// grid_columns selects the columns of the matrices to compare (all when
/// empty), so a restricted grid can reuse full-grid curves.
inline DominanceReport dominance_from_curves(const CurveMatrix& a, const CurveMatrix& b, Relation relation,
                                             const UGrid& grid, const std::vector<Eigen::Index>& grid_columns = {}) {
  if (a.draws() != b.draws()) {
    std::ostringstream os;
    os << "dominance: kept-draw counts differ (" << a.draws() << " vs " << b.draws() << ")";
    throw UsageError(os.str());
  }
  if (a.draws() == 0) throw DomainError("dominance: no draws");
  std::vector<Eigen::Index> cols = grid_columns;
  if (cols.empty()) {
    if (static_cast<std::size_t>(a.values.cols()) != grid.size()) throw DomainError("dominance: grid mismatch");
    cols.resize(grid.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = static_cast<Eigen::Index>(i);
  }
  if (cols.size() != grid.size()) throw DomainError("dominance: grid mismatch");

  const std::size_t M = a.draws();
  const std::size_t G = cols.size();
  DominanceReport r;
  r.relation = relation;
  r.grid = grid.values();
  r.draw_count = M;
  std::vector<std::size_t> count_ab(G, 0), count_ba(G, 0);
  std::size_t joint_ab = 0, joint_ba = 0;
  for (std::size_t m = 0; m < M; ++m) {
    if (!a.valid[m] || !b.valid[m]) {
      ++r.excluded_draws;
      continue;
    }
    const auto row = static_cast<Eigen::Index>(m);
    bool all_ab = true, all_ba = true;
    for (std::size_t i = 0; i < G; ++i) {
      const double ca = a.values(row, cols[i]);
      const double cb = b.values(row, cols[i]);
      const bool ab = ca >= cb;
      const bool ba = cb >= ca;
      count_ab[i] += ab;
      count_ba[i] += ba;
      all_ab = all_ab && ab;
      all_ba = all_ba && ba;
    }
    joint_ab += all_ab;
    joint_ba += all_ba;
  }
  const double Md = static_cast<double>(M);
  r.p_a_dominates_b = static_cast<double>(joint_ab) / Md;
  r.p_b_dominates_a = static_cast<double>(joint_ba) / Md;
  r.p_neither = std::max(0.0, 1.0 - r.p_a_dominates_b - r.p_b_dominates_a);
  r.curve_ab.resize(G);
  r.curve_ba.resize(G);
  for (std::size_t i = 0; i < G; ++i) {
    r.curve_ab[i] = static_cast<double>(count_ab[i]) / Md;
    r.curve_ba[i] = static_cast<double>(count_ba[i]) / Md;
  }
  return r;
}

/// P(year A of drawsA dominates year B of drawsB) under `relation`.
inline DominanceReport dominance_prob(const DrawSet& draws_a, std::size_t year_a, const DrawSet& draws_b,
                                      std::size_t year_b, Relation relation, const UGrid& grid) {
  if (draws_a.num_draws() != draws_b.num_draws()) {
    std::ostringstream os;
    os << "dominance: kept-draw counts differ (" << draws_a.num_draws() << " vs " << draws_b.num_draws() << ")";
    throw UsageError(os.str());
  }
  const bool fsd = relation == Relation::FSD;
  const auto ca = year_curves(draws_a, year_a, grid, fsd, !fsd);
  const auto cb = year_curves(draws_b, year_b, grid, fsd, !fsd);
  return dominance_from_curves(ca.for_relation(relation), cb.for_relation(relation), relation, grid);
}

inline std::vector<double> probability_curve(const DrawSet& draws_a, std::size_t year_a, const DrawSet& draws_b,
                                             std::size_t year_b, Relation relation, const UGrid& grid) {
  return dominance_prob(draws_a, year_a, draws_b, year_b, relation, grid).curve_ab;
}

/// Columns of `full` holding the values of `sub` (sub must be a subset).
inline std::vector<Eigen::Index> grid_columns(const UGrid& full, const UGrid& sub) {
  std::vector<Eigen::Index> cols;
  cols.reserve(sub.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    while (j < full.size() && full[j] < sub[i] - 1e-15) ++j;
    if (j == full.size() || std::fabs(full[j] - sub[i]) > 1e-15) throw DomainError("grid is not a subset");
    cols.push_back(static_cast<Eigen::Index>(j));
  }
  return cols;
}

}  // namespace incdyn
