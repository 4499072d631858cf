#include "consensus/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "consensus/errors.hpp"

namespace consensus {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

LinearProgram LinearProgram::with_variables(std::size_t n, Sense sense) {
  const auto nn = static_cast<Eigen::Index>(n);
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(nn);
  lp.sense = sense;
  lp.a_ineq.resize(0, nn);
  lp.a_eq.resize(0, nn);
  lp.b_ineq.resize(0);
  lp.b_eq.resize(0);
  lp.lower = Eigen::VectorXd::Zero(nn);
  lp.upper = Eigen::VectorXd::Constant(nn, kInf);
  return lp;
}

namespace {

void append_row(Eigen::MatrixXd& a, Eigen::VectorXd& b, const Eigen::RowVectorXd& row,
                double rhs) {
  if (row.size() != a.cols()) throw ArgumentError("linear program: row has wrong length");
  a.conservativeResize(a.rows() + 1, Eigen::NoChange);
  a.row(a.rows() - 1) = row;
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
}

}  // namespace

void LinearProgram::add_inequality(const Eigen::RowVectorXd& row, double rhs) {
  append_row(a_ineq, b_ineq, row, rhs);
}

void LinearProgram::add_equality(const Eigen::RowVectorXd& row, double rhs) {
  append_row(a_eq, b_eq, row, rhs);
}

void LinearProgram::validate() const {
  const auto n = c.size();
  if (a_ineq.cols() != n && a_ineq.rows() > 0)
    throw ArgumentError("linear program: inequality matrix has wrong column count");
  if (a_eq.cols() != n && a_eq.rows() > 0)
    throw ArgumentError("linear program: equality matrix has wrong column count");
  if (a_ineq.rows() != b_ineq.size())
    throw ArgumentError("linear program: inequality rhs length mismatch");
  if (a_eq.rows() != b_eq.size())
    throw ArgumentError("linear program: equality rhs length mismatch");
  if (lower.size() != n || upper.size() != n)
    throw ArgumentError("linear program: bound vectors have wrong length");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j))
      throw ArgumentError("linear program: bounds of variable " + std::to_string(j) +
                          " have low > high");
    if (lower(j) == kInf || upper(j) == -kInf)
      throw ArgumentError("linear program: variable " + std::to_string(j) +
                          " has an empty bound interval");
  }
  if (!c.allFinite() || !b_ineq.allFinite() || !b_eq.allFinite() || !a_ineq.allFinite() ||
      !a_eq.allFinite())
    throw ArgumentError("linear program: non-finite coefficient");
}

double max_violation(const LinearProgram& lp, const Eigen::VectorXd& z) {
  double worst = 0.0;
  if (lp.a_ineq.rows() > 0) {
    Eigen::VectorXd r = lp.a_ineq * z - lp.b_ineq;
    worst = std::max(worst, r.maxCoeff());
  }
  if (lp.a_eq.rows() > 0) {
    Eigen::VectorXd r = lp.a_eq * z - lp.b_eq;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    worst = std::max(worst, lp.lower(j) - z(j));
    worst = std::max(worst, z(j) - lp.upper(j));
  }
  return worst;
}

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// How an original variable is expressed through internal columns, all of
// which have lower bound zero.
struct VariableMap {
  enum class Kind { Shifted, Mirrored, Split } kind;
  Eigen::Index column;
  double offset;  // lower bound (Shifted) or upper bound (Mirrored)
};

enum class IterateResult { Optimal, Unbounded, IterationLimit };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), opt_(options) {
    build();
  }

  LpSolution run() {
    LpSolution sol;
    sol.z = Eigen::VectorXd::Zero(lp_.c.size());

    if (num_artificial_ > 0) {
      auto r = iterate(d1_, /*phase_one=*/true);
      if (r == IterateResult::IterationLimit) return finish(sol, LpStatus::IterationLimit);
      double infeasibility = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i)
        if (is_artificial(basis_[static_cast<std::size_t>(i)])) infeasibility += beta_(i);
      if (infeasibility > opt_.feasibility_tol * (1.0 + rhs_scale_))
        return finish(sol, LpStatus::Infeasible);
      drive_out_artificials();
    }

    auto r = iterate(d2_, /*phase_one=*/false);
    if (r == IterateResult::Unbounded) return finish(sol, LpStatus::Unbounded);
    if (r == IterateResult::IterationLimit) return finish(sol, LpStatus::IterationLimit);
    return finish(sol, LpStatus::Optimal);
  }

 private:
  bool is_artificial(Eigen::Index col) const { return col >= first_artificial_; }

  void build() {
    const auto n = lp_.c.size();
    const auto m_ineq = lp_.a_ineq.rows();
    const auto m_eq = lp_.a_eq.rows();
    rows_ = m_ineq + m_eq;

    // Structural columns.
    Eigen::Index cols = 0;
    maps_.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lo = lp_.lower(j), hi = lp_.upper(j);
      if (std::isfinite(lo)) {
        maps_.push_back({VariableMap::Kind::Shifted, cols, lo});
        cols += 1;
      } else if (std::isfinite(hi)) {
        maps_.push_back({VariableMap::Kind::Mirrored, cols, hi});
        cols += 1;
      } else {
        maps_.push_back({VariableMap::Kind::Split, cols, 0.0});
        cols += 2;
      }
    }
    structural_ = cols;
    const Eigen::Index first_slack = cols;
    cols += m_ineq;

    // Row data in terms of internal columns, before sign normalisation.
    Eigen::MatrixXd a(rows_, structural_);
    a.setZero();
    Eigen::VectorXd rhs(rows_);
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(structural_);
    const double sign = lp_.sense == Sense::Maximize ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& map = maps_[static_cast<std::size_t>(j)];
      const double cj = sign * lp_.c(j);
      switch (map.kind) {
        case VariableMap::Kind::Shifted:
          cost(map.column) = cj;
          break;
        case VariableMap::Kind::Mirrored:
          cost(map.column) = -cj;
          break;
        case VariableMap::Kind::Split:
          cost(map.column) = cj;
          cost(map.column + 1) = -cj;
          break;
      }
    }
    auto fill_row = [&](Eigen::Index row, const auto& coeffs, double b) {
      double shifted = b;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = coeffs(j);
        if (v == 0.0) continue;
        const auto& map = maps_[static_cast<std::size_t>(j)];
        switch (map.kind) {
          case VariableMap::Kind::Shifted:
            a(row, map.column) = v;
            shifted -= v * map.offset;
            break;
          case VariableMap::Kind::Mirrored:
            a(row, map.column) = -v;
            shifted -= v * map.offset;
            break;
          case VariableMap::Kind::Split:
            a(row, map.column) = v;
            a(row, map.column + 1) = -v;
            break;
        }
      }
      rhs(row) = shifted;
    };
    for (Eigen::Index i = 0; i < m_ineq; ++i) fill_row(i, lp_.a_ineq.row(i), lp_.b_ineq(i));
    for (Eigen::Index i = 0; i < m_eq; ++i)
      fill_row(m_ineq + i, lp_.a_eq.row(i), lp_.b_eq(i));
    rhs_scale_ = rows_ > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0;

    // A row needs an artificial unless it is an inequality whose slack can
    // start basic at a nonnegative value.
    std::vector<char> needs_artificial(static_cast<std::size_t>(rows_), 0);
    for (Eigen::Index i = 0; i < rows_; ++i)
      needs_artificial[static_cast<std::size_t>(i)] = (i >= m_ineq || rhs(i) < 0.0);
    num_artificial_ = std::count(needs_artificial.begin(), needs_artificial.end(), 1);
    first_artificial_ = cols;
    cols_ = cols + num_artificial_;

    t_ = RowMajorMatrix::Zero(rows_, cols_);
    beta_.resize(rows_);
    basis_.assign(static_cast<std::size_t>(rows_), 0);
    ub_ = Eigen::VectorXd::Constant(cols_, kInf);
    at_upper_.assign(static_cast<std::size_t>(cols_), 0);
    is_basic_.assign(static_cast<std::size_t>(cols_), 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& map = maps_[static_cast<std::size_t>(j)];
      if (map.kind == VariableMap::Kind::Shifted) ub_(map.column) = lp_.upper(j) - lp_.lower(j);
    }

    Eigen::Index next_art = first_artificial_;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double row_sign = rhs(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(structural_) = row_sign * a.row(i);
      beta_(i) = row_sign * rhs(i);
      if (i < m_ineq) t_(i, first_slack + i) = row_sign;
      Eigen::Index basic;
      if (needs_artificial[static_cast<std::size_t>(i)]) {
        basic = next_art++;
        t_(i, basic) = 1.0;
      } else {
        basic = first_slack + i;
      }
      basis_[static_cast<std::size_t>(i)] = basic;
      is_basic_[static_cast<std::size_t>(basic)] = 1;
    }

    d2_ = Eigen::VectorXd::Zero(cols_);
    d2_.head(structural_) = cost;
    d1_ = Eigen::VectorXd::Zero(cols_);
    d1_.tail(num_artificial_).setOnes();
    for (Eigen::Index i = 0; i < rows_; ++i)
      if (is_artificial(basis_[static_cast<std::size_t>(i)])) d1_ -= t_.row(i).transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) d1_(basis_[static_cast<std::size_t>(i)]) = 0.0;

    max_iterations_ = opt_.max_iterations != 0
                          ? opt_.max_iterations
                          : static_cast<std::size_t>(20 * (rows_ + cols_) + 100);
  }

  // Pricing: returns the entering column or -1 at optimality.
  Eigen::Index price(const Eigen::VectorXd& d, bool bland) const {
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index j = 0; j < cols_; ++j) {
      if (is_basic_[static_cast<std::size_t>(j)]) continue;
      const double dj = d(j);
      double score;
      if (at_upper_[static_cast<std::size_t>(j)]) {
        if (dj <= opt_.optimality_tol) continue;
        score = dj;
      } else {
        if (dj >= -opt_.optimality_tol || ub_(j) <= 0.0) continue;
        score = -dj;
      }
      if (bland) return j;
      if (score > best_score) {
        best = j;
        best_score = score;
      }
    }
    return best;
  }

  IterateResult iterate(Eigen::VectorXd& d, bool phase_one) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= max_iterations_) return IterateResult::IterationLimit;
      const Eigen::Index q = price(d, bland);
      if (q < 0) return IterateResult::Optimal;
      ++iterations_;

      const double dir = at_upper_[static_cast<std::size_t>(q)] ? -1.0 : 1.0;
      double step_len = ub_(q);
      Eigen::Index leave_row = -1;
      double leave_gain = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double g = dir * t_(i, q);
        double limit;
        if (g > opt_.pivot_tol) {
          limit = std::max(beta_(i), 0.0) / g;
        } else if (g < -opt_.pivot_tol) {
          const double cap = ub_(basis_[static_cast<std::size_t>(i)]);
          if (!std::isfinite(cap)) continue;
          limit = std::min(beta_(i) - cap, 0.0) / g;
        } else {
          continue;
        }
        if (limit < step_len - 1e-12) {
          step_len = limit;
          leave_row = i;
          leave_gain = g;
        } else if (leave_row >= 0 && limit <= step_len + 1e-12) {
          const bool take =
              bland ? basis_[static_cast<std::size_t>(i)] <
                          basis_[static_cast<std::size_t>(leave_row)]
                    : std::abs(g) > std::abs(leave_gain);
          if (take) {
            step_len = std::min(step_len, limit);
            leave_row = i;
            leave_gain = g;
          }
        }
      }
      if (!std::isfinite(step_len)) {
        if (phase_one) return IterateResult::Optimal;  // cannot happen; bounded below
        return IterateResult::Unbounded;
      }

      if (step_len <= 1e-14) {
        if (++degenerate_run > opt_.degenerate_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      // Move basic variables.
      if (step_len != 0.0)
        for (Eigen::Index i = 0; i < rows_; ++i) {
          const double a = t_(i, q);
          if (a != 0.0) beta_(i) -= step_len * dir * a;
        }

      if (leave_row < 0) {
        // Entering variable hits its own opposite bound.
        at_upper_[static_cast<std::size_t>(q)] ^= 1;
        continue;
      }

      const Eigen::Index leaving = basis_[static_cast<std::size_t>(leave_row)];
      const double entering_value = dir > 0 ? step_len : ub_(q) - step_len;
      at_upper_[static_cast<std::size_t>(leaving)] = leave_gain < 0.0 ? 1 : 0;
      is_basic_[static_cast<std::size_t>(leaving)] = 0;
      pivot(leave_row, q);
      beta_(leave_row) = entering_value;
      basis_[static_cast<std::size_t>(leave_row)] = q;
      is_basic_[static_cast<std::size_t>(q)] = 1;
      at_upper_[static_cast<std::size_t>(q)] = 0;
      clean_beta();
    }
  }

  void clean_beta() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (beta_(i) < 0.0 && beta_(i) > -opt_.feasibility_tol) beta_(i) = 0.0;
      const double cap = ub_(basis_[static_cast<std::size_t>(i)]);
      if (beta_(i) > cap && beta_(i) < cap + opt_.feasibility_tol) beta_(i) = cap;
    }
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    const double p = t_(r, q);
    t_.row(r) /= p;
    t_(r, q) = 1.0;
    nz_.clear();
    for (Eigen::Index j = 0; j < cols_; ++j)
      if (t_(r, j) != 0.0) nz_.push_back(j);
    const bool sparse = nz_.size() * 3 < static_cast<std::size_t>(cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double a = t_(i, q);
      if (a == 0.0) continue;
      if (sparse) {
        double* row = t_.row(i).data();
        const double* prow = t_.row(r).data();
        for (auto j : nz_) row[j] -= a * prow[j];
      } else {
        t_.row(i) -= a * t_.row(r);
      }
      t_(i, q) = 0.0;
    }
    for (Eigen::VectorXd* d : {&d1_, &d2_}) {
      const double dq = (*d)(q);
      if (dq == 0.0) continue;
      for (auto j : nz_) (*d)(j) -= dq * t_(r, j);
      (*d)(q) = 0.0;
    }
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      Eigen::Index best = -1;
      double best_abs = 1e-9;
      for (Eigen::Index j = 0; j < first_artificial_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        const double v = std::abs(t_(i, j));
        if (v > best_abs) {
          best = j;
          best_abs = v;
        }
      }
      if (best < 0) continue;  // redundant row; its artificial stays basic at 0
      const Eigen::Index art = basis_[static_cast<std::size_t>(i)];
      const double value = at_upper_[static_cast<std::size_t>(best)] ? ub_(best) : 0.0;
      // beta_(i) is ~0, so the entering column keeps its current value and
      // the other basics do not move.
      is_basic_[static_cast<std::size_t>(art)] = 0;
      at_upper_[static_cast<std::size_t>(art)] = 0;
      pivot(i, best);
      beta_(i) = value;
      basis_[static_cast<std::size_t>(i)] = best;
      is_basic_[static_cast<std::size_t>(best)] = 1;
      at_upper_[static_cast<std::size_t>(best)] = 0;
    }
    for (Eigen::Index j = first_artificial_; j < cols_; ++j) {
      ub_(j) = 0.0;
      at_upper_[static_cast<std::size_t>(j)] = 0;
    }
  }

  LpSolution& finish(LpSolution& sol, LpStatus status) {
    sol.status = status;
    sol.iterations = iterations_;
    Eigen::VectorXd values = Eigen::VectorXd::Zero(cols_);
    for (Eigen::Index j = 0; j < cols_; ++j)
      if (!is_basic_[static_cast<std::size_t>(j)] && at_upper_[static_cast<std::size_t>(j)])
        values(j) = ub_(j);
    for (Eigen::Index i = 0; i < rows_; ++i) values(basis_[static_cast<std::size_t>(i)]) = beta_(i);
    for (Eigen::Index j = 0; j < lp_.c.size(); ++j) {
      const auto& map = maps_[static_cast<std::size_t>(j)];
      switch (map.kind) {
        case VariableMap::Kind::Shifted:
          sol.z(j) = map.offset + values(map.column);
          break;
        case VariableMap::Kind::Mirrored:
          sol.z(j) = map.offset - values(map.column);
          break;
        case VariableMap::Kind::Split:
          sol.z(j) = values(map.column) - values(map.column + 1);
          break;
      }
    }
    sol.objective = lp_.c.dot(sol.z);
    return sol;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::vector<VariableMap> maps_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::Index structural_ = 0;
  Eigen::Index first_artificial_ = 0;
  Eigen::Index num_artificial_ = 0;
  double rhs_scale_ = 0.0;
  RowMajorMatrix t_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd ub_;
  Eigen::VectorXd d1_, d2_;
  std::vector<Eigen::Index> basis_;
  std::vector<char> at_upper_;
  std::vector<char> is_basic_;
  std::vector<Eigen::Index> nz_;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  return Simplex(lp, options).run();
}

}  // namespace consensus
