#include "crossdiff/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crossdiff/errors.hpp"

namespace crossdiff::nnls {

namespace {

// Lower-triangular factor of the passive-set Gram block, stored dense with
// stride n so rows can be appended in place.
class GrowingCholesky {
public:
  explicit GrowingCholesky(std::size_t n) : n_(n), l_(n * n, 0.0) {}

  std::size_t size() const { return p_; }

  // Attempt to append a column with Gram diagonal `gjj` and Gram couplings
  // `gpj` against the current passive set. Fails (returns false) when the
  // column is numerically dependent on the passive block.
  bool append(double gjj, const std::vector<double>& gpj) {
    // forward substitution: l = L^{-1} gpj
    for (std::size_t i = 0; i < p_; ++i) {
      double s = gpj[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_[i * n_ + k] * l_[p_ * n_ + k];
      l_[p_ * n_ + i] = s / l_[i * n_ + i];
    }
    double d = gjj;
    for (std::size_t k = 0; k < p_; ++k) d -= l_[p_ * n_ + k] * l_[p_ * n_ + k];
    if (!(d > 1e-13 * gjj)) return false;
    l_[p_ * n_ + p_] = std::sqrt(d);
    ++p_;
    return true;
  }

  void pop() { --p_; }

  // Solve (L L^T) x = rhs for the current passive block.
  void solve(std::vector<double>& rhs) const {
    for (std::size_t i = 0; i < p_; ++i) {
      double s = rhs[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_[i * n_ + k] * rhs[k];
      rhs[i] = s / l_[i * n_ + i];
    }
    for (std::size_t ii = p_; ii-- > 0;) {
      double s = rhs[ii];
      for (std::size_t k = ii + 1; k < p_; ++k) s -= l_[k * n_ + ii] * rhs[k];
      rhs[ii] = s / l_[ii * n_ + ii];
    }
  }

  void clear() { p_ = 0; }

private:
  std::size_t n_;
  std::size_t p_ = 0;
  std::vector<double> l_;
};

}  // namespace

NnlsResult solve(const std::vector<double>& a, std::size_t m, std::size_t n,
                 const std::vector<double>& b, const NnlsOptions& opts) {
  if (a.size() != m * n || b.size() != m) {
    throw InvalidArgumentError("nnls: inconsistent matrix/vector sizes");
  }
  NnlsResult out;
  out.weights.assign(n, 0.0);
  if (n == 0 || m == 0) return out;

  // Gram matrix and projected data, cached once.
  std::vector<double> gram(n * n, 0.0);
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = &a[i * n];
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = row[j];
      if (aij == 0.0) continue;
      f[j] += aij * b[i];
      for (std::size_t k = j; k < n; ++k) gram[j * n + k] += aij * row[k];
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < j; ++k) gram[j * n + k] = gram[k * n + j];

  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  const double dual_tol = opts.kkt_tol * std::max(1.0, fmax);
  const int cap = opts.max_iters > 0
                      ? opts.max_iters
                      : std::max<int>(100, 10 * static_cast<int>(n));

  std::vector<std::size_t> passive;          // ordered passive-set indices
  std::vector<char> in_passive(n, 0);
  std::vector<double> x(n, 0.0);
  std::vector<double> z;                     // passive-set trial solution
  std::vector<double> dual(n, 0.0);
  std::vector<double> gpj(n, 0.0);
  GrowingCholesky chol(n);

  auto resolve_passive = [&](std::vector<double>& rhs) {
    rhs.resize(passive.size());
    for (std::size_t i = 0; i < passive.size(); ++i) rhs[i] = f[passive[i]];
    chol.solve(rhs);
  };

  auto rebuild_cholesky = [&]() {
    chol.clear();
    std::vector<std::size_t> keep;
    keep.swap(passive);
    for (std::size_t j : keep) {
      gpj.resize(passive.size());
      for (std::size_t i = 0; i < passive.size(); ++i)
        gpj[i] = gram[j * n + passive[i]];
      if (!chol.append(gram[j * n + j], gpj)) {
        // dependent after removals: drop it from the passive set entirely
        in_passive[j] = 0;
        x[j] = 0.0;
        continue;
      }
      passive.push_back(j);
    }
  };

  int iters = 0;
  std::vector<char> rejected(n, 0);
  while (true) {
    if (++iters > cap) {
      throw SolverFailureError("nnls: iteration cap exceeded (" +
                               std::to_string(cap) + ")");
    }
    // dual = f - G x restricted to the zero set
    for (std::size_t j = 0; j < n; ++j) dual[j] = f[j];
    for (std::size_t idx : passive) {
      const double xj = x[idx];
      if (xj == 0.0) continue;
      const double* col = &gram[idx * n];
      for (std::size_t j = 0; j < n; ++j) dual[j] -= xj * col[j];
    }

    std::fill(rejected.begin(), rejected.end(), char{0});
    bool appended = false;
    while (!appended) {
      std::size_t best = n;
      double wmax = dual_tol;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_passive[j] || rejected[j]) continue;
        if (dual[j] > wmax) {
          wmax = dual[j];
          best = j;
        }
      }
      if (best == n) break;  // KKT satisfied or only dependent candidates left
      gpj.resize(passive.size());
      for (std::size_t i = 0; i < passive.size(); ++i)
        gpj[i] = gram[best * n + passive[i]];
      if (!chol.append(gram[best * n + best], gpj)) {
        rejected[best] = 1;
        continue;
      }
      passive.push_back(best);
      in_passive[best] = 1;
      resolve_passive(z);
      if (z.back() <= 0.0) {
        // proposed coordinate comes in nonpositive: reject as Lawson-Hanson does
        passive.pop_back();
        in_passive[best] = 0;
        chol.pop();
        rejected[best] = 1;
        continue;
      }
      appended = true;
    }
    if (!appended) break;

    // feasibility loop: pull the passive solution back onto the boundary
    while (true) {
      bool feasible = true;
      double alpha = std::numeric_limits<double>::infinity();
      std::size_t pivot = passive.size();
      for (std::size_t i = 0; i < passive.size(); ++i) {
        if (z[i] <= 0.0) {
          feasible = false;
          const double xi = x[passive[i]];
          const double step = xi / (xi - z[i]);
          if (step < alpha) {
            alpha = step;
            pivot = i;
          }
        }
      }
      if (feasible) break;
      if (++iters > cap) {
        throw SolverFailureError("nnls: iteration cap exceeded (" +
                                 std::to_string(cap) + ")");
      }
      for (std::size_t i = 0; i < passive.size(); ++i) {
        const std::size_t j = passive[i];
        x[j] += alpha * (z[i] - x[j]);
      }
      x[passive[pivot]] = 0.0;  // the pivot lands on the boundary exactly
      std::vector<std::size_t> keep;
      keep.reserve(passive.size());
      for (std::size_t i = 0; i < passive.size(); ++i) {
        const std::size_t j = passive[i];
        if (x[j] <= 0.0) {
          in_passive[j] = 0;
          x[j] = 0.0;
        } else {
          keep.push_back(j);
        }
      }
      passive.swap(keep);
      rebuild_cholesky();
      if (passive.empty()) {
        z.clear();
        break;
      }
      resolve_passive(z);
    }
    for (std::size_t j = 0; j < n; ++j)
      if (!in_passive[j]) x[j] = 0.0;
    for (std::size_t i = 0; i < passive.size(); ++i) x[passive[i]] = z[i];
  }

  out.weights = x;
  out.iterations = iters;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = -b[i];
    const double* row = &a[i * n];
    for (std::size_t idx : passive) r += row[idx] * x[idx];
    rss += r * r;
  }
  out.residual_norm = std::sqrt(rss);
  return out;
}

}  // namespace crossdiff::nnls
