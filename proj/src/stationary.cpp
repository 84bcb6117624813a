#include "sdemle/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdemle/errors.hpp"
#include "sdemle/quadrature.hpp"

namespace sdemle {

namespace {

constexpr double kTruncationSearchLimit = 1e3;

/// Composite Simpson over equally spaced tabulated values (even cell count).
double simpson_tabulated(const std::vector<double>& y, double dx) {
  const std::size_t n = y.size() - 1;
  double s = y[0] + y[n];
  for (std::size_t k = 1; k < n; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * y[k];
  return s * dx / 3.0;
}

struct ExponentEvaluator {
  const DiffusionModel& model;
  const ParamVec& theta;

  double integrand(double y) const {
    const double s = model.sigma(y);
    return model.drift(theta, y) / (s * s);
  }
  /// psi(x) = 2 int_0^x S/sigma^2 dy - 2 ln sigma(x), with the running
  /// integral anchored at base (base_x, base_int) to avoid recomputing.
  double raw_integral(double from, double to) const {
    if (from == to) return 0.0;
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-14;
    return adaptive_simpson([this](double y) { return integrand(y); }, from, to, opts);
  }
  double psi_from(double base_x, double base_int, double x) const {
    return 2.0 * (base_int + raw_integral(base_x, x)) - 2.0 * std::log(model.sigma(x));
  }
};

}  // namespace

double DensityTable::pdf_node(std::size_t k) const { return std::exp(log_unnorm[k] - log_G); }

double DensityTable::pdf(double x) const {
  if (x <= grid.front() || x >= grid.back()) return 0.0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin()) - 1;
  const double w = (x - grid[k]) / (grid[k + 1] - grid[k]);
  const double lp = (1.0 - w) * log_unnorm[k] + w * log_unnorm[k + 1];
  return std::exp(lp - log_G);
}

double DensityTable::sample(double u) const {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.begin()) return grid.front();
  if (it == cdf.end()) return grid.back();
  const std::size_t k = static_cast<std::size_t>(it - cdf.begin()) - 1;
  const double dc = cdf[k + 1] - cdf[k];
  if (dc <= 0.0) return grid[k];
  const double w = (u - cdf[k]) / dc;
  return grid[k] + w * (grid[k + 1] - grid[k]);
}

void DensityTable::validate() const {
  if (grid.size() < 3 || grid.size() != log_unnorm.size() || grid.size() != cdf.size())
    throw ConfigError("density table has inconsistent sizes");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ConfigError("density table grid is not increasing");
  for (std::size_t k = 1; k < cdf.size(); ++k)
    if (cdf[k] < cdf[k - 1] - 1e-15) throw ConfigError("density table cdf is not monotone");
  if (!(cdf.front() < 1e-6) || !(cdf.back() > 1.0 - 1e-6))
    throw ConfigError("density table cdf does not span [0,1]");
}

DensityTable build_density(const DiffusionModel& model, const ParamVec& theta_in,
                           double tail_tol) {
  ParamVec theta = model.theta_space.clamp(theta_in);
  ExponentEvaluator ev{model, theta};
  const double log_cut = std::log(tail_tol);

  // Locate the exponent mode by a coarse incremental scan, then refine.
  double best_x = 0.0;
  double best_psi = ev.psi_from(0.0, 0.0, 0.0);
  {
    const double span = 50.0, step = 0.1;
    double run = 0.0, x = 0.0;
    for (double xi = 0.0; xi < span - 0.5 * step; xi += step) {
      run += ev.raw_integral(x, xi + step);
      x = xi + step;
      const double p = 2.0 * run - 2.0 * std::log(model.sigma(x));
      if (p > best_psi) {
        best_psi = p;
        best_x = x;
      }
    }
    run = 0.0;
    x = 0.0;
    for (double xi = 0.0; xi > -span + 0.5 * step; xi -= step) {
      run += ev.raw_integral(x, xi - step);
      x = xi - step;
      const double p = 2.0 * run - 2.0 * std::log(model.sigma(x));
      if (p > best_psi) {
        best_psi = p;
        best_x = x;
      }
    }
    if (std::abs(best_x) > span - 2.0 * step)
      throw ErgodicityViolation("invariant density mode lies outside the scan range for model " +
                                model.id);
  }
  // Golden-section refinement around the coarse mode.
  {
    const double base_int = ev.raw_integral(0.0, best_x);
    auto psi_local = [&](double x) { return ev.psi_from(best_x, base_int, x); };
    double a = best_x - 0.1, b = best_x + 0.1;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = psi_local(c), fd = psi_local(d);
    while (b - a > 1e-13) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = psi_local(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = psi_local(d);
      }
    }
    best_x = 0.5 * (a + b);
    best_psi = psi_local(best_x);
  }

  // Expand outward until the unnormalized density drops below tail_tol of the
  // mode, then bisect the crossing so the support is tight.
  const double mode_int = ev.raw_integral(0.0, best_x);
  auto psi_at = [&](double x) { return ev.psi_from(best_x, mode_int, x); };
  auto find_edge = [&](double direction) {
    double r = 1.0;
    while (psi_at(best_x + direction * r) - best_psi > log_cut) {
      r *= 2.0;
      if (std::abs(best_x + direction * r) > kTruncationSearchLimit)
        throw ErgodicityViolation("support truncation search failed within |x| <= 1e3 for model " +
                                  model.id);
    }
    double lo = r > 1.0 ? 0.5 * r : 0.0, hi = r;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (psi_at(best_x + direction * mid) - best_psi > log_cut)
        lo = mid;
      else
        hi = mid;
    }
    return best_x + direction * hi;
  };
  const double x_hi = find_edge(+1.0);
  const double x_lo = find_edge(-1.0);

  if (!mean_reversion_ok(model, theta, x_lo) || !mean_reversion_ok(model, theta, x_hi))
    throw ErgodicityViolation("drift is not mean-reverting at the truncation boundary for model " +
                              model.id);

  DensityTable table;
  table.model_id = model.id;
  table.theta = theta;

  // Tabulate psi on a uniform grid, doubling until the normalizer is stable
  // to 1e-10 relative.
  double prev_G = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 2048; n <= 65536; n *= 2) {
    const double dx = (x_hi - x_lo) / static_cast<double>(n);
    std::vector<double> grid(n + 1), psi(n + 1);
    for (std::size_t k = 0; k <= n; ++k) grid[k] = x_lo + dx * static_cast<double>(k);
    grid[n] = x_hi;
    // prefix of 2*int S/sigma^2 accumulated per cell (Simpson per cell)
    double run = ev.raw_integral(0.0, x_lo);
    psi[0] = 2.0 * run - 2.0 * std::log(model.sigma(grid[0]));
    for (std::size_t k = 1; k <= n; ++k) {
      const double a = grid[k - 1], b = grid[k];
      const double fa = ev.integrand(a), fm = ev.integrand(0.5 * (a + b)), fb = ev.integrand(b);
      run += (b - a) / 6.0 * (fa + 4.0 * fm + fb);
      psi[k] = 2.0 * run - 2.0 * std::log(model.sigma(grid[k]));
    }
    const double psi_max = *std::max_element(psi.begin(), psi.end());
    std::vector<double> scaled(n + 1);
    for (std::size_t k = 0; k <= n; ++k) scaled[k] = std::exp(psi[k] - psi_max);
    const double G_scaled = simpson_tabulated(scaled, dx);
    table.grid = std::move(grid);
    table.log_unnorm = std::move(psi);
    table.log_G = std::log(G_scaled) + psi_max;
    // cumulative trapezoid, normalized so the cdf ends exactly at 1
    table.cdf.assign(n + 1, 0.0);
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      acc += 0.5 * (scaled[k - 1] + scaled[k]) * dx;
      table.cdf[k] = acc;
    }
    for (double& c : table.cdf) c /= acc;
    const double G = std::exp(table.log_G);
    if (std::isfinite(prev_G) && std::abs(G - prev_G) <= 1e-10 * G) break;
    prev_G = G;
  }
  table.validate();
  return table;
}

double density_moment(const DensityTable& table, int k, double center) {
  if (k < 0) throw ConfigError("moment order must be nonnegative");
  const std::size_t n = table.size() - 1;
  std::vector<double> y(n + 1);
  for (std::size_t j = 0; j <= n; ++j)
    y[j] = std::pow(table.grid[j] - center, k) * table.pdf_node(j);
  return simpson_tabulated(y, (table.grid.back() - table.grid.front()) / static_cast<double>(n));
}

FisherMatrix make_fisher(const SymMatrix& mat, const ParamVec& theta, FisherMatrix::Source src) {
  FisherMatrix f;
  f.mat = mat;
  f.inv = mat.inverse();  // throws DegenerateInformation when near-singular
  f.inv_sqrt = mat.inv_sqrt();
  f.theta = theta;
  f.source = src;
  return f;
}

FisherMatrix fisher_quadrature(const DiffusionModel& model, const ParamVec& theta) {
  return fisher_quadrature(model, build_density(model, theta));
}

FisherMatrix fisher_quadrature(const DiffusionModel& model, const DensityTable& table) {
  const int d = model.dim_param;
  const std::size_t n = table.size() - 1;
  const double dx = (table.grid.back() - table.grid.front()) / static_cast<double>(n);
  std::vector<std::vector<double>> integrands(static_cast<std::size_t>(d * (d + 1) / 2),
                                              std::vector<double>(n + 1));
  for (std::size_t j = 0; j <= n; ++j) {
    const double x = table.grid[j];
    const ParamVec g = model.drift_grad(table.theta, x);
    const double s = model.sigma(x);
    const double w = table.pdf_node(j) / (s * s);
    std::size_t idx = 0;
    for (int r = 0; r < d; ++r)
      for (int c = r; c < d; ++c) integrands[idx++][j] = g[r] * g[c] * w;
  }
  SymMatrix mat(d);
  std::size_t idx = 0;
  for (int r = 0; r < d; ++r)
    for (int c = r; c < d; ++c) mat.set(r, c, simpson_tabulated(integrands[idx++], dx));
  return make_fisher(mat, table.theta, FisherMatrix::Source::quadrature);
}

FisherMatrix empirical_fisher(const DiffusionModel& model, const ParamVec& theta,
                              const SamplePath& path, double t_start, double t_end) {
  if (!(t_start >= 0.0) || !(t_start < t_end) || t_end > path.horizon() + 1e-9 * path.h)
    throw WindowError("empirical Fisher window [" + std::to_string(t_start) + ", " +
                      std::to_string(t_end) + "] is invalid for horizon " +
                      std::to_string(path.horizon()));
  const std::size_t j0 = static_cast<std::size_t>(std::ceil(t_start / path.h - 1e-9));
  const std::size_t j1 = static_cast<std::size_t>(std::floor(t_end / path.h + 1e-9));
  const int d = model.dim_param;
  SymMatrix sum(d);
  for (std::size_t j = j0; j < j1; ++j) {
    const double x = path.values[j];
    const ParamVec g = model.drift_grad(theta, x);
    const double s = model.sigma(x);
    const double w = path.h / (s * s);
    for (int r = 0; r < d; ++r)
      for (int c = r; c < d; ++c) sum.add(r, c, g[r] * g[c] * w);
  }
  sum *= 1.0 / (t_end - t_start);
  return make_fisher(sum, theta, FisherMatrix::Source::empirical);
}

double mde_limit_variance_quartic(const DensityTable& table) {
  if (table.model_id != "quartic")
    throw ConfigError("mde limit variance is defined for the quartic model, got " +
                      table.model_id);
  const double center = table.theta[0];
  const std::size_t n = table.size() - 1;
  const double dx = (table.grid.back() - table.grid.front()) / static_cast<double>(n);
  const double psi_max = *std::max_element(table.log_unnorm.begin(), table.log_unnorm.end());
  std::vector<double> scaled(n + 1);
  for (std::size_t k = 0; k <= n; ++k) scaled[k] = std::exp(table.log_unnorm[k] - psi_max);

  // Signed mass int (y - center) f dy accumulated from the left and from the
  // right; the ratio to the local density stays O(1) on the side that avoids
  // cancellation against the bulk.
  std::vector<double> fwd(n + 1, 0.0), bwd(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double ya = (table.grid[k - 1] - center) * scaled[k - 1];
    const double yb = (table.grid[k] - center) * scaled[k];
    fwd[k] = fwd[k - 1] + 0.5 * (ya + yb) * dx;
  }
  for (std::size_t k = n; k-- > 0;) {
    const double ya = (table.grid[k] - center) * scaled[k];
    const double yb = (table.grid[k + 1] - center) * scaled[k + 1];
    bwd[k] = bwd[k + 1] + 0.5 * (ya + yb) * dx;
  }
  std::vector<double> integrand(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double r = table.grid[k] <= center ? fwd[k] / scaled[k] : -bwd[k] / scaled[k];
    integrand[k] = r * r * table.pdf_node(k);
  }
  return 4.0 * simpson_tabulated(integrand, dx);
}

}  // namespace sdemle
