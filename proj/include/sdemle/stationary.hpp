#pragma once

#include <string>
#include <vector>

#include "sdemle/models.hpp"
#include "sdemle/sample_path.hpp"
#include "sdemle/spd.hpp"
#include "sdemle/vec.hpp"

namespace sdemle {

/// Tabulated invariant density on a truncated support. All density work is
/// kept in log space until the final exponentiation.
struct DensityTable {
  std::string model_id;
  ParamVec theta;
  std::vector<double> grid;        // strictly increasing nodes
  std::vector<double> log_unnorm;  // psi(x) = 2 int_0^x S/sigma^2 dy - 2 ln sigma(x)
  double log_G = 0.0;              // log of the normalizing constant
  std::vector<double> cdf;         // nondecreasing, cdf.front()~0, cdf.back()=1

  std::size_t size() const { return grid.size(); }
  double pdf_node(std::size_t k) const;
  double pdf(double x) const;     // log-linear interpolation between nodes
  double sample(double u) const;  // inverse cdf, u in (0,1)
  void validate() const;
};

/// d x d Fisher information with cached inverse and inverse square root.
struct FisherMatrix {
  enum class Source { quadrature, empirical };
  SymMatrix mat;
  SymMatrix inv;
  SymMatrix inv_sqrt;
  ParamVec theta;
  Source source = Source::quadrature;
};

FisherMatrix make_fisher(const SymMatrix& mat, const ParamVec& theta, FisherMatrix::Source src);

/// Tabulate the invariant density at theta. The support is truncated where
/// the unnormalized density falls below tail_tol of its maximum; the
/// normalizing constant is resolved to relative tolerance 1e-10.
DensityTable build_density(const DiffusionModel& model, const ParamVec& theta,
                           double tail_tol = 1e-16);

/// int (x - center)^k f(theta, x) dx over the table grid.
double density_moment(const DensityTable& table, int k, double center);

/// I(theta) = int drift_grad drift_grad^T / sigma^2 f dx, assembled entrywise
/// against the density table (which carries the evaluation theta).
FisherMatrix fisher_quadrature(const DiffusionModel& model, const ParamVec& theta);
FisherMatrix fisher_quadrature(const DiffusionModel& model, const DensityTable& table);

/// Left-point Riemann average of drift_grad drift_grad^T / sigma^2 over
/// [t_start, t_end] of the path.
FisherMatrix empirical_fisher(const DiffusionModel& model, const ParamVec& theta,
                              const SamplePath& path, double t_start, double t_end);

/// Limit variance of the empirical-mean preliminary estimator for the quartic
/// model: D^2 = 4 E (int_{-inf}^{xi} (y-theta) f(y) dy / f(xi))^2.
double mde_limit_variance_quartic(const DensityTable& table);

}  // namespace sdemle
