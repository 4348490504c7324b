#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bsld/bowen_series.hpp"
#include "bsld/errors.hpp"

namespace bsld {

// Cubic Hermite interpolant with Fritsch-Carlson tangent limiting: preserves
// the monotonicity of the data between knots, which the dual-parameter root
// finding below depends on.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double eval(double x) const;
  double deriv(double x) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;  // knots, values, tangents
  size_t segment(double x) const;
};

struct ThermoConfig {
  double beta_min = -4.0;
  double beta_max = 4.0;
  double beta_step = 0.05;
  double fine_lo = 0.9;            // refinement window around the phase point
  double fine_hi = 1.1;
  double fine_step = 0.01;
  int bins = 2000;                 // transfer-operator discretization
  int bracket_depth = 6;           // cylinder certificate depth
  std::vector<double> checkpoints{0.0, 0.5, 1.0, 2.0};
  double parabolic_beta_cap = 0.98;  // Legendre restriction with cusps
  double alpha_margin = 0.02;        // stay clear of the spectrum endpoints
};

// Precomputed weighted-transition structure of the discretized transfer
// operator; the beta-dependent weights are applied per evaluation.
class TransferOperator {
 public:
  TransferOperator(const MarkovPartition& part, int bins);

  // log of the spectral radius with weights |f'|^(-beta); power iteration to
  // relative tolerance 1e-10, at most 10^4 sweeps, else PowerIterationStall.
  double log_spectral_radius(double beta) const;

  int bins() const { return bins_; }

 private:
  struct Entry {
    int from;
    double frac;     // fraction of the target bin covered by the image
    double log_dfc;  // log|f'| at the source bin center
  };
  int bins_ = 0;
  std::vector<std::vector<Entry>> into_;  // per target bin
};

// Partition-sum bracket [P_n^inf, P_n^sup] at inverse-temperature beta from
// exact per-cylinder derivative extrema; the extremum feeding each end is
// chosen by the sign of beta so the bracket always contains the
// distortion-free value.
std::pair<double, double> cylinder_pressure(const MarkovPartition& part,
                                            double beta, int n);

double transfer_pressure(const MarkovPartition& part, double beta, int bins);

struct PressurePoint {
  double beta = 0.0;
  double p_hat = 0.0;                                  // transfer estimate
  std::optional<std::pair<double, double>> bracket;    // cylinder certificate
};

class PressureCurve {
 public:
  PressureCurve() = default;
  PressureCurve(std::vector<PressurePoint> pts, bool parabolic,
                ThermoConfig cfg);

  const std::vector<PressurePoint>& points() const { return points_; }
  bool parabolic() const { return parabolic_; }
  const ThermoConfig& config() const { return cfg_; }

  // Estimator bias removed by pinning p(1) = 0 (the Gibbs normalization the
  // theory guarantees); points() keeps the raw per-beta estimates.
  double gibbs_shift() const { return gibbs_shift_; }

  double p(double beta) const { return fit_.eval(beta); }
  double dp(double beta) const { return fit_.deriv(beta); }
  // Range of beta usable for the Legendre transform (capped below the phase
  // transition in the parabolic case).
  double beta_lo() const { return fit_.x_min(); }
  double beta_hi() const;

 private:
  std::vector<PressurePoint> points_;
  bool parabolic_ = false;
  ThermoConfig cfg_;
  MonotoneCubic fit_;
  double gibbs_shift_ = 0.0;
};

PressureCurve pressure_curve(const MarkovPartition& part,
                             const ThermoConfig& cfg = {});

struct LegendrePoint {
  double alpha = 0.0;
  double beta = 0.0;  // solves -P'(beta) = alpha
  double b = 0.0;     // (P(beta) + alpha*beta) / alpha
  double I = 0.0;     // alpha * (1 - b)
};

// Throws AlphaOutOfRange when -P' cannot bracket alpha on the usable grid.
LegendrePoint legendre_data(const PressureCurve& curve, double alpha);

// Extreme per-cylinder Lyapunov averages at depth n:
// (min (1/n) log sup|deriv|, max (1/n) log inf|deriv|).
std::pair<double, double> alpha_bounds(const MarkovPartition& part, int n);

struct SpectrumPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double b = 0.0;
  double I = 0.0;
  double b_prime = 0.0;  // -P(beta(alpha)) / alpha^2
  double I_prime = 0.0;  // central finite difference
};

struct SpectrumCurve {
  std::vector<SpectrumPoint> points;
  double alpha_lo = 0.0;   // grid endpoints actually used
  double alpha_hi = 0.0;
  double alpha_G = 0.0;    // -P'(1), the full-measure growth rate
};

SpectrumCurve spectrum_curve(const PressureCurve& curve, int grid_size = 81);

}  // namespace bsld
