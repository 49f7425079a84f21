#ifndef SPARSE_POISSON_MODEL_HPP
#define SPARSE_POISSON_MODEL_HPP

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace sparse_poisson {

// Observed counts x in N^n, n >= 1.
class CountVector {
 public:
  explicit CountVector(std::vector<long long> values);

  const std::vector<long long>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  long long operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<long long> values_;
};

// Ratio of current to future sampling intensity, scalar or per coordinate.
class SamplingRatios {
 public:
  static SamplingRatios scalar(double r);
  static SamplingRatios per_coordinate(std::vector<double> r);

  bool is_scalar() const { return scalar_; }
  // For scalar mode any index returns the single ratio.
  double at(std::size_t i) const { return scalar_ ? values_[0] : values_[i]; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  // Throws unless the ratios can pair with a length-n count vector.
  void check_length(std::size_t n) const;

 private:
  SamplingRatios(bool scalar, std::vector<double> values);
  bool scalar_;
  std::vector<double> values_;
};

struct PowerSlab {
  double kappa;  // slab density proportional to lambda^(kappa-1)
};

// Proper slab with density gamma on (0,inf), mixed with the spike at weight
// eta. The drift bound |lambda (log gamma)'(lambda)| <= Lambda is spot
// checked on a fixed log grid at construction; the integrability of
// exp(-lambda) gamma(lambda) is checked by quadrature convergence.
class GeneralSlab {
 public:
  GeneralSlab(std::function<double(double)> log_density, double drift_bound,
              double mixing_weight);

  double log_density(double lambda) const { return log_density_(lambda); }
  double drift_bound() const { return drift_bound_; }
  double mixing_weight() const { return mixing_weight_; }

 private:
  std::function<double(double)> log_density_;
  double drift_bound_;
  double mixing_weight_;
};

struct SpikeSlabPrior {
  double scale_h;  // scale of the improper power slab; unused by GeneralSlab
  std::variant<PowerSlab, GeneralSlab> slab;

  static SpikeSlabPrior power(double h, double kappa);
  static SpikeSlabPrior general(GeneralSlab slab);

  bool is_power() const { return std::holds_alternative<PowerSlab>(slab); }
  const PowerSlab& power_slab() const;
  const GeneralSlab& general_slab() const;
};

struct SparsitySpace {
  enum class Kind { exact, quasi };
  Kind kind;
  double s;
  double epsilon;  // quasi threshold; ignored for exact

  static SparsitySpace exact(double s, std::size_t n);
  static SparsitySpace quasi(double s, double epsilon, std::size_t n);
};

struct ConstantsReport {
  double c = 0.0;       // (r/(r+1))^r / (r+1)
  double k = 0.0;       // Gamma(kappa+1) (r^-kappa - (r+1)^-kappa) / kappa
  double l_star = 0.0;  // c / k
  double c_bar = 0.0;   // per-coordinate means for MCAR ratios
  double k_bar = 0.0;
  double l_bar = 0.0;
};

double constant_c(double r);
double constant_k(double r, double kappa);
double optimal_scale(double r, double kappa);

ConstantsReport scalar_constants(double r, double kappa);
ConstantsReport mcar_constants(const SamplingRatios& ratios, double kappa);

// Sampling laws for the ratio distribution G in the MCAR constants study.
struct GammaRatioLaw {
  double r;  // mean; shape = r/l, scale = l
  double l;
};
struct ShiftedBinomialRatioLaw {
  long long n_trials;  // r = 1 + Binomial(n_trials, p)
  double p;
};
using RatioLaw = std::variant<GammaRatioLaw, ShiftedBinomialRatioLaw>;

struct McEstimate {
  double value;
  double std_error;
};

McEstimate expected_constant_under_g(const RatioLaw& law, long long n_mc,
                                     std::uint64_t seed);

}  // namespace sparse_poisson

#endif
