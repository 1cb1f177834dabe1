#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fiolab/common.hpp"
#include "fiolab/phase.hpp"

namespace fiolab {

enum class AmplitudeKind { TwoArg, ThreeArg };

struct Orders {
  double m1 = 0.0;
  double m2 = 0.0;
  double mu = 0.0;
  double m() const { return m1 + m2; }
};

// One summand X(x) Y(y) Xi(xi) of a separable amplitude.
struct ProductTerm {
  std::function<double(const Point&)> x;
  std::function<double(const Point&)> y;
  std::function<double(const Point&)> xi;
};

class Amplitude {
 public:
  using Evaluator = std::function<cplx(const Point& x, const Point& y, const Point& xi)>;

  Amplitude() = default;
  Amplitude(int n, std::string id, AmplitudeKind kind, Orders orders, Flavor flavor,
            double low_cutoff, Evaluator eval, std::vector<ProductTerm> terms = {});

  int dim() const { return n_; }
  const std::string& id() const { return id_; }
  AmplitudeKind kind() const { return kind_; }
  const Orders& orders() const { return orders_; }
  Flavor flavor() const { return flavor_; }
  double low_cutoff() const { return low_cutoff_; }

  // Zero for |xi| < low_cutoff.
  cplx operator()(const Point& x, const Point& y, const Point& xi) const;
  // a(x, xi) for the two-argument kind.
  cplx operator()(const Point& x, const Point& xi) const { return (*this)(x, Point{}, xi); }

  bool separable() const { return !terms_.empty(); }
  const std::vector<ProductTerm>& terms() const { return terms_; }
  bool is_zero() const { return zero_; }
  void mark_zero() { zero_ = true; }

 private:
  int n_ = 0;
  std::string id_;
  AmplitudeKind kind_ = AmplitudeKind::ThreeArg;
  Orders orders_;
  Flavor flavor_ = Flavor::I;
  double low_cutoff_ = 8.0;
  Evaluator eval_;
  std::vector<ProductTerm> terms_;
  bool zero_ = false;
};

// Smooth radial cutoff: 0 below `low`, 1 above 2 * low.
double eta(double r, double low = 8.0);

// Built-ins: sg_power, sg_power_osc (three-argument), sg_power_xi,
// sg_power_xi_osc (two-argument), zero.
Amplitude make_builtin_amplitude(const std::string& id, int n, const Orders& orders,
                                 Flavor flavor);
std::vector<std::string> builtin_amplitude_ids();

struct SymbolSampleSpec {
  double x_max = 8.0;
  int x_per_axis = 3;
  double y_max = 8.0;
  int y_per_axis = 3;
  double xi_min = 8.0;
  double xi_max = 256.0;
  int directions = 8;
  std::string describe() const;
};

struct SymbolCertificate {
  std::map<std::string, double> constants;
  int max_order_tested = 0;
  double ceiling = 1e6;
  bool pass = false;
};

SymbolCertificate certify_symbol(const Amplitude& b, const SymbolSampleSpec& samples,
                                 int max_order, double ceiling = 1e6);

// h(t): 1 on t <= 1/2, 0 on t >= 1, quintic smoothstep complement between.
double wavefront_profile(double t);
// chi(x, y, xi) = h(|x - grad_xi phi(y, xi)| / (k <x>))
double wavefront_cutoff(const PhaseFunction& phi, double k, const Point& x, const Point& y,
                        const Point& xi);

// Returns (b_near, b_far) with b_near + b_far == b in floating point.
std::pair<Amplitude, Amplitude> wavefront_split(const Amplitude& b, const PhaseFunction& phi,
                                                double k);

struct SupportEquivalence {
  double k = 0.25;
  double ratio_min = 0.0;  // min <grad_xi phi> / <y>
  double ratio_max = 0.0;
  double c1 = 0.0;  // C1 <y> <= <x> on E_k
  double c2 = 0.0;  // <x> <= C2 <y> on E_k
};

SupportEquivalence support_equivalence(const PhaseFunction& phi, double k,
                                       const PhaseSampleSpec& samples);

}  // namespace fiolab
