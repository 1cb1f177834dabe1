#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fiolab/common.hpp"

namespace fiolab {

enum class Flavor { I, II, III };

Flavor parse_flavor(const std::string& s);
std::string to_string(Flavor f);

using MultiIndex = std::array<int, 3>;
int order(const MultiIndex& a, int n);
// "(a1,a2;b1,b2)" style key for derivative tables.
std::string index_key(const std::vector<MultiIndex>& parts, int n);
// All multi-indices in n variables of the given total order.
std::vector<MultiIndex> multi_indices(int n, int total);

class PhaseModel {
 public:
  virtual ~PhaseModel() = default;
  virtual double eval(const Point& y, const Point& xi) const = 0;
  virtual Point grad_xi(const Point& y, const Point& xi) const = 0;
  virtual Point grad_y(const Point& y, const Point& xi) const = 0;
  // [i][j] = d^2 phi / dy_i dxi_j
  virtual Mat mixed_hessian(const Point& y, const Point& xi) const = 0;
  virtual Mat hessian_xi(const Point& y, const Point& xi) const = 0;
  virtual Mat hessian_y(const Point& y, const Point& xi) const = 0;
  // phi(y, xi) = <y, xi> + offset(xi) when true.
  virtual bool translation_form() const { return false; }
  virtual double offset(const Point& /*xi*/) const { return 0.0; }
};

class PhaseFunction {
 public:
  PhaseFunction() = default;
  PhaseFunction(int n, std::string id, std::shared_ptr<const PhaseModel> model);

  int dim() const { return n_; }
  const std::string& id() const { return id_; }

  double eval(const Point& y, const Point& xi) const { return m_->eval(y, xi); }
  Point grad_xi(const Point& y, const Point& xi) const { return m_->grad_xi(y, xi); }
  Point grad_y(const Point& y, const Point& xi) const { return m_->grad_y(y, xi); }
  Mat mixed_hessian(const Point& y, const Point& xi) const {
    return m_->mixed_hessian(y, xi);
  }
  Mat hessian_xi(const Point& y, const Point& xi) const { return m_->hessian_xi(y, xi); }
  Mat hessian_y(const Point& y, const Point& xi) const { return m_->hessian_y(y, xi); }
  bool translation_form() const { return m_->translation_form(); }
  double offset(const Point& xi) const { return m_->offset(xi); }

  // d^alpha_y d^beta_xi phi for total order <= 3. Orders up to two are
  // closed form; order three differences a closed-form second derivative.
  double partial(const Point& y, const Point& xi, const MultiIndex& alpha,
                 const MultiIndex& beta) const;

  // phi(lambda y, xi / lambda)
  PhaseFunction rescaled(double lambda) const;

  // sup over unit directions of |grad_xi phi(y, omega) - c|
  double gradient_reach(const Point& y, const Point& c, int directions = 256) const;

 private:
  int n_ = 0;
  std::string id_;
  std::shared_ptr<const PhaseModel> m_;
};

PhaseFunction make_builtin_phase(const std::string& id, int n);
std::vector<std::string> builtin_phase_ids();

struct PhaseSampleSpec {
  double y_max = 32.0;
  int y_per_axis = 5;
  double xi_min = 8.0;
  double xi_max = 256.0;
  int directions = 16;

  // dyadic radii xi_min, 2 xi_min, ... <= xi_max
  std::vector<double> radii() const;
  std::vector<Point> y_points(int n) const;
  std::string describe() const;
};

struct PhaseCertificate {
  double nondegeneracy_min = 0.0;
  // min/max of <grad_xi phi>/<y>, then min/max of <d_y phi>/<xi>
  std::array<double, 4> equivalence_ratios{};
  std::map<std::string, double> bound_constants;
  double euler_max = 0.0;
  double hessian_xi_norm_sup = 0.0;
  Flavor flavor_checked = Flavor::I;
  std::string sample_spec;
  double delta = 0.5;
  double ceiling = 1e6;
  bool pass = false;
};

double check_homogeneity(const PhaseFunction& phi, const PhaseSampleSpec& samples,
                         const std::vector<double>& taus);

// max relative |<grad_xi phi, xi> - phi| / (|phi| + 1)
double euler_identity_error(const PhaseFunction& phi, const PhaseSampleSpec& samples);

PhaseCertificate certify_phase(const PhaseFunction& phi, Flavor flavor,
                               const PhaseSampleSpec& samples, double delta = 0.5,
                               double ceiling = 1e6);

double lemma_M_constant(const PhaseFunction& phi, const PhaseSampleSpec& samples);

struct GradientCheck {
  double grad_xi_error = 0.0;
  double grad_y_error = 0.0;
  double mixed_error = 0.0;
  double hessian_xi_error = 0.0;
};

// Max abs difference between closed-form derivatives and central
// differences with step h * max(1, |point|).
GradientCheck gradient_check(const PhaseFunction& phi, const PhaseSampleSpec& samples,
                             double h);

}  // namespace fiolab
