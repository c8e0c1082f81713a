#pragma once

#include "naheat/stratified_group.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace naheat {

struct PointG {
  PointN z;
  double u = 0.0;
};

enum class QuadMethod { tensor_gauss, adaptive, monte_carlo };

std::string to_string(QuadMethod m);
QuadMethod parse_quad_method(const std::string& s);

struct QuadratureSpec {
  double u_halfwidth = 40.0;
  double n_radius = 0.0;   // 0: derived from the field's time scale
  double d_radius = 0.0;   // truncation in |x|_d for the shell rule; 0: automatic
  int nodes_per_dim = 8;   // Gauss nodes per radial panel (shell) or per panel and axis (tensor)
  double rel_tol = 1e-8;
  QuadMethod method = QuadMethod::adaptive;
  std::uint64_t seed = 7;
  std::size_t n_samples = 200000;

  void validate() const;
};

// Evaluator valid on one sphere |x|_d = r; lets expensive radial data be computed once per shell.
using ShellEvaluator = std::function<double(const PointG&)>;

struct KernelField {
  std::function<double(const PointG&)> evaluate;
  QuadratureSpec quadrature;
  GroupDescriptor descriptor;
  // heat time the field lives at; sets truncation radius and panel widths
  double time_scale = 1.0;
  // optional fast path: on_shell(r) returns an evaluator for points with |x|_d = r
  std::function<ShellEvaluator(double)> on_shell;

  double operator()(const PointG& x) const { return evaluate(x); }
  ShellEvaluator shell(double r) const { return on_shell ? on_shell(r) : evaluate; }
};

PointG g_identity(const GroupDescriptor& g);
PointG g_multiply(const PointG& x, const PointG& y, const GroupDescriptor& g);
PointG g_inverse(const PointG& x, const GroupDescriptor& g);
double modular(const PointG& x, const GroupDescriptor& g);
double g_distance(const PointG& x, const GroupDescriptor& g);
double g_distance(const PointG& x, const PointG& y, const GroupDescriptor& g);
// cosh |x|_d, without the arccosh
double g_cosh_distance(const PointG& x, const GroupDescriptor& g);

KernelField involution(const KernelField& f);
KernelField scaled(const KernelField& f, double a);
// sqrt(sum f_i^2), pointwise
KernelField pointwise_norm(const std::vector<KernelField>& parts);

// right translation R_y f (x) = f(x y)
KernelField right_translate(const KernelField& f, const PointG& y);

struct ConvolutionResult {
  double value = 0.0;
  double est_abs_error = 0.0;
  bool trusted = true;
};
ConvolutionResult convolve_at(const KernelField& f, const KernelField& g, const PointG& x);

// Frame derivative X_j f at x by centred differences along the flow of X_j (j = 0..q).
double frame_derivative_fd(const std::function<double(const PointG&)>& f, int j, const PointG& x,
                           const GroupDescriptor& g, double step = 1e-5);
double horizontal_gradient_norm(const KernelField& f, const PointG& x,
                                const std::vector<KernelField>* derivatives = nullptr);

double radial_integral(const std::function<double(double)>& profile, double R_max,
                       const GroupDescriptor& g);
// C_N from a direct quadrature of exp(-|x|_d^2); cached per descriptor.
double estimate_CN(const GroupDescriptor& g);
// mu(B_R) by a direct quadrature of the sublevel set (abelian Q = 1, 2)
double ball_volume_direct(double R, const GroupDescriptor& g);

}  // namespace naheat
