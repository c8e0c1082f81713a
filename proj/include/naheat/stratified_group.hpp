#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace naheat {

inline constexpr int kMaxDim = 4;

// Thrown for bad parameters (cli exit code 2).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a request is outside the supported numerical regime (exit code 3).
class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GroupKind { Abelian, Heisenberg1 };

struct GroupDescriptor {
  GroupKind kind = GroupKind::Abelian;
  int Q = 1;     // homogeneous dimension, tr D
  int q = 1;     // horizontal rank
  int step = 1;
  std::vector<int> dilation_weights{1};

  static GroupDescriptor abelian(int Q);
  static GroupDescriptor heisenberg();
  // "abelian:Q" or "heisenberg"
  static GroupDescriptor parse(const std::string& spec);

  int dim() const { return static_cast<int>(dilation_weights.size()); }
  bool is_abelian() const { return kind == GroupKind::Abelian; }
  std::string name() const;
  bool operator==(const GroupDescriptor&) const = default;
};

// Exponential coordinates of the first kind; fixed capacity, no allocation.
struct PointN {
  std::array<double, kMaxDim> c{};
  int n = 0;

  PointN() = default;
  explicit PointN(int dim) : n(dim) {}
  PointN(std::initializer_list<double> v);

  int size() const { return n; }
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  double norm2() const;  // Euclidean, of the coordinate vector
  bool operator==(const PointN& o) const;
};

// Word over {0..q}; entries are indices of left-invariant fields.
using MultiIndex = std::vector<int>;

PointN n_zero(const GroupDescriptor& g);
PointN n_multiply(const PointN& a, const PointN& b, const GroupDescriptor& g);
PointN n_inverse(const PointN& a, const GroupDescriptor& g);
PointN dilate(double t, const PointN& z, const GroupDescriptor& g);
double n_norm(const PointN& z, const GroupDescriptor& g);

double n_heat(double s, const PointN& z, const GroupDescriptor& g);
// X^alpha (X^beta h_s^N)^* at z; entries of alpha, beta in 1..q.
double n_heat_derivative(const MultiIndex& alpha, const MultiIndex& beta, double s,
                         const PointN& z, const GroupDescriptor& g);
// || |.|_N^{2 gamma} X^alpha (X^beta h_s^N)^* ||_1 via one s = 1 quadrature and scaling.
double n_weighted_l1(const MultiIndex& alpha, const MultiIndex& beta, double gamma, double s,
                     const GroupDescriptor& g, double gamma0 = 0.5);
// Same integral, evaluated directly at s without the scaling shortcut.
double n_weighted_l1_direct(const MultiIndex& alpha, const MultiIndex& beta, double gamma,
                            double s, const GroupDescriptor& g);

// Left-invariant horizontal field X_j^N (j in 1..q) applied to f at z, by
// finite differences along exp(h X_j).
template <class F>
double n_field_fd(const F& f, int j, const PointN& z, const GroupDescriptor& g, double h) {
  PointN e = n_zero(g);
  e[j - 1] = h;
  PointN em = n_zero(g);
  em[j - 1] = -h;
  return (f(n_multiply(z, e, g)) - f(n_multiply(z, em, g))) / (2.0 * h);
}

void check_multi_index(const MultiIndex& a, int q, bool allow_zero, std::size_t max_len = 3);

}  // namespace naheat
