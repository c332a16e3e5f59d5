#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace optbal {

using Vec = std::vector<double>;

/// Phase-space point: positions q and momenta p, both of length 2d.
struct State {
  Vec q;
  Vec p;

  State() = default;
  State(Vec q_, Vec p_);

  /// Zero state in 2d dimensions (d = half_dim).
  static State zero(std::size_t half_dim);

  std::size_t size() const noexcept { return q.size(); }
  std::size_t half_dim() const noexcept { return q.size() / 2; }
  bool finite() const noexcept;
};

/// The small parameter epsilon, restricted to (0, 1].
class SmallParam {
 public:
  explicit SmallParam(double eps);
  double value() const noexcept { return eps_; }
  operator double() const noexcept { return eps_; }

 private:
  double eps_;
};

/// Checks that v has even length 2d with d >= 1.
void require_phase_dim(std::span<const double> v, const char* what);

/// Jv with J = [[0, I_d], [-I_d, 0]].
Vec apply_J(std::span<const double> v);
void apply_J(std::span<const double> v, std::span<double> out);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> v) noexcept;

}  // namespace optbal
