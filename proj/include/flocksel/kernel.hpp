#ifndef FLOCKSEL_KERNEL_HPP
#define FLOCKSEL_KERNEL_HPP

namespace flocksel {

/// Communication weight H(r) = (1 + r^2)^(-gamma).
class CommunicationKernel {
 public:
  explicit CommunicationKernel(double gamma = 0.0);

  double gamma() const noexcept { return gamma_; }

  /// Throws std::domain_error for negative r.
  double operator()(double r) const;

  /// H evaluated from r^2, the form every solver loop uses.
  double of_squared(double r2) const noexcept;

 private:
  enum class Path { constant, inverse_sqrt, integer_power, general };

  double gamma_;
  Path path_;
  unsigned power_ = 0;
};

}  // namespace flocksel

#endif  // FLOCKSEL_KERNEL_HPP
