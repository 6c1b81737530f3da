#pragma once

#include <span>

namespace infoextract::hcr {

/// Orthonormal shifted Legendre family on [0,1]:
///   f_0 = 1, f_1 = sqrt(3)(2x-1), f_2 = sqrt(5)(6x^2-6x+1), ...
/// Higher degrees come from the stable three-term recurrence on the
/// monic-normalized shifted Legendre polynomials, rescaled by sqrt(2i+1).
class HcrBasis {
public:
    explicit HcrBasis(int degree);

    int degree() const { return degree_; }

    /// f_i(x); throws InvalidInput when i is outside [0, degree].
    double eval(int i, double x) const;

    /// Fills out[0..degree] with f_0(x)..f_degree(x); out.size() must be
    /// degree+1.
    void eval_all(double x, std::span<double> out) const;

private:
    int degree_;
};

}  // namespace infoextract::hcr
