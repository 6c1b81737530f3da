#include "infoextract/basis.hpp"

#include <cmath>
#include <vector>

#include "infoextract/errors.hpp"

namespace infoextract::hcr {

HcrBasis::HcrBasis(int degree) : degree_(degree) {
    if (degree < 0) {
        throw InvalidInput("basis degree must be non-negative");
    }
}

void HcrBasis::eval_all(double x, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(degree_) + 1) {
        throw InvalidInput("eval_all output span has wrong size");
    }
    const double s = 2.0 * x - 1.0;
    // Shifted Legendre recurrence: (i+1) P_{i+1} = (2i+1) s P_i - i P_{i-1}.
    double prev = 1.0;
    double cur = s;
    out[0] = 1.0;
    if (degree_ >= 1) {
        out[1] = std::sqrt(3.0) * cur;
    }
    for (int i = 1; i < degree_; ++i) {
        const double next = ((2.0 * i + 1.0) * s * cur - i * prev) / (i + 1.0);
        prev = cur;
        cur = next;
        out[static_cast<std::size_t>(i) + 1] = std::sqrt(2.0 * (i + 1) + 1.0) * cur;
    }
}

double HcrBasis::eval(int i, double x) const {
    if (i < 0 || i > degree_) {
        throw InvalidInput("basis index " + std::to_string(i) + " outside [0," +
                           std::to_string(degree_) + "]");
    }
    std::vector<double> all(static_cast<std::size_t>(degree_) + 1);
    eval_all(x, all);
    return all[static_cast<std::size_t>(i)];
}

}  // namespace infoextract::hcr
