#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lyap/shift_point.hpp"
#include "lyap/shift_space.hpp"

namespace lyap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest singular value (2-norm); the operator norm used throughout.
double operator_norm(const Matrix& B);

/// Smallest singular value m(B) = 1/||B^{-1}||.  Throws Singular when B is
/// numerically singular.
double minimal_norm(const Matrix& B);

/// Locally constant matrix cocycle over an SFT: the generator applied at x is
/// A(x_0).  Locally constant cocycles are alpha-Hoelder in the shift metric for
/// every alpha > 0.
class MatrixCocycle {
public:
    MatrixCocycle(int dimension, std::vector<Matrix> generators);

    int dimension() const { return dim_; }
    int symbol_count() const { return static_cast<int>(gens_.size()); }
    const Matrix& generator(Symbol s) const { return gens_[s]; }
    const Matrix& generator_inverse(Symbol s) const { return inv_gens_[s]; }

    /// C = max over generators of max(||A||, ||A^{-1}||); always >= 1.
    double bound() const { return bound_; }

    std::string canonical_text() const;
    std::uint64_t hash() const;

private:
    int dim_;
    std::vector<Matrix> gens_;
    std::vector<Matrix> inv_gens_;
    double bound_;
};

struct CocycleProduct {
    Matrix value;
    std::int64_t steps = 0;
};

/// A(x, n): for n > 0 the product A(f^{n-1}x)...A(x); for n < 0 the inverse
/// product A(f^{-n}x, n)^{-1}; identity for n = 0.  Accumulated exactly; throws
/// NumericOverflow when an entry magnitude leaves the representable-scale
/// budget (use log_norm_product for long products).
CocycleProduct product(const MatrixCocycle& A, const ShiftPoint& x, std::int64_t n);

/// Incremental log-scaled product state: B is kept near unit scale, the peeled
/// magnitude accumulates in log_scale.  Supports products of length ~10^6
/// without overflow.
class ScaledProduct {
public:
    explicit ScaledProduct(int dimension);

    void apply(const Matrix& generator);
    std::int64_t steps() const { return steps_; }

    /// log||A(x,n)|| for the accumulated product (operator norm).
    double log_norm() const;
    /// log||A(x,n)v|| for the accumulated product applied to v.
    double log_norm_applied(const Vector& v) const;
    const Matrix& scaled_value() const { return value_; }
    double log_scale() const { return log_scale_; }

private:
    Matrix value_;
    double log_scale_ = 0.0;
    std::int64_t steps_ = 0;
};

/// log||A(x,n)|| via periodic rescaling, n >= 1.
double log_norm_product(const MatrixCocycle& A, const ShiftPoint& x, std::int64_t n);

/// (1/n) log||A(x,n)v||, n >= 1.  Throws ZeroVector for v = 0.
double finite_time_vector_exponent(const MatrixCocycle& A, const ShiftPoint& x,
                                   const Vector& v, std::int64_t n);

/// i-th compound matrix of B: entries are the i x i minors, rows/columns
/// indexed by lexicographically ordered i-subsets.
Matrix compound_matrix(const Matrix& B, int i);

/// Cocycle induced on i-fold exterior powers; dimension binom(m, i).
MatrixCocycle exterior_power(const MatrixCocycle& A, int i);

/// Lexicographically ordered i-subsets of {0..m-1}.
std::vector<std::vector<int>> index_subsets(int m, int i);

struct HolderCertificate {
    double alpha;
    double coefficient; // max sampled ||A(x)-A(y)|| / d(x,y)^alpha
    int samples;
};

/// Measures the Hoelder coefficient of the generator map over sampled point
/// pairs of the space (locally constant: only pairs with x_0 != y_0 contribute).
HolderCertificate holder_certificate(const MatrixCocycle& A, const ShiftSpace& space,
                                     double alpha, int sample_count,
                                     std::uint64_t seed = 1);

} // namespace lyap
