#pragma once

#include <string>
#include <vector>

#include "lyap/spectrum.hpp"

namespace lyap {

/// The epsilon-weighted scalar product along a periodic orbit, represented by
/// one Gram matrix per orbit point in the standard basis.  Distinct Lyapunov
/// blocks are orthogonal by definition; within a block the series
/// m * sum_n <A(x,n)u, A(x,n)v> exp(-2 chi_i n - eps|n|) is truncated once its
/// geometric tail (ratio e^{-eps}) drops below `tol`.
struct LyapunovMetric {
    double epsilon = 0.0;
    double tol = 0.0;
    int truncation = 0; // largest |n| summed
    OseledecSplitting splitting;
    std::vector<Matrix> gram;          // SPD, gram[j] >= identity
    std::vector<Matrix> gram_sqrt;
    std::vector<Matrix> gram_inv_sqrt;

    int period() const { return splitting.period(); }
    double norm(int orbit_index, const Vector& u) const;
};

LyapunovMetric lyapunov_gram(const MatrixCocycle& A, const Word& word,
                             const ShiftSpace& space, double epsilon,
                             double tol = 1e-9, long long truncation_cap = 100000);

/// sup ||Bu||_{to} / ||u||_{from} = largest singular value of
/// G_to^{1/2} B G_from^{-1/2}.
double lyapunov_operator_norm(const Matrix& B, const LyapunovMetric& metric,
                              int from_index, int to_index);
double lyapunov_operator_norm(const Matrix& B, const Matrix& gram_from,
                              const Matrix& gram_to);

/// Comparison function K_eps and Pesin-block level along the orbit.
struct PesinCertificate {
    double epsilon;
    std::vector<double> K; // per orbit point, >= 1
    double level;          // l = max K
    bool drift_ok;         // K(x_j) e^{-eps} <= K(x_{j+1}) <= K(x_j) e^{eps}
};

PesinCertificate pesin_certificate(const LyapunovMetric& metric);

struct BoundCheck {
    std::string name;
    double lhs, rhs; // lhs <= rhs expected
    double margin;   // rhs - lhs (log scale where applicable)
    bool ok;
};

struct BoundReport {
    std::vector<BoundCheck> checks;
    bool pass = true;
    const BoundCheck* worst() const;
};

/// Verifies the two-sided block growth bounds, the top-exponent operator-norm
/// bracket, the K-comparison of standard vs Lyapunov operator norms and the
/// K-drift bound, over n in [n_lo, n_hi].  Throws BoundViolation carrying the
/// worst offender when a bound fails beyond `slack` (log scale).
BoundReport verify_norm_bounds(const MatrixCocycle& A, const LyapunovMetric& metric,
                               int n_lo, int n_hi, double slack = 1e-6,
                               std::uint64_t seed = 7);

struct ConeReport {
    bool vacuous = false;   // single Lyapunov block: cones are all of R^m
    double eta = 0.0;       // cone contraction actually certified
    double max_ratio = 0.0; // sup ||(Au)^perp|| / ||(Au)'|| over samples
    double min_growth_margin = 0.0; // min log||(Au)'|| - (chi - 2 eps) - log||u'||
    int samples = 0;
    bool pass = true;
};

/// Samples vectors in the standard cone K_i = {||u^perp||_i <= ||u'||_i} along
/// the orbit segment and checks invariance into the contracted cone plus the
/// growth bound ||(A(y_i)u)'||_{i+1} >= e^{chi-2eps} ||u'||_i.  With eta = 0 the
/// contraction parameter is chosen from the measured worst ratio.  Throws
/// ConeEscape (with the witness) when containment or growth fails.
ConeReport cone_verify(const MatrixCocycle& A, const ShiftSpace& space,
                       const Word& x_word, const ShiftPoint& y, long long n,
                       double eta, double epsilon, int samples_per_step = 8,
                       std::uint64_t seed = 11);

struct Lemma31Report {
    long long n = 0;
    double delta = 0.0;    // measured exponential-closeness defect
    double chi = 0.0;      // top exponent of the reference measure
    double epsilon = 0.0, lambda = 0.0, alpha = 0.0;
    double level = 0.0;    // Pesin level l
    double log_lyap_op_norm = 0.0; // log ||A(y,n)||_{f^n x <- x}
    double log_std_norm = 0.0;     // log ||A(y,n)||
    double c_min = 0.0;            // least c making the Lyapunov-norm bound hold
    double log_bound9_rhs = 0.0;   // log( l^2 e^l e^{n(chi+eps)} )
    double margin9 = 0.0;        // bound9_rhs / std_norm
    bool pass9 = false;
    bool small_defect = false;   // c_min * delta^alpha < 1
};

/// Measures the norm-estimate instance for a shadowing pair: the smallest
/// constant c making ||A(y,n)||_{f^n x <- x} <= e^{c l delta^alpha} e^{n(chi+eps)}
/// hold, and the unconditional bound ||A(y,n)|| <= l^2 e^l e^{n(chi+eps)}.
/// Throws HypothesisViolated when lambda <= epsilon/alpha.
Lemma31Report lemma31_verify(const MatrixCocycle& A, const ShiftSpace& space,
                             const Word& x_word, const ShiftPoint& y, long long n,
                             double epsilon, double lambda, double alpha = 1.0);

} // namespace lyap
