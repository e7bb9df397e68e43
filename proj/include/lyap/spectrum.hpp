#pragma once

#include <optional>
#include <vector>

#include "lyap/cocycle.hpp"

namespace lyap {

struct SpectrumBlock {
    double chi;       // exponent
    int multiplicity; // dimension of the Lyapunov space
};

/// Lyapunov spectrum of the ergodic measure carried by a periodic orbit:
/// exponents are (1/p) log of the distinct eigenvalue moduli of the period
/// product, with generalized-eigenspace multiplicities.
struct LyapunovSpectrum {
    std::vector<SpectrumBlock> blocks; // sorted increasing in chi
    Word word;
    int period = 0;

    int total_dimension() const;
    double max_exponent() const { return blocks.back().chi; }
    std::optional<double> second_exponent() const;
    /// All exponents with multiplicity, sorted decreasing.
    std::vector<double> expanded_decreasing() const;
    /// Sum of the top i exponents (with multiplicity).
    double top_sum(int i) const;
    double sum_all() const; // = (1/p) log|det A(x,p)|

    bool same_as(const LyapunovSpectrum& o, double tol) const;
};

LyapunovSpectrum periodic_spectrum(const MatrixCocycle& A, const Word& word,
                                   const ShiftSpace& space);

/// Oseledec splitting along a periodic orbit: bases[j][i] is an
/// orthonormal-column basis of E_{chi_i}(f^j x), i indexing spectrum blocks.
struct OseledecSplitting {
    LyapunovSpectrum spectrum;
    std::vector<std::vector<Matrix>> bases;

    int period() const { return spectrum.period; }
    int block_count() const { return static_cast<int>(spectrum.blocks.size()); }
    /// Stacked invertible matrix [B_1 ... B_l] at orbit point j.
    Matrix stacked(int j) const;
};

/// Splitting from the generalized eigenspaces of the period product, grouped by
/// eigenvalue modulus and propagated along the orbit.  Throws ClusteredSpectrum
/// when two moduli are distinct but closer than the separation tolerance.
OseledecSplitting oseledec_splitting_periodic(const MatrixCocycle& A, const Word& word,
                                              const ShiftSpace& space);

/// Largest principal angle between the column spans of two orthonormal bases.
double principal_angle(const Matrix& U, const Matrix& V);

} // namespace lyap
