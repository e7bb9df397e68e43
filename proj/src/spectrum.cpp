#include "lyap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

namespace lyap {

namespace {

// grouping tolerances on log-moduli of the period product
constexpr double kMergeTol = 1e-9;
constexpr double kSeparationTol = 1e-8;

struct ModulusGroup {
    double log_mod_mean;
    std::vector<int> members; // eigenvalue indices
};

std::vector<ModulusGroup> group_by_modulus(const std::vector<double>& logmod) {
    const int n = static_cast<int>(logmod.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return logmod[a] < logmod[b]; });
    std::vector<ModulusGroup> groups;
    for (int idx : order) {
        if (!groups.empty() &&
            logmod[idx] - logmod[groups.back().members.back()] <= kMergeTol) {
            groups.back().members.push_back(idx);
        } else {
            if (!groups.empty()) {
                const double gap = logmod[idx] - logmod[groups.back().members.back()];
                if (gap < kSeparationTol)
                    throw ClusteredSpectrum(
                        "eigenvalue moduli separated by " + std::to_string(gap) +
                        " are inside the ambiguity band; refusing to group");
            }
            groups.push_back({0.0, {idx}});
        }
    }
    for (auto& g : groups) {
        double s = 0.0;
        for (int i : g.members) s += logmod[i];
        g.log_mod_mean = s / static_cast<double>(g.members.size());
    }
    return groups;
}

Eigen::VectorXcd period_eigenvalues(const MatrixCocycle& A, const Word& word,
                                    const ShiftSpace& space, Matrix* period_product) {
    if (!space.legal_word(word, true))
        throw IllegalWord("word '" + format_word(word) + "' is not cyclically legal");
    Matrix P = Matrix::Identity(A.dimension(), A.dimension());
    for (Symbol s : word) P = A.generator(s) * P;
    Eigen::EigenSolver<Matrix> es(P, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw EigenFailure("eigensolver did not converge on the period product");
    if (period_product) *period_product = P;
    return es.eigenvalues();
}

/// Per-eigenvalue log-moduli of the period product.  Eigenvalue moduli far
/// below ||P|| carry an absolute error ~ eps ||P|| from the forward product, so
/// they are re-measured from the inverse product (built out of the
/// well-conditioned generator inverses), where they sit at the top and are
/// relatively accurate.  The two sorted modulus lists describe the same
/// spectrum; each rank takes the side on which it is the better conditioned.
std::vector<double> period_log_moduli(const MatrixCocycle& A, const Word& word,
                                      const Eigen::VectorXcd& eig) {
    const int n = static_cast<int>(eig.size());
    std::vector<double> logmod(n);
    for (int i = 0; i < n; ++i) logmod[i] = std::log(std::abs(eig(i)));
    if (n == 1) return logmod;

    Matrix Pinv = Matrix::Identity(A.dimension(), A.dimension());
    for (Symbol s : word) Pinv = Pinv * A.generator_inverse(s);
    Eigen::EigenSolver<Matrix> es(Pinv, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) return logmod;

    std::vector<double> from_inverse(n);
    for (int i = 0; i < n; ++i) from_inverse[i] = -std::log(std::abs(es.eigenvalues()(i)));
    std::sort(from_inverse.begin(), from_inverse.end(), std::greater<>());

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return logmod[a] > logmod[b]; });

    const double top = logmod[order.front()];      // accurate on the forward side
    const double bottom = from_inverse.back();     // accurate on the inverse side
    for (int r = 0; r < n; ++r)
        if (logmod[order[r]] < (top + bottom) / 2) logmod[order[r]] = from_inverse[r];
    return logmod;
}

} // namespace

int LyapunovSpectrum::total_dimension() const {
    int d = 0;
    for (const auto& b : blocks) d += b.multiplicity;
    return d;
}

std::optional<double> LyapunovSpectrum::second_exponent() const {
    if (blocks.size() < 2) return std::nullopt;
    return blocks[blocks.size() - 2].chi;
}

std::vector<double> LyapunovSpectrum::expanded_decreasing() const {
    std::vector<double> out;
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
        out.insert(out.end(), it->multiplicity, it->chi);
    return out;
}

double LyapunovSpectrum::top_sum(int i) const {
    const auto ex = expanded_decreasing();
    double s = 0.0;
    for (int j = 0; j < i; ++j) s += ex[static_cast<std::size_t>(j)];
    return s;
}

double LyapunovSpectrum::sum_all() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.chi * b.multiplicity;
    return s;
}

bool LyapunovSpectrum::same_as(const LyapunovSpectrum& o, double tol) const {
    if (blocks.size() != o.blocks.size()) return false;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].multiplicity != o.blocks[i].multiplicity) return false;
        if (std::abs(blocks[i].chi - o.blocks[i].chi) > tol) return false;
    }
    return true;
}

LyapunovSpectrum periodic_spectrum(const MatrixCocycle& A, const Word& word,
                                   const ShiftSpace& space) {
    const auto eig = period_eigenvalues(A, word, space, nullptr);
    const auto groups = group_by_modulus(period_log_moduli(A, word, eig));
    LyapunovSpectrum sp;
    sp.word = word;
    sp.period = static_cast<int>(word.size());
    for (const auto& g : groups)
        sp.blocks.push_back({g.log_mod_mean / sp.period,
                             static_cast<int>(g.members.size())});
    return sp;
}

double principal_angle(const Matrix& U, const Matrix& V) {
    if (U.cols() != V.cols()) return M_PI / 2;
    // sin of the largest angle = norm of the residual of U against span(V);
    // asin keeps full precision for nearly equal subspaces (acos loses it)
    const Matrix R = U - V * (V.transpose() * U);
    const double s = std::min(1.0, Eigen::JacobiSVD<Matrix>(R).singularValues()(0));
    return std::asin(s);
}

Matrix OseledecSplitting::stacked(int j) const {
    const int m = static_cast<int>(bases[j].front().rows());
    Matrix V(m, m);
    int col = 0;
    for (const Matrix& B : bases[j]) {
        V.block(0, col, m, B.cols()) = B;
        col += static_cast<int>(B.cols());
    }
    return V;
}

OseledecSplitting oseledec_splitting_periodic(const MatrixCocycle& A, const Word& word,
                                              const ShiftSpace& space) {
    Matrix P;
    const auto eig = period_eigenvalues(A, word, space, &P);
    const auto groups = group_by_modulus(period_log_moduli(A, word, eig));
    const int m = A.dimension();
    const int p = static_cast<int>(word.size());

    OseledecSplitting split;
    split.spectrum.word = word;
    split.spectrum.period = p;
    split.bases.assign(p, {});

    const Eigen::MatrixXcd Pc = P.cast<std::complex<double>>();
    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    for (const auto& g : groups) {
        split.spectrum.blocks.push_back(
            {g.log_mod_mean / p, static_cast<int>(g.members.size())});
        // kernel of prod_{lambda in group} (P - lambda I): the generalized
        // eigenspace of the modulus group (other eigenvalues stay invertible)
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(m, m);
        for (int idx : g.members)
            M = ((Pc - eig(idx) * Eigen::MatrixXcd::Identity(m, m)) / scale) * M;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
        const int d = static_cast<int>(g.members.size());
        Eigen::MatrixXcd K = svd.matrixV().rightCols(d);
        // real basis: spans of Re/Im parts, reduced back to rank d
        Matrix RI(m, 2 * d);
        RI << K.real(), K.imag();
        Eigen::JacobiSVD<Matrix> rsvd(RI, Eigen::ComputeThinU);
        if (rsvd.singularValues()(d - 1) < 1e-10)
            throw EigenFailure("generalized eigenspace has deficient real rank");
        split.bases[0].push_back(rsvd.matrixU().leftCols(d));
    }

    // propagate along the orbit, re-orthonormalizing
    for (int j = 1; j < p; ++j) {
        for (const Matrix& B : split.bases[j - 1]) {
            Matrix W = A.generator(word[j - 1]) * B;
            Eigen::HouseholderQR<Matrix> qr(W);
            Matrix Q = qr.householderQ() * Matrix::Identity(m, static_cast<int>(B.cols()));
            split.bases[j].push_back(std::move(Q));
        }
    }
    return split;
}

} // namespace lyap
