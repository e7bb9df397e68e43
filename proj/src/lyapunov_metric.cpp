#include "lyap/lyapunov_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace lyap {

namespace {

Matrix spd_power(const Matrix& G, double exponent) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success)
        throw EigenFailure("eigensolver failed on a Gram matrix");
    Vector d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) {
        if (d(i) <= 0) throw EigenFailure("Gram matrix is not positive definite");
        d(i) = std::pow(d(i), exponent);
    }
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// Scaled cocycle matrix A(x_j, n) along a periodic word (signed n).
struct ScaledMatrix {
    Matrix value;
    double log_scale = 0.0;
};

ScaledMatrix scaled_orbit_product(const MatrixCocycle& A, const Word& w, int j,
                                  long long n) {
    const int p = static_cast<int>(w.size());
    ScaledMatrix R{Matrix::Identity(A.dimension(), A.dimension()), 0.0};
    auto rescale = [&R] {
        const double s = R.value.cwiseAbs().maxCoeff();
        if (s > 1e30 || s < 1e-30) {
            R.value /= s;
            R.log_scale += std::log(s);
        }
    };
    if (n >= 0) {
        for (long long i = 0; i < n; ++i) {
            R.value = A.generator(w[((j + i) % p + p) % p]) * R.value;
            rescale();
        }
    } else {
        for (long long i = 1; i <= -n; ++i) {
            R.value = A.generator_inverse(w[(((j - i) % p) + p) % p]) * R.value;
            rescale();
        }
    }
    return R;
}

double log_lyap_norm(const ScaledMatrix& B, const Matrix& gram_sqrt_to,
                     const Matrix& gram_inv_sqrt_from) {
    return B.log_scale + std::log(operator_norm(gram_sqrt_to * B.value * gram_inv_sqrt_from));
}

} // namespace

double LyapunovMetric::norm(int orbit_index, const Vector& u) const {
    return std::sqrt(u.dot(gram[orbit_index] * u));
}

LyapunovMetric lyapunov_gram(const MatrixCocycle& A, const Word& word,
                             const ShiftSpace& space, double epsilon, double tol,
                             long long truncation_cap) {
    if (epsilon <= 0) throw Error("epsilon must be positive");
    LyapunovMetric M;
    M.epsilon = epsilon;
    M.tol = tol;
    M.splitting = oseledec_splitting_periodic(A, word, space);
    const auto& blocks = M.splitting.spectrum.blocks;
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
        if (epsilon >= blocks[i + 1].chi - blocks[i].chi)
            throw Error("epsilon must be below the least spectrum gap (" +
                        std::to_string(blocks[i + 1].chi - blocks[i].chi) + ")");
    }
    const int m = A.dimension();
    const int p = M.splitting.period();
    const double decay = std::exp(-epsilon);
    const double tail_factor = decay / (1.0 - decay);

    for (int j = 0; j < p; ++j) {
        Matrix blockdiag = Matrix::Zero(m, m);
        int col = 0;
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const double chi = blocks[bi].chi;
            const int d = blocks[bi].multiplicity;
            const Matrix& B = M.splitting.bases[j][bi];
            Matrix S = Matrix::Zero(d, d);
            // n = 0 term
            S += static_cast<double>(m) * B.transpose() * B;
            for (int dir : {+1, -1}) {
                Matrix W = B;
                double recent_max = 1.0;
                for (long long n = 1;; ++n) {
                    // orbit point reached by A(x_j, +-n)
                    const int idx = dir > 0 ? ((j + static_cast<int>(n % p)) % p)
                                            : (((j - static_cast<int>(n % p)) % p + p) % p);
                    // incremental scaled evaluation keeps W = A(x_j, +-n) B e^{-+chi n} bounded
                    if (dir > 0) {
                        const int sym = word[((j + (n - 1)) % p + p) % p];
                        W = (A.generator(sym) * W) * std::exp(-chi);
                    } else {
                        const int sym = word[(((j - n) % p) + p) % p];
                        W = (A.generator_inverse(sym) * W) * std::exp(chi);
                    }
                    // W's columns lie in the block subspace at the reached orbit
                    // point exactly; re-projecting removes floating-point leakage
                    // into faster directions, which would otherwise blow up
                    W = M.splitting.bases[idx][bi] *
                        (M.splitting.bases[idx][bi].transpose() * W);
                    const Matrix term = W.transpose() * W;
                    const double weight = std::exp(-epsilon * static_cast<double>(n));
                    S += static_cast<double>(m) * weight * term;
                    recent_max = (n % p == 1 || p == 1) ? term.cwiseAbs().maxCoeff()
                                                        : std::max(recent_max, term.cwiseAbs().maxCoeff());
                    const double tail = static_cast<double>(m) * recent_max * weight * tail_factor;
                    if (n >= p && tail < tol) {
                        M.truncation = std::max<int>(M.truncation, static_cast<int>(n));
                        break;
                    }
                    if (n >= truncation_cap)
                        throw SlowDecay("Lyapunov series needs more than " +
                                        std::to_string(truncation_cap) + " terms");
                }
            }
            blockdiag.block(col, col, d, d) = 0.5 * (S + S.transpose());
            col += d;
        }
        const Matrix V = M.splitting.stacked(j);
        const Matrix Vinv = V.inverse();
        Matrix G = Vinv.transpose() * blockdiag * Vinv;
        G = 0.5 * (G + G.transpose());
        M.gram.push_back(G);
        M.gram_sqrt.push_back(spd_power(G, 0.5));
        M.gram_inv_sqrt.push_back(spd_power(G, -0.5));
    }
    return M;
}

double lyapunov_operator_norm(const Matrix& B, const Matrix& gram_from,
                              const Matrix& gram_to) {
    return operator_norm(spd_power(gram_to, 0.5) * B * spd_power(gram_from, -0.5));
}

double lyapunov_operator_norm(const Matrix& B, const LyapunovMetric& metric,
                              int from_index, int to_index) {
    return operator_norm(metric.gram_sqrt[to_index] * B * metric.gram_inv_sqrt[from_index]);
}

PesinCertificate pesin_certificate(const LyapunovMetric& metric) {
    PesinCertificate cert;
    cert.epsilon = metric.epsilon;
    std::vector<double> sharp;
    for (const Matrix& G : metric.gram) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(G);
        sharp.push_back(std::sqrt(es.eigenvalues().maxCoeff()));
    }
    // the sharp per-point ratio sqrt(lambda_max G) need not vary slowly; the
    // comparison function is its tempered majorant, which dominates the ratio
    // and moves by at most e^{eps} per step along the orbit
    const int pp = static_cast<int>(sharp.size());
    for (int j = 0; j < pp; ++j) {
        double k = 0.0;
        for (int i = 0; i < pp; ++i) {
            const int fwd = ((i - j) % pp + pp) % pp;
            const int dist = std::min(fwd, pp - fwd);
            k = std::max(k, sharp[static_cast<std::size_t>(i)] *
                                std::exp(-metric.epsilon * dist));
        }
        cert.K.push_back(k);
    }
    cert.level = *std::max_element(cert.K.begin(), cert.K.end());
    cert.drift_ok = true;
    const int p = static_cast<int>(cert.K.size());
    const double slack = 1e-9 + 10.0 * metric.tol;
    for (int j = 0; j < p; ++j) {
        const double ratio = std::log(cert.K[(j + 1) % p]) - std::log(cert.K[j]);
        if (std::abs(ratio) > metric.epsilon + slack) cert.drift_ok = false;
    }
    return cert;
}

const BoundCheck* BoundReport::worst() const {
    const BoundCheck* w = nullptr;
    for (const auto& c : checks)
        if (!w || c.margin < w->margin) w = &c;
    return w;
}

BoundReport verify_norm_bounds(const MatrixCocycle& A, const LyapunovMetric& metric,
                               int n_lo, int n_hi, double slack, std::uint64_t seed) {
    BoundReport report;
    const Word& w = metric.splitting.spectrum.word;
    const int p = metric.period();
    const auto& blocks = metric.splitting.spectrum.blocks;
    const double eps = metric.epsilon;
    auto record = [&](std::string name, double lhs, double rhs) {
        const bool ok = lhs <= rhs + slack;
        report.checks.push_back({std::move(name), lhs, rhs, rhs - lhs, ok});
        if (!ok) report.pass = false;
    };

    // block growth bounds, log scale:
    //   n chi_i - eps|n| + log||u||_x <= log||A(x,n)u||_{f^n x} <= n chi_i + eps|n| + log||u||_x
    for (int j = 0; j < p; ++j) {
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const Matrix& B = metric.splitting.bases[j][bi];
            for (int c = 0; c < B.cols(); ++c) {
                const Vector u = B.col(c);
                const double log_u = std::log(metric.norm(j, u));
                for (int n = n_lo; n <= n_hi; ++n) {
                    if (n == 0) continue;
                    Vector v = u;
                    double log_scale = 0.0;
                    for (long long i = 0; i < std::abs(n); ++i) {
                        const int idx = n > 0 ? ((j + static_cast<int>(i)) % p)
                                              : (((j - static_cast<int>(i) - 1) % p + p) % p);
                        v = n > 0 ? Vector(A.generator(w[idx]) * v)
                                  : Vector(A.generator_inverse(w[idx]) * v);
                        const double s = v.norm();
                        log_scale += std::log(s);
                        v /= s;
                        // project onto the block space at the reached orbit point
                        // (exact in exact arithmetic) to suppress leakage of the
                        // numerically dominant directions
                        const int at = n > 0 ? ((j + static_cast<int>(i) + 1) % p)
                                             : (((j - static_cast<int>(i) - 1) % p + p) % p);
                        const Matrix& E = metric.splitting.bases[at][bi];
                        v = E * (E.transpose() * v);
                        const double s2 = v.norm();
                        log_scale += std::log(s2);
                        v /= s2;
                    }
                    const int to = ((j + n) % p + p) % p;
                    const double lhs_log = log_scale + std::log(metric.norm(to, v));
                    const double lo = n * blocks[bi].chi - eps * std::abs(n) + log_u;
                    const double hi = n * blocks[bi].chi + eps * std::abs(n) + log_u;
                    const std::string tag = "growth[j=" + std::to_string(j) + ",block=" +
                                            std::to_string(bi) + ",n=" + std::to_string(n) + "]";
                    record(tag + ".lower", lo, lhs_log);
                    record(tag + ".upper", lhs_log, hi);
                }
            }
        }
    }

    // operator-norm bracket: forward time is governed by the top exponent,
    // backward time by the lowest
    const double chi_top = blocks.back().chi;
    const double chi_bot = blocks.front().chi;
    for (int j = 0; j < p; ++j) {
        for (int n = n_lo; n <= n_hi; ++n) {
            const auto S = scaled_orbit_product(A, w, j, n);
            const int to = ((j + n) % p + p) % p;
            const double lhs = log_lyap_norm(S, metric.gram_sqrt[to], metric.gram_inv_sqrt[j]);
            const double chi = n >= 0 ? chi_top : chi_bot;
            const std::string tag = "opnorm[j=" + std::to_string(j) + ",n=" + std::to_string(n) + "]";
            record(tag + ".lower", n * chi - eps * std::abs(n), lhs);
            record(tag + ".upper", lhs, n * chi + eps * std::abs(n));
        }
    }

    // K-comparison for arbitrary matrices and the K-drift bound
    const auto cert = pesin_certificate(metric);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int m = A.dimension();
    for (int trial = 0; trial < 8; ++trial) {
        Matrix R(m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) R(r, c) = unif(rng);
        const int from = trial % p;
        const int to = (trial * 3 + 1) % p;
        const double ln_std = std::log(operator_norm(R));
        const double ln_lyap = std::log(lyapunov_operator_norm(R, metric, from, to));
        const std::string tag = "knorm[" + std::to_string(from) + "->" + std::to_string(to) + "]";
        record(tag + ".lower", ln_std - std::log(cert.K[from]), ln_lyap);
        record(tag + ".upper", ln_lyap, ln_std + std::log(cert.K[to]));
    }
    for (int j = 0; j < p; ++j) {
        const double drift = std::log(cert.K[(j + 1) % p]) - std::log(cert.K[j]);
        record("kdrift[" + std::to_string(j) + "].upper", drift, eps);
        record("kdrift[" + std::to_string(j) + "].lower", -eps, drift);
    }

    if (!report.pass) {
        const BoundCheck* worst = report.worst();
        throw BoundViolation("norm bound violated: " + worst->name + " lhs=" +
                             std::to_string(worst->lhs) + " rhs=" + std::to_string(worst->rhs));
    }
    return report;
}

ConeReport cone_verify(const MatrixCocycle& A, const ShiftSpace& space,
                       const Word& x_word, const ShiftPoint& y, long long n,
                       double eta, double epsilon, int samples_per_step,
                       std::uint64_t seed) {
    LyapunovMetric metric = lyapunov_gram(A, x_word, space, epsilon);
    const auto& blocks = metric.splitting.spectrum.blocks;
    ConeReport report;
    if (blocks.size() < 2) {
        report.vacuous = true;
        return report;
    }
    const double chi = blocks.back().chi;
    const double nu = blocks[blocks.size() - 2].chi;
    const double eps0 = std::min(space.lambda() * 1.0, (chi - nu) / 2.0);
    if (epsilon >= eps0)
        throw HypothesisViolated("epsilon must be below min{lambda*alpha, (chi-nu)/2} = " +
                                 std::to_string(eps0));
    const int p = metric.period();
    const int m = A.dimension();
    const int d_top = blocks.back().multiplicity;
    const double growth_floor = chi - 2.0 * epsilon;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    report.max_ratio = 0.0;
    report.min_growth_margin = std::numeric_limits<double>::infinity();

    for (long long i = 0; i < n; ++i) {
        const int ji = static_cast<int>(i % p);
        const int jn = static_cast<int>((i + 1) % p);
        const Matrix& Etop = metric.splitting.bases[ji].back();
        Matrix F(m, m - d_top);
        {
            int col = 0;
            for (std::size_t bi = 0; bi + 1 < blocks.size(); ++bi) {
                const Matrix& B = metric.splitting.bases[ji][bi];
                F.block(0, col, m, B.cols()) = B;
                col += static_cast<int>(B.cols());
            }
        }
        const Matrix Vn_inv = metric.splitting.stacked(jn).inverse();
        const Matrix& gen = A.generator(y.at(i));
        for (int s = 0; s < samples_per_step; ++s) {
            Vector ge(d_top), gf(m - d_top);
            for (int k = 0; k < ge.size(); ++k) ge(k) = gauss(rng);
            for (int k = 0; k < gf.size(); ++k) gf(k) = gauss(rng);
            Vector e = Etop * ge;
            Vector f = F * gf;
            e /= metric.norm(ji, e);
            f /= metric.norm(ji, f);
            const double rho = (s == 0) ? 1.0 : static_cast<double>(s) / samples_per_step;
            const Vector u = e + rho * f; // ||u'||_i = 1, ||u^perp||_i = rho <= 1
            const Vector v = gen * u;
            // split v at the next orbit point: top-block part vs the rest
            const Vector coords = Vn_inv * v;
            Vector v_top = Vector::Zero(m), v_rest = Vector::Zero(m);
            {
                const Matrix Vn = metric.splitting.stacked(jn);
                int col = 0;
                for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
                    const int d = blocks[bi].multiplicity;
                    const Vector part = Vn.block(0, col, m, d) * coords.segment(col, d);
                    if (bi + 1 == blocks.size()) v_top += part; else v_rest += part;
                    col += d;
                }
            }
            const double n_top = metric.norm(jn, v_top);
            const double n_rest = v_rest.isZero(0) ? 0.0 : metric.norm(jn, v_rest);
            const double ratio = n_rest / n_top;
            report.max_ratio = std::max(report.max_ratio, ratio);
            const double growth_margin = std::log(n_top) - growth_floor; // log||u'||_i = 0
            report.min_growth_margin = std::min(report.min_growth_margin, growth_margin);
            ++report.samples;
            if (growth_margin < 0)
                throw ConeEscape("growth bound failed at step " + std::to_string(i) +
                                 ": log||(Au)'|| = " + std::to_string(std::log(n_top)) +
                                 " < chi - 2 eps = " + std::to_string(growth_floor));
            if (eta > 0 && ratio > 1.0 - eta)
                throw ConeEscape("cone contraction failed at step " + std::to_string(i) +
                                 ": ratio " + std::to_string(ratio) + " > 1 - eta");
        }
    }
    if (eta > 0) {
        report.eta = eta;
    } else {
        if (report.max_ratio >= 1.0)
            throw ConeEscape("image leaves the unit cone: worst ratio " +
                             std::to_string(report.max_ratio));
        report.eta = (1.0 - report.max_ratio) / 2.0;
    }
    return report;
}

Lemma31Report lemma31_verify(const MatrixCocycle& A, const ShiftSpace& space,
                             const Word& x_word, const ShiftPoint& y, long long n,
                             double epsilon, double lambda, double alpha) {
    if (lambda <= epsilon / alpha)
        throw HypothesisViolated("need lambda > epsilon/alpha (lambda=" +
                                 std::to_string(lambda) + ", epsilon/alpha=" +
                                 std::to_string(epsilon / alpha) + ")");
    LyapunovMetric metric = lyapunov_gram(A, x_word, space, epsilon);
    const auto cert = pesin_certificate(metric);
    const double l = std::max(1.0, cert.level);
    const double chi = metric.splitting.spectrum.max_exponent();
    const int p = metric.period();
    const ShiftPoint x = periodic_point(x_word, space);

    Lemma31Report rep;
    rep.n = n;
    rep.chi = chi;
    rep.epsilon = epsilon;
    rep.lambda = lambda;
    rep.alpha = alpha;
    rep.level = l;

    // measured closeness defect: least delta with
    //   d(f^i x, f^i y) <= delta e^{-lambda min(i, n-i)} on the window
    double delta = 0.0;
    for (long long i = 0; i <= n; ++i) {
        const MetricValue d = shift_metric(x.shifted(i), y.shifted(i), space, n + 64);
        const double factor = std::exp(space.lambda() *
                                       static_cast<double>(std::min(i, n - i)));
        delta = std::max(delta, d.value * factor);
    }
    rep.delta = delta;

    // scaled product of A along y over [0, n)
    ScaledProduct P(A.dimension());
    for (long long i = 0; i < n; ++i) P.apply(A.generator(y.at(i)));
    const int to = static_cast<int>(n % p);
    const double log_lyap = P.log_scale() +
        std::log(operator_norm(metric.gram_sqrt[to] * P.scaled_value() * metric.gram_inv_sqrt[0]));
    const double log_std = P.log_norm();
    rep.log_lyap_op_norm = log_lyap;
    rep.log_std_norm = log_std;

    const double excess = log_lyap - static_cast<double>(n) * (chi + epsilon);
    rep.c_min = (excess <= 0 || delta <= 0)
                    ? 0.0
                    : excess / (l * std::pow(delta, alpha));
    rep.small_defect = rep.c_min * std::pow(delta, alpha) < 1.0;

    const double log_rhs9 = 2.0 * std::log(l) + l + static_cast<double>(n) * (chi + epsilon);
    rep.log_bound9_rhs = log_rhs9;
    rep.margin9 = std::exp(std::min(700.0, log_rhs9 - log_std));
    rep.pass9 = log_std <= log_rhs9;
    return rep;
}

} // namespace lyap
