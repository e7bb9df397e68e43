#include "lyap/cocycle.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

namespace lyap {

namespace {
constexpr double kOverflowBudget = 1e120;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}
} // namespace

double operator_norm(const Matrix& B) {
    return Eigen::JacobiSVD<Matrix>(B).singularValues()(0);
}

double minimal_norm(const Matrix& B) {
    Eigen::JacobiSVD<Matrix> svd(B);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 0 || smin < 1e-300 * smax)
        throw Singular("matrix is numerically singular");
    return smin;
}

MatrixCocycle::MatrixCocycle(int dimension, std::vector<Matrix> generators)
    : dim_(dimension), gens_(std::move(generators)) {
    if (dim_ <= 0) throw ParseError("cocycle dimension must be positive");
    if (gens_.empty()) throw ParseError("cocycle needs at least one generator");
    bound_ = 1.0;
    inv_gens_.reserve(gens_.size());
    for (const Matrix& g : gens_) {
        if (g.rows() != dim_ || g.cols() != dim_)
            throw ParseError("generator dimension mismatch");
        Eigen::FullPivLU<Matrix> lu(g);
        if (!lu.isInvertible()) throw Singular("generator is not invertible");
        inv_gens_.push_back(lu.inverse());
        bound_ = std::max({bound_, operator_norm(g), operator_norm(inv_gens_.back())});
    }
}

std::string MatrixCocycle::canonical_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "dimension " << dim_ << "\n";
    for (std::size_t s = 0; s < gens_.size(); ++s) {
        os << "symbol " << s << "\n";
        for (int r = 0; r < dim_; ++r) {
            for (int c = 0; c < dim_; ++c) os << (c ? " " : "") << gens_[s](r, c);
            os << "\n";
        }
    }
    return os.str();
}

std::uint64_t MatrixCocycle::hash() const { return fnv1a(canonical_text()); }

CocycleProduct product(const MatrixCocycle& A, const ShiftPoint& x, std::int64_t n) {
    Matrix B = Matrix::Identity(A.dimension(), A.dimension());
    if (n > 0) {
        for (std::int64_t i = 0; i < n; ++i) {
            B = A.generator(x.at(i)) * B;
            if (!B.allFinite() || B.cwiseAbs().maxCoeff() > kOverflowBudget)
                throw NumericOverflow("cocycle product exceeded scale budget at step " +
                                      std::to_string(i + 1));
        }
    } else if (n < 0) {
        // A(x,-k) = [A(f^{-1}x) ... A(f^{-k}x)]^{-1} = A(f^{-k}x)^{-1} ... A(f^{-1}x)^{-1}
        for (std::int64_t i = -1; i >= n; --i) {
            B = A.generator_inverse(x.at(i)) * B;
            if (!B.allFinite() || B.cwiseAbs().maxCoeff() > kOverflowBudget)
                throw NumericOverflow("inverse cocycle product exceeded scale budget");
        }
    }
    return {std::move(B), n};
}

ScaledProduct::ScaledProduct(int dimension)
    : value_(Matrix::Identity(dimension, dimension)) {}

void ScaledProduct::apply(const Matrix& generator) {
    value_ = generator * value_;
    ++steps_;
    const double scale = value_.cwiseAbs().maxCoeff();
    if (scale > 1e30 || scale < 1e-30) {
        value_ /= scale;
        log_scale_ += std::log(scale);
    }
}

double ScaledProduct::log_norm() const {
    return log_scale_ + std::log(operator_norm(value_));
}

double ScaledProduct::log_norm_applied(const Vector& v) const {
    return log_scale_ + std::log((value_ * v).norm());
}

double log_norm_product(const MatrixCocycle& A, const ShiftPoint& x, std::int64_t n) {
    if (n < 1) throw Error("log_norm_product needs n >= 1");
    ScaledProduct P(A.dimension());
    for (std::int64_t i = 0; i < n; ++i) P.apply(A.generator(x.at(i)));
    return P.log_norm();
}

double finite_time_vector_exponent(const MatrixCocycle& A, const ShiftPoint& x,
                                   const Vector& v, std::int64_t n) {
    if (n < 1) throw Error("finite_time_vector_exponent needs n >= 1");
    if (v.norm() == 0.0) throw ZeroVector("vector exponent of the zero vector");
    Vector w = v;
    double log_scale = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        w = A.generator(x.at(i)) * w;
        const double s = w.norm();
        log_scale += std::log(s);
        w /= s;
    }
    return log_scale / static_cast<double>(n);
}

std::vector<std::vector<int>> index_subsets(int m, int i) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(i);
    for (int j = 0; j < i; ++j) cur[j] = j;
    while (true) {
        out.push_back(cur);
        int pos = i - 1;
        while (pos >= 0 && cur[pos] == m - i + pos) --pos;
        if (pos < 0) break;
        ++cur[pos];
        for (int j = pos + 1; j < i; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

Matrix compound_matrix(const Matrix& B, int i) {
    const int m = static_cast<int>(B.rows());
    if (i < 1 || i > m) throw Error("exterior index out of range");
    if (i == 1) return B;
    const auto subsets = index_subsets(m, i);
    const int d = static_cast<int>(subsets.size());
    Matrix C(d, d);
    Matrix minor(i, i);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            for (int a = 0; a < i; ++a)
                for (int b = 0; b < i; ++b) minor(a, b) = B(subsets[r][a], subsets[c][b]);
            C(r, c) = minor.determinant();
        }
    }
    return C;
}

MatrixCocycle exterior_power(const MatrixCocycle& A, int i) {
    std::vector<Matrix> gens;
    gens.reserve(A.symbol_count());
    for (int s = 0; s < A.symbol_count(); ++s)
        gens.push_back(compound_matrix(A.generator(s), i));
    const int d = static_cast<int>(gens.front().rows());
    return MatrixCocycle(d, std::move(gens));
}

HolderCertificate holder_certificate(const MatrixCocycle& A, const ShiftSpace& space,
                                     double alpha, int sample_count, std::uint64_t seed) {
    if (alpha <= 0) throw Error("Hoelder exponent must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> sym(0, space.alphabet_size() - 1);
    double coeff = 0.0;
    // sample pairs of points via random legal periodic words; d(x,y) depends
    // only on the first disagreement, the generator difference only on x_0, y_0
    auto random_point = [&]() {
        while (true) {
            Word w(8);
            for (auto& s : w) s = sym(rng);
            if (space.legal_word(w, true)) return periodic_point(w, space);
        }
    };
    for (int k = 0; k < sample_count; ++k) {
        ShiftPoint x = random_point();
        ShiftPoint y = random_point();
        MetricValue d = shift_metric(x, y, space, 64);
        if (!d.exact || d.value == 0.0) continue;
        const double num = operator_norm(A.generator(x.at(0)) - A.generator(y.at(0)));
        coeff = std::max(coeff, num / std::pow(d.value, alpha));
    }
    return {alpha, coeff, sample_count};
}

} // namespace lyap
