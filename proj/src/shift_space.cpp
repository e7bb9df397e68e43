#include "lyap/shift_space.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>

namespace lyap {

namespace {

const char* kSymbolChars = "0123456789abcdefghijklmnopqrstuvwxyz";

std::vector<std::vector<char>> bool_mul(const std::vector<std::vector<char>>& A,
                                        const std::vector<std::vector<int>>& T) {
    const int n = static_cast<int>(A.size());
    std::vector<std::vector<char>> R(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (A[i][k])
                for (int j = 0; j < n; ++j)
                    if (T[k][j]) R[i][j] = 1;
    return R;
}

bool all_positive(const std::vector<std::vector<char>>& A) {
    for (const auto& row : A)
        for (char v : row)
            if (!v) return false;
    return true;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::string format_word(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Symbol a : w) {
        if (a < 0 || a > 35) throw ParseError("symbol out of printable range");
        s.push_back(kSymbolChars[a]);
    }
    return s;
}

Word parse_word(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) {
        const char* p = std::strchr(kSymbolChars, std::tolower(c));
        if (!p || c == '\0') throw ParseError(std::string("bad symbol character '") + c + "'");
        w.push_back(static_cast<Symbol>(p - kSymbolChars));
    }
    return w;
}

int primitivity_index(const std::vector<std::vector<int>>& transition) {
    const int n = static_cast<int>(transition.size());
    if (n == 0) throw ParseError("empty transition matrix");
    for (const auto& row : transition) {
        if (static_cast<int>(row.size()) != n)
            throw ParseError("transition matrix not square");
        for (int v : row)
            if (v != 0 && v != 1) throw ParseError("transition entries must be 0/1");
    }
    std::vector<std::vector<char>> P(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P[i][j] = transition[i][j] ? 1 : 0;
    const int cap = n * n;
    for (int k = 1; k <= cap; ++k) {
        if (all_positive(P)) return k;
        P = bool_mul(P, transition);
    }
    if (all_positive(P)) return cap;
    throw NotPrimitive("transition matrix is not primitive (no positive power up to alphabet^2)");
}

ShiftSpace::ShiftSpace(int alphabet_size, std::vector<std::vector<int>> transition,
                       double lambda)
    : alphabet_(alphabet_size), transition_(std::move(transition)), lambda_(lambda) {
    if (alphabet_ <= 0) throw ParseError("alphabet size must be positive");
    if (static_cast<int>(transition_.size()) != alphabet_)
        throw ParseError("transition matrix size does not match alphabet");
    if (lambda_ <= 0) throw ParseError("metric decay lambda must be positive");
    gap_ = primitivity_index(transition_);
    // exact-step reachability for path lengths 1..gap_; beyond gap_ every pair
    // is reachable because T^gap is positive and no row of T is zero
    reach_.resize(gap_);
    std::vector<std::vector<char>> P(alphabet_, std::vector<char>(alphabet_, 0));
    for (int i = 0; i < alphabet_; ++i)
        for (int j = 0; j < alphabet_; ++j) P[i][j] = transition_[i][j] ? 1 : 0;
    reach_[0] = P;
    for (int k = 1; k < gap_; ++k) reach_[k] = bool_mul(reach_[k - 1], transition_);
}

ShiftSpace ShiftSpace::full_shift(int alphabet_size, double lambda) {
    return ShiftSpace(alphabet_size,
                      std::vector<std::vector<int>>(alphabet_size,
                                                    std::vector<int>(alphabet_size, 1)),
                      lambda);
}

bool ShiftSpace::reachable(Symbol a, Symbol b, int steps) const {
    if (steps <= 0) return steps == 0 && a == b;
    if (steps > gap_) return true;
    return reach_[steps - 1][a][b] != 0;
}

Word ShiftSpace::bridge(Symbol a, Symbol b, int len) const {
    if (!reachable(a, b, len + 1))
        throw GapTooSmall("no legal path of " + std::to_string(len + 1) + " steps from " +
                          std::to_string(a) + " to " + std::to_string(b) +
                          " (need gap >= " + std::to_string(gap_) + ")");
    Word w;
    w.reserve(len);
    Symbol prev = a;
    for (int j = 0; j < len; ++j) {
        const int remaining = len - j; // steps from the chosen symbol to b
        for (Symbol s = 0; s < alphabet_; ++s) {
            if (allowed(prev, s) && reachable(s, b, remaining)) {
                w.push_back(s);
                prev = s;
                break;
            }
        }
    }
    return w;
}

bool ShiftSpace::legal_word(const Word& w, bool cyclic) const {
    for (Symbol s : w)
        if (s < 0 || s >= alphabet_) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!allowed(w[i], w[i + 1])) return false;
    if (cyclic && !w.empty() && !allowed(w.back(), w.front())) return false;
    return true;
}

std::string ShiftSpace::canonical_text() const {
    std::ostringstream os;
    os << "alphabet " << alphabet_ << "\n";
    os.precision(17);
    os << "lambda " << lambda_ << "\n";
    for (const auto& row : transition_) {
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
        os << "\n";
    }
    return os.str();
}

std::uint64_t ShiftSpace::hash() const { return fnv1a(canonical_text()); }

} // namespace lyap
