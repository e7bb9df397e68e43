#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lyap/errors.hpp"

namespace lyap {

using Symbol = int;
using Word = std::vector<Symbol>;

std::string format_word(const Word& w);
Word parse_word(const std::string& s);

/// A mixing subshift of finite type over a finite alphabet, together with the
/// exponential metric d(x,y) = exp(-lambda * min{|i| : x_i != y_i}).
///
/// The transition matrix must be primitive; `spec_gap()` is the least k with
/// transition^k entrywise positive, which is a valid specification gap for
/// orbit-segment concatenation.
class ShiftSpace {
public:
    ShiftSpace(int alphabet_size, std::vector<std::vector<int>> transition,
               double lambda = 1.0);

    /// Full shift on `alphabet_size` symbols (all transitions allowed).
    static ShiftSpace full_shift(int alphabet_size, double lambda = 1.0);

    int alphabet_size() const { return alphabet_; }
    double lambda() const { return lambda_; }
    int spec_gap() const { return gap_; }
    bool allowed(Symbol a, Symbol b) const { return transition_[a][b] != 0; }
    const std::vector<std::vector<int>>& transition() const { return transition_; }

    /// True if a legal path of exactly `steps` transitions leads from `a` to `b`.
    bool reachable(Symbol a, Symbol b, int steps) const;

    /// Lexicographically least legal word w of length `len` with
    /// a -> w_0 -> ... -> w_{len-1} -> b all allowed.  Requires len + 1 >= spec_gap
    /// (or a direct transition when len == 0).
    Word bridge(Symbol a, Symbol b, int len) const;

    /// Bridging word of length exactly spec_gap (the canonical connector).
    Word connect(Symbol a, Symbol b) const { return bridge(a, b, gap_); }

    /// Every internal transition of `w` allowed; with `cyclic`, also last -> first.
    bool legal_word(const Word& w, bool cyclic = false) const;

    std::string canonical_text() const;
    std::uint64_t hash() const;

private:
    int alphabet_;
    std::vector<std::vector<int>> transition_;
    double lambda_;
    int gap_;
    // reach_[k][a][b]: path of exactly k+1 steps exists from a to b
    std::vector<std::vector<std::vector<char>>> reach_;
};

/// Least k >= 1 with transition^k strictly positive.  Throws NotPrimitive if no
/// k <= alphabet^2 works.
int primitivity_index(const std::vector<std::vector<int>>& transition);

} // namespace lyap
