#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "lyap/shift_space.hpp"

namespace lyap {

namespace detail {
/// Immutable two-sided symbol sequence.  `at` must be total and pure
/// (lazy implementations memoize under a lock).
struct Seq {
    virtual ~Seq() = default;
    virtual Symbol at(std::int64_t i) const = 0;
};
} // namespace detail

/// A finitely described point of a subshift: periodic tails around a spliced
/// center, or a lazily generated right tail for constructed points.  Values are
/// immutable; shifting only moves an offset.
class ShiftPoint {
public:
    ShiftPoint() = default;

    Symbol at(std::int64_t i) const { return seq_->at(i + offset_); }

    /// f^k: at(shifted(k), i) == at(*this, i + k).
    ShiftPoint shifted(std::int64_t k) const {
        ShiftPoint p(*this);
        p.offset_ += k;
        return p;
    }

    bool same_description(const ShiftPoint& o) const {
        return seq_ == o.seq_ && offset_ == o.offset_;
    }

    Word window(std::int64_t lo, std::int64_t hi) const;

    static ShiftPoint from_seq(std::shared_ptr<const detail::Seq> seq) {
        ShiftPoint p;
        p.seq_ = std::move(seq);
        return p;
    }

    /// Point equal to `base` for i <= boundary; beyond, symbols are produced on
    /// demand by `extend` (which appends at least one symbol per call).
    /// Memoization is mutex-guarded, so concurrent reads are safe.
    static ShiftPoint with_lazy_tail(ShiftPoint base, std::int64_t boundary,
                                     std::function<void(std::vector<Symbol>&)> extend);

private:
    std::shared_ptr<const detail::Seq> seq_;
    std::int64_t offset_ = 0;
};

/// Two-sided periodic point of the given word (coordinate 0 = word[0]).
/// Throws IllegalWord if an internal or wrap-around transition is forbidden.
ShiftPoint periodic_point(const Word& word, const ShiftSpace& space);

struct SpliceSegment {
    ShiftPoint point;
    std::int64_t a;
    std::int64_t b; // inclusive, a <= b
};

/// Concatenates orbit windows: the result agrees with segment j on [a_j, b_j]
/// verbatim, gaps are filled by lexicographically least bridging words, and the
/// sequence extends by the first/last segment's point outside [a_1, b_k].
/// Requires a_{j+1} - b_j >= spec_gap (else GapTooSmall).
ShiftPoint splice(const std::vector<SpliceSegment>& segments, const ShiftSpace& space);

struct MetricValue {
    double value = 0.0;
    bool exact = true; // false: value is the upper bound exp(-lambda*horizon)
};

/// Shift metric up to a scan horizon: exact exp(-lambda*k) when coordinates
/// first disagree at |i| = k < horizon, else the bound exp(-lambda*horizon).
MetricValue shift_metric(const ShiftPoint& x, const ShiftPoint& y,
                         const ShiftSpace& space, std::int64_t horizon);

/// Cylinder set: points agreeing with `base` on [lo, hi].
class Cylinder {
public:
    Cylinder(ShiftPoint base, std::int64_t lo, std::int64_t hi);

    /// Ball B(base, t): window |i| <= ceil(-ln(t)/lambda).
    static Cylinder from_radius(ShiftPoint base, double t, const ShiftSpace& space);

    bool contains(const ShiftPoint& p) const;
    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return hi_; }
    const ShiftPoint& base() const { return base_; }

private:
    ShiftPoint base_;
    std::int64_t lo_, hi_;
};

} // namespace lyap
