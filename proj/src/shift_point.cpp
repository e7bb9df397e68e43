#include "lyap/shift_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace lyap {

namespace {

std::int64_t imod(std::int64_t i, std::int64_t p) {
    std::int64_t r = i % p;
    return r < 0 ? r + p : r;
}

struct PeriodicSeq final : detail::Seq {
    Word word;
    Symbol at(std::int64_t i) const override {
        return word[imod(i, static_cast<std::int64_t>(word.size()))];
    }
};

struct SplicedSeq final : detail::Seq {
    // piece j covers [starts[j], starts[j+1]); the final sentinel is INT64_MAX.
    struct Piece {
        ShiftPoint point; // used when bridge empty and is_point
        Word bridge;
        bool is_point = true;
        std::int64_t start = 0;
    };
    std::vector<Piece> pieces;

    Symbol at(std::int64_t i) const override {
        // last piece whose start is <= i
        std::size_t lo = 0, hi = pieces.size();
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (pieces[mid].start <= i) lo = mid; else hi = mid;
        }
        const Piece& p = pieces[lo];
        if (p.is_point) return p.point.at(i);
        return p.bridge[static_cast<std::size_t>(i - p.start)];
    }
};

struct LazyTailSeq final : detail::Seq {
    ShiftPoint base;
    std::int64_t boundary = 0; // base rules i <= boundary
    std::function<void(std::vector<Symbol>&)> extend;
    mutable std::vector<Symbol> tail; // symbols at boundary+1, boundary+2, ...
    mutable std::mutex mu;

    Symbol at(std::int64_t i) const override {
        if (i <= boundary) return base.at(i);
        const std::size_t idx = static_cast<std::size_t>(i - boundary - 1);
        std::scoped_lock lock(mu);
        while (tail.size() <= idx) {
            const std::size_t before = tail.size();
            extend(tail);
            if (tail.size() == before)
                throw Error("lazy tail generator produced no symbols");
        }
        return tail[idx];
    }
};

} // namespace

Word ShiftPoint::window(std::int64_t lo, std::int64_t hi) const {
    Word w;
    w.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t i = lo; i <= hi; ++i) w.push_back(at(i));
    return w;
}

ShiftPoint ShiftPoint::with_lazy_tail(ShiftPoint base, std::int64_t boundary,
                                      std::function<void(std::vector<Symbol>&)> extend) {
    auto seq = std::make_shared<LazyTailSeq>();
    seq->base = std::move(base);
    seq->boundary = boundary;
    seq->extend = std::move(extend);
    return from_seq(std::move(seq));
}

ShiftPoint periodic_point(const Word& word, const ShiftSpace& space) {
    if (word.empty()) throw IllegalWord("periodic word must be non-empty");
    for (Symbol s : word)
        if (s < 0 || s >= space.alphabet_size())
            throw IllegalWord("symbol " + std::to_string(s) + " outside alphabet");
    if (!space.legal_word(word, /*cyclic=*/true))
        throw IllegalWord("word '" + format_word(word) + "' is not cyclically legal");
    auto seq = std::make_shared<PeriodicSeq>();
    seq->word = word;
    return ShiftPoint::from_seq(std::move(seq));
}

ShiftPoint splice(const std::vector<SpliceSegment>& segments, const ShiftSpace& space) {
    if (segments.empty()) throw Error("splice needs at least one segment");
    const int N = space.spec_gap();
    for (std::size_t j = 0; j < segments.size(); ++j) {
        if (segments[j].a > segments[j].b) throw Error("segment window reversed");
        if (j + 1 < segments.size()) {
            const std::int64_t gap = segments[j + 1].a - segments[j].b;
            if (gap < N)
                throw GapTooSmall("gap " + std::to_string(gap) + " between segments " +
                                  std::to_string(j) + " and " + std::to_string(j + 1) +
                                  " is below the specification gap " + std::to_string(N));
        }
    }
    auto seq = std::make_shared<SplicedSeq>();
    // left extension by the first segment's point
    seq->pieces.push_back({segments.front().point, {}, true,
                           std::numeric_limits<std::int64_t>::min()});
    for (std::size_t j = 0; j < segments.size(); ++j) {
        seq->pieces.push_back({segments[j].point, {}, true, segments[j].a});
        if (j + 1 < segments.size()) {
            const std::int64_t b = segments[j].b;
            const std::int64_t a2 = segments[j + 1].a;
            if (a2 - b > 1) {
                Word w = space.bridge(segments[j].point.at(b), segments[j + 1].point.at(a2),
                                      static_cast<int>(a2 - b - 1));
                seq->pieces.push_back({{}, std::move(w), false, b + 1});
            } else if (!space.allowed(segments[j].point.at(b), segments[j + 1].point.at(a2))) {
                // gap N with adjacent windows: only possible when N allows it
                throw GapTooSmall("adjacent segments join with a forbidden transition");
            }
        }
    }
    // right extension: the final point piece already extends to +infinity
    return ShiftPoint::from_seq(std::move(seq));
}

MetricValue shift_metric(const ShiftPoint& x, const ShiftPoint& y,
                         const ShiftSpace& space, std::int64_t horizon) {
    if (x.same_description(y)) return {0.0, true};
    const double lambda = space.lambda();
    for (std::int64_t k = 0; k < horizon; ++k) {
        if (x.at(k) != y.at(k) || x.at(-k) != y.at(-k))
            return {std::exp(-lambda * static_cast<double>(k)), true};
    }
    return {std::exp(-lambda * static_cast<double>(horizon)), false};
}

Cylinder::Cylinder(ShiftPoint base, std::int64_t lo, std::int64_t hi)
    : base_(std::move(base)), lo_(lo), hi_(hi) {
    if (lo_ > hi_) throw Error("cylinder window reversed");
}

Cylinder Cylinder::from_radius(ShiftPoint base, double t, const ShiftSpace& space) {
    if (t <= 0) throw Error("cylinder radius must be positive");
    std::int64_t w = 0;
    if (t < 1.0) w = static_cast<std::int64_t>(std::ceil(-std::log(t) / space.lambda()));
    return Cylinder(std::move(base), -w, w);
}

bool Cylinder::contains(const ShiftPoint& p) const {
    for (std::int64_t i = lo_; i <= hi_; ++i)
        if (p.at(i) != base_.at(i)) return false;
    return true;
}

} // namespace lyap
