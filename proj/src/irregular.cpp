#include "lyap/irregular.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace lyap {

namespace {

Symbol word_at(const Word& w, long long i) {
    return w[static_cast<std::size_t>(i % static_cast<long long>(w.size()))];
}

/// Appends bridge + block symbols for one phase; returns the new previous symbol.
void emit_bridge(const ShiftSpace& space, Symbol prev, Symbol next, int gap,
                 std::vector<Symbol>& out) {
    Word b = space.bridge(prev, next, gap - 1);
    out.insert(out.end(), b.begin(), b.end());
}

} // namespace

SpectrumGapReport spectrum_gap(const MatrixCocycle& A, const std::vector<Word>& measures,
                               const ShiftSpace& space, double tol) {
    if (measures.empty()) throw Error("spectrum_gap needs at least one measure");
    SpectrumGapReport report;
    for (int i = 1; i <= A.dimension(); ++i) {
        const MatrixCocycle Ai = i == 1 ? A : exterior_power(A, i);
        SpectrumGapReport::IndexRow row;
        row.index = i;
        for (const Word& w : measures)
            row.values.push_back(periodic_spectrum(Ai, w, space).max_exponent());
        row.min = *std::min_element(row.values.begin(), row.values.end());
        row.max = *std::max_element(row.values.begin(), row.values.end());
        if (!report.separating_index && row.max - row.min > tol)
            report.separating_index = i;
        report.rows.push_back(std::move(row));
    }
    if (!report.separating_index) {
        // equality of all Lambda_i forces equality of the full spectra; confirm
        // by direct pairwise comparison of (chi_i, m_i)
        report.spectra_all_equal = true;
        const auto ref = periodic_spectrum(A, measures.front(), space);
        for (const Word& w : measures)
            if (!periodic_spectrum(A, w, space).same_as(ref, 1e-8))
                report.spectra_all_equal = false;
    }
    return report;
}

void IrregularTarget::validate() const {
    if (tau <= 0) throw NoGap("tau must be positive");
    if (!(a - 2 * tau > b + 2 * tau))
        throw NoGap("no exponent gap: need a - 2 tau > b + 2 tau (a=" +
                    std::to_string(a) + ", b=" + std::to_string(b) +
                    ", tau=" + std::to_string(tau) + ")");
}

BlockSchedule plan_schedule(const MatrixCocycle& A, const ShiftSpace& space,
                            const IrregularTarget& target, const PlanParams& params,
                            ClosedFormLog* closed_form) {
    target.validate();
    if (params.epsilon > 0 && params.epsilon >= target.tau / 2)
        throw Error("epsilon must lie in (0, tau/2)");
    if (!space.legal_word(target.high_word, true) || !space.legal_word(target.low_word, true))
        throw IllegalWord("measure words must be cyclically legal");

    BlockSchedule sched;
    sched.prefix_len = target.cylinder.hi() + 1;
    sched.gap = space.spec_gap();
    sched.high_word = target.high_word;
    sched.low_word = target.low_word;
    sched.margin = params.margin > 0 ? params.margin : target.tau / 10.0;
    sched.n_min = params.n_min;
    sched.length_cap = params.length_cap;
    if (sched.margin >= target.tau)
        throw Error("margin must be below tau");

    const double high_threshold = target.a - target.tau + sched.margin;
    const double low_threshold = target.b + target.tau - sched.margin;
    const ShiftPoint& base = target.cylinder.base();

    ScaledProduct P(A.dimension());
    std::vector<Symbol> buf;
    for (long long i = 0; i < sched.prefix_len; ++i) {
        buf.push_back(base.at(i));
        P.apply(A.generator(buf.back()));
    }
    Symbol prev = base.at(sched.prefix_len - 1);

    auto position = [&] { return static_cast<long long>(buf.size()); };
    auto average = [&] { return P.log_norm() / static_cast<double>(position()); };

    long long prev_n2 = 0;
    long long prev_high = 0, prev_low = 0;
    for (int k = 1; k <= params.levels; ++k) {
        // high phase
        {
            std::vector<Symbol> bridge;
            emit_bridge(space, prev, target.high_word.front(), sched.gap, bridge);
            for (Symbol s : bridge) {
                buf.push_back(s);
                P.apply(A.generator(s));
            }
        }
        ScheduleLevel level;
        long long h = 0;
        long long next_check = position() + 1;
        while (true) {
            const Symbol s = word_at(target.high_word, h);
            buf.push_back(s);
            P.apply(A.generator(s));
            ++h;
            const long long pos = position();
            if (pos > params.length_cap)
                throw BudgetExceeded("level " + std::to_string(k) + " high block passed the length cap " +
                                     std::to_string(params.length_cap) + " (average " +
                                     std::to_string(average()) + ", threshold " +
                                     std::to_string(high_threshold) + ")");
            if (pos < next_check) continue;
            next_check = pos <= params.check_cadence_cap ? pos + 1 : pos + std::max<long long>(1, pos / 256);
            if (pos <= std::max(params.n_min, prev_n2) || h <= prev_high) continue;
            const double avg = average();
            if (avg > high_threshold) {
                level.high_len = h;
                level.n1 = pos;
                level.avg_n1 = avg;
                break;
            }
        }
        prev = word_at(target.high_word, level.high_len - 1);
        // low phase
        {
            std::vector<Symbol> bridge;
            emit_bridge(space, prev, target.low_word.front(), sched.gap, bridge);
            for (Symbol s : bridge) {
                buf.push_back(s);
                P.apply(A.generator(s));
            }
        }
        long long l = 0;
        next_check = position() + 1;
        while (true) {
            const Symbol s = word_at(target.low_word, l);
            buf.push_back(s);
            P.apply(A.generator(s));
            ++l;
            const long long pos = position();
            if (pos > params.length_cap)
                throw BudgetExceeded("level " + std::to_string(k) + " low block passed the length cap " +
                                     std::to_string(params.length_cap) + " (average " +
                                     std::to_string(average()) + ", threshold " +
                                     std::to_string(low_threshold) + ")");
            if (pos < next_check) continue;
            next_check = pos <= params.check_cadence_cap ? pos + 1 : pos + std::max<long long>(1, pos / 256);
            if (pos <= level.n1 || l <= prev_low) continue;
            const double avg = average();
            if (avg < low_threshold) {
                level.low_len = l;
                level.n2 = pos;
                level.avg_n2 = avg;
                break;
            }
        }
        prev = word_at(target.low_word, level.low_len - 1);
        prev_n2 = level.n2;
        prev_high = level.high_len;
        prev_low = level.low_len;
        sched.levels.push_back(level);
    }

    if (closed_form) {
        closed_form->available = params.pesin_level.has_value();
        if (closed_form->available) {
            const double l = *params.pesin_level;
            const double C = A.bound();
            const double N = sched.gap;
            const double eps = params.epsilon > 0 ? params.epsilon : target.tau / 4.0;
            for (const auto& lv : sched.levels) {
                const double H = static_cast<double>(lv.high_len);
                const double L = static_cast<double>(lv.low_len);
                const double lhs_h = -std::log(std::sqrt(2.0) * l) + H * (target.a - 2 * eps);
                const double rhs_h = N * std::log(C) + (H + N) * (target.a - target.tau);
                closed_form->high_holds.push_back(lhs_h > rhs_h);
                const double lhs_l = 2 * std::log(l) + l + L * (target.b + eps) +
                                     (H + 2 * N) * std::log(C);
                const double rhs_l = (target.b + target.tau) * (L + H + 2 * N);
                closed_form->low_holds.push_back(lhs_l < rhs_l);
            }
        }
    }
    return sched;
}

ShiftPoint build_point(const BlockSchedule& schedule, const ShiftSpace& space,
                       const ShiftPoint& base) {
    if (schedule.levels.empty()) return base;

    struct TailState {
        std::size_t level = 0;
        long long pos;
        Symbol prev;
        bool in_high = true;
    };
    auto state = std::make_shared<TailState>();
    state->pos = schedule.prefix_len;
    state->prev = base.at(schedule.prefix_len - 1);

    auto extend = [schedule, state, spc = &space](std::vector<Symbol>& tail) {
        auto emit_block = [&](const Word& word, long long len) {
            std::vector<Symbol> chunk;
            emit_bridge(*spc, state->prev, word.front(), schedule.gap, chunk);
            for (long long i = 0; i < len; ++i) chunk.push_back(word_at(word, i));
            state->prev = word_at(word, len - 1);
            state->pos += static_cast<long long>(chunk.size());
            tail.insert(tail.end(), chunk.begin(), chunk.end());
        };
        if (state->level < schedule.levels.size()) {
            const auto& lv = schedule.levels[state->level];
            if (state->in_high) {
                emit_block(schedule.high_word, lv.high_len);
                state->in_high = false;
            } else {
                emit_block(schedule.low_word, lv.low_len);
                state->in_high = true;
                ++state->level;
            }
        } else {
            // unplanned continuation: keep alternating with 4x length growth so
            // the point itself stays irregular beyond the certified levels
            if (state->in_high) {
                emit_block(schedule.high_word, 4 * state->pos);
                state->in_high = false;
            } else {
                emit_block(schedule.low_word, 4 * state->pos);
                state->in_high = true;
            }
        }
    };
    return ShiftPoint::with_lazy_tail(base, schedule.prefix_len - 1, std::move(extend));
}

IrregularWitness certify_witness(const MatrixCocycle& A, const ShiftPoint& y0,
                                 const BlockSchedule& schedule,
                                 const IrregularTarget& target) {
    IrregularWitness w;
    w.schedule = schedule;
    w.a = target.a;
    w.b = target.b;
    w.tau = target.tau;
    w.exterior_index = target.exterior_index;

    // positions implied by the block lengths must reproduce the planned times
    long long pos = schedule.prefix_len;
    for (std::size_t k = 0; k < schedule.levels.size(); ++k) {
        const auto& lv = schedule.levels[k];
        pos += (schedule.gap - 1) + lv.high_len;
        if (pos != lv.n1)
            throw CertificationFailed("schedule inconsistent at level " + std::to_string(k + 1) +
                                      ": derived n1 " + std::to_string(pos) + " != recorded " +
                                      std::to_string(lv.n1));
        pos += (schedule.gap - 1) + lv.low_len;
        if (pos != lv.n2)
            throw CertificationFailed("schedule inconsistent at level " + std::to_string(k + 1) +
                                      ": derived n2 " + std::to_string(pos) + " != recorded " +
                                      std::to_string(lv.n2));
    }

    ScaledProduct P(A.dimension());
    std::size_t k = 0;
    double min_high = std::numeric_limits<double>::infinity();
    double max_low = -std::numeric_limits<double>::infinity();
    for (long long i = 0; k < schedule.levels.size(); ++i) {
        P.apply(A.generator(y0.at(i)));
        const long long n = i + 1;
        const auto& lv = schedule.levels[k];
        if (n == lv.n1) {
            const double avg = P.log_norm() / static_cast<double>(n);
            if (!(avg > target.a - target.tau + kCertifySlack))
                throw CertificationFailed("level " + std::to_string(k + 1) + ": average " +
                                          std::to_string(avg) + " at n1=" + std::to_string(n) +
                                          " does not exceed a - tau strictly");
            w.levels.push_back({lv.n1, lv.n2, avg, 0.0});
            min_high = std::min(min_high, avg);
        } else if (n == lv.n2) {
            const double avg = P.log_norm() / static_cast<double>(n);
            if (!(avg < target.b + target.tau - kCertifySlack))
                throw CertificationFailed("level " + std::to_string(k + 1) + ": average " +
                                          std::to_string(avg) + " at n2=" + std::to_string(n) +
                                          " is not strictly below b + tau");
            w.levels.back().avg_n2 = avg;
            max_low = std::max(max_low, avg);
            ++k;
        }
    }
    w.oscillation_gap = min_high - max_low;
    w.in_cylinder = target.cylinder.contains(y0);
    if (!w.in_cylinder)
        throw CertificationFailed("constructed point left the target cylinder");
    return w;
}

MembershipResult on_membership(const MatrixCocycle& A, const ShiftPoint& w,
                               long long n, double a, double b, double tau,
                               long long horizon) {
    if (horizon < n) throw Error("horizon must be at least n");
    MembershipResult res;
    ScaledProduct P(A.dimension());
    for (long long i = 1; i <= horizon; ++i) {
        P.apply(A.generator(w.at(i - 1)));
        if (i <= n) continue;
        if (res.n1 != 0 && res.n2 != 0) break;
        const double avg = P.log_norm() / static_cast<double>(i);
        if (res.n1 == 0 && avg > a - tau) res.n1 = i;
        if (res.n2 == 0 && avg < b + tau) res.n2 = i;
    }
    res.found = res.n1 != 0 && res.n2 != 0;
    return res;
}

namespace {

std::vector<Word> legal_windows(const ShiftSpace& space, int len) {
    std::vector<Word> out;
    Word cur;
    std::function<void()> rec = [&] {
        if (static_cast<int>(cur.size()) == len) {
            out.push_back(cur);
            return;
        }
        for (Symbol s = 0; s < space.alphabet_size(); ++s) {
            if (!cur.empty() && !space.allowed(cur.back(), s)) continue;
            cur.push_back(s);
            rec();
            cur.pop_back();
        }
    };
    rec();
    return out;
}

} // namespace

DensityReport density_scan(const MatrixCocycle& A, const ShiftSpace& space,
                           const Word& high_word, const Word& low_word, double tau,
                           int window_len, long long n, const PlanParams& params) {
    const double a = periodic_spectrum(A, high_word, space).max_exponent();
    const double b = periodic_spectrum(A, low_word, space).max_exponent();
    IrregularTarget probe{high_word, low_word, a, b, tau,
                          Cylinder(periodic_point(high_word, space), 0, 0), 1};
    probe.validate(); // refuse the whole scan when there is no gap

    const auto windows = legal_windows(space, window_len);
    const std::int64_t lo = -static_cast<std::int64_t>((window_len - 1) / 2);

    DensityReport report;
    report.entries.resize(windows.size());
    std::vector<std::future<void>> jobs;
    for (std::size_t idx = 0; idx < windows.size(); ++idx) {
        jobs.push_back(std::async(std::launch::async, [&, idx] {
            auto& entry = report.entries[idx];
            entry.window_word = windows[idx];
            try {
                // close the window into a legal cycle to get a canonical base point
                Word cyc = windows[idx];
                Word tail = space.bridge(cyc.back(), cyc.front(), space.spec_gap() - 1);
                cyc.insert(cyc.end(), tail.begin(), tail.end());
                ShiftPoint base = periodic_point(cyc, space).shifted(lo);
                Cylinder cylinder(base, lo, lo + window_len - 1);
                IrregularTarget target{high_word, low_word, a, b, tau, cylinder, 1};
                PlanParams p = params;
                p.n_min = std::max(p.n_min, n);
                BlockSchedule sched = plan_schedule(A, space, target, p);
                ShiftPoint y0 = build_point(sched, space, base);
                IrregularWitness w = certify_witness(A, y0, sched, target);
                entry.certified = true;
                entry.n1 = w.levels.front().n1;
                entry.n2 = w.levels.front().n2;
                entry.window_exact = true;
                for (std::int64_t i = cylinder.lo(); i <= cylinder.hi(); ++i)
                    if (y0.at(i) != base.at(i)) entry.window_exact = false;
            } catch (const Error& e) {
                entry.certified = false;
                entry.error = e.what();
            }
        }));
    }
    for (auto& j : jobs) j.get();
    for (const auto& e : report.entries)
        if (e.certified) ++report.certified_count;
    report.all_certified = report.certified_count == static_cast<int>(report.entries.size());
    return report;
}

LiftResult lift_to_li(const MatrixCocycle& A, const ShiftSpace& space,
                      const std::vector<Word>& measures, double tau,
                      const Cylinder& cylinder, const PlanParams& params) {
    LiftResult result;
    result.gap = spectrum_gap(A, measures, space);
    if (!result.gap.separating_index) {
        result.all_spectra_equal = true;
        return result;
    }
    const int i = *result.gap.separating_index;
    result.exterior_index = i;
    const MatrixCocycle Ai = i == 1 ? A : exterior_power(A, i);

    const auto& row = result.gap.rows[static_cast<std::size_t>(i - 1)];
    std::size_t hi_idx = 0, lo_idx = 0;
    for (std::size_t k = 0; k < row.values.size(); ++k) {
        if (row.values[k] > row.values[hi_idx]) hi_idx = k;
        if (row.values[k] < row.values[lo_idx]) lo_idx = k;
    }
    const double a = row.values[hi_idx];
    const double b = row.values[lo_idx];
    if (tau <= 0) tau = (a - b) / 8.0;

    IrregularTarget target{measures[hi_idx], measures[lo_idx], a, b, tau, cylinder, i};
    BlockSchedule sched = plan_schedule(Ai, space, target, params);
    result.point = build_point(sched, space, cylinder.base());
    result.witness = certify_witness(Ai, result.point, sched, target);

    // partial vector averages of A itself at the certified times; each basis
    // vector is propagated with its own rescaling so that strongly contracting
    // directions do not underflow against the dominant one
    std::vector<long long> times;
    for (const auto& lv : result.witness->levels) {
        times.push_back(lv.n1);
        times.push_back(lv.n2);
    }
    const long long n_max = times.back();
    std::vector<double> lo_avg(A.dimension(), std::numeric_limits<double>::infinity());
    std::vector<double> hi_avg(A.dimension(), -std::numeric_limits<double>::infinity());
    std::vector<Vector> v;
    std::vector<double> log_scale(A.dimension(), 0.0);
    for (int kk = 0; kk < A.dimension(); ++kk)
        v.push_back(Vector::Unit(A.dimension(), kk));
    std::size_t t = 0;
    for (long long step = 1; step <= n_max && t < times.size(); ++step) {
        const Matrix& G = A.generator(result.point.at(step - 1));
        for (int kk = 0; kk < A.dimension(); ++kk) {
            v[kk] = G * v[kk];
            const double s = v[kk].norm();
            log_scale[kk] += std::log(s);
            v[kk] /= s;
        }
        if (step != times[t]) continue;
        ++t;
        for (int kk = 0; kk < A.dimension(); ++kk) {
            const double avg = log_scale[kk] / static_cast<double>(step);
            lo_avg[kk] = std::min(lo_avg[kk], avg);
            hi_avg[kk] = std::max(hi_avg[kk], avg);
        }
    }
    for (int k = 0; k < A.dimension(); ++k)
        result.basis_oscillations.push_back(hi_avg[k] - lo_avg[k]);
    return result;
}

} // namespace lyap
