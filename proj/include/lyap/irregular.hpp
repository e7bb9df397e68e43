#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lyap/lyapunov_metric.hpp"
#include "lyap/spectrum.hpp"

namespace lyap {

/// Per exterior index, the spread of top exponents over the supplied periodic
/// measures.  The separating index is the least i where min < max.
struct SpectrumGapReport {
    struct IndexRow {
        int index;
        std::vector<double> values; // top exponent of wedge^i A per measure
        double min, max;
    };
    std::vector<IndexRow> rows;
    std::optional<int> separating_index;
    bool spectra_all_equal = false;
};

SpectrumGapReport spectrum_gap(const MatrixCocycle& A, const std::vector<Word>& measures,
                               const ShiftSpace& space, double tol = 1e-9);

/// What to construct: a witness oscillating between the top exponents of the
/// high and the low measure, inside the given cylinder.
struct IrregularTarget {
    Word high_word;
    Word low_word;
    double a = 0.0;   // top exponent of the high measure
    double b = 0.0;   // top exponent of the low measure
    double tau = 0.0; // requires a - 2 tau > b + 2 tau
    Cylinder cylinder;
    int exterior_index = 1;

    void validate() const; // throws NoGap when the tau window is empty
};

struct ScheduleLevel {
    long long high_len = 0;
    long long low_len = 0;
    long long n1 = 0; // certified time after the high block
    long long n2 = 0; // certified time after the low block
    double avg_n1 = 0.0;
    double avg_n2 = 0.0;
};

/// Concrete block plan: [0, prefix_len) copies the cylinder base, then per
/// level bridge + high block + bridge + low block.  All bridges have length
/// spec_gap - 1 (orbit windows separated by exactly the specification gap).
struct BlockSchedule {
    long long prefix_len = 0;
    int gap = 1;
    Word high_word;
    Word low_word;
    std::vector<ScheduleLevel> levels;
    double margin = 0.0;
    long long n_min = 0;
    long long length_cap = 0;

    long long total_length() const {
        return levels.empty() ? prefix_len : levels.back().n2;
    }
};

struct PlanParams {
    int levels = 1;
    double epsilon = 0.0;   // in (0, tau/2); used for the closed-form log only
    double margin = 0.0;    // 0: default tau/10
    long long n_min = 0;    // all certified times must exceed this
    long long length_cap = 1000000;
    std::optional<double> pesin_level; // enables the closed-form inequality log
    int check_cadence_cap = 65536;     // positions checked every step below this
};

/// Record of the proof's closed-form sufficient block inequalities, evaluated
/// (not enforced) when the Pesin level is available.
struct ClosedFormLog {
    bool available = false;
    std::vector<bool> high_holds; // per level: l^{-1} 2^{-1/2} e^{H(a-2eps)} > C^N e^{(H+N)(a-tau)}
    std::vector<bool> low_holds;  // per level: l^2 e^l e^{L(b+eps)} C^{H+2N} < e^{(b+tau)(L+H+2N)}
};

/// Adaptively grows block lengths until the simulated finite-time average
/// strictly crosses a - tau (from above) and b + tau (from below) with the
/// configured margin.  Throws NoGap / BudgetExceeded.
BlockSchedule plan_schedule(const MatrixCocycle& A, const ShiftSpace& space,
                            const IrregularTarget& target, const PlanParams& params,
                            ClosedFormLog* closed_form = nullptr);

/// Materializes the scheduled point: agrees with the cylinder base on
/// (-inf, prefix_len), then alternates bridged blocks; beyond the planned
/// levels a lazy tail keeps doubling block lengths so the underlying point is
/// genuinely irregular.
ShiftPoint build_point(const BlockSchedule& schedule, const ShiftSpace& space,
                       const ShiftPoint& base);

struct LevelComparison {
    long long n1, n2;
    double avg_n1, avg_n2; // independently re-evaluated averages
};

struct IrregularWitness {
    BlockSchedule schedule;
    std::vector<LevelComparison> levels;
    double oscillation_gap = 0.0; // min high average - max low average
    bool in_cylinder = false;
    double a = 0.0, b = 0.0, tau = 0.0;
    int exterior_index = 1;
};

/// Strictness slack every certified comparison must survive.
inline constexpr double kCertifySlack = 1e-9;

/// Re-evaluates log||A(y_0, n)||/n at every certified time in one sweep and
/// checks both strict inequalities per level.  Throws CertificationFailed with
/// the first failing level.
IrregularWitness certify_witness(const MatrixCocycle& A, const ShiftPoint& y0,
                                 const BlockSchedule& schedule,
                                 const IrregularTarget& target);

struct MembershipResult {
    bool found = false;
    long long n1 = 0, n2 = 0;
};

/// Searches n_1, n_2 in (n, horizon] with average above a - tau resp. below
/// b + tau.  `found == false` means "not found within the horizon", not a
/// disproof.
MembershipResult on_membership(const MatrixCocycle& A, const ShiftPoint& w,
                               long long n, double a, double b, double tau,
                               long long horizon);

struct DensityReport {
    struct Entry {
        Word window_word;
        bool certified = false;
        std::string error;
        long long n1 = 0, n2 = 0;
        bool window_exact = false; // coordinate equality on the full window
    };
    std::vector<Entry> entries;
    int certified_count = 0;
    bool all_certified = false;
};

/// For every legal cylinder of the given window length, plans, builds and
/// certifies a point of O_n inside it.  Cylinders run concurrently; the report
/// order is the deterministic enumeration order.
DensityReport density_scan(const MatrixCocycle& A, const ShiftSpace& space,
                           const Word& high_word, const Word& low_word, double tau,
                           int window_len, long long n, const PlanParams& params);

struct LiftResult {
    SpectrumGapReport gap;
    bool all_spectra_equal = false;
    int exterior_index = 1;
    std::optional<IrregularWitness> witness;
    ShiftPoint point;
    // per standard basis vector of A: spread of partial averages
    // (1/n) log||A(y_0,n) e_k|| over the certified times
    std::vector<double> basis_oscillations;
};

/// Theorem-1 pipeline: find the least separating exterior index, run the
/// construction on wedge^i A, and measure the induced vector-exponent
/// oscillation under A itself.  tau <= 0 selects (a - b) / 8.
LiftResult lift_to_li(const MatrixCocycle& A, const ShiftSpace& space,
                      const std::vector<Word>& measures, double tau,
                      const Cylinder& cylinder, const PlanParams& params);

} // namespace lyap
