#include "lyap/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace lyap {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Running-average samples (n, log||A(y,n)||/n) up to n_max, ~2000 points.
std::string plot_data(const MatrixCocycle& A, const ShiftPoint& y, long long n_max) {
    std::ostringstream out;
    ScaledProduct P(A.dimension());
    const long long stride = std::max<long long>(1, n_max / 2000);
    for (long long n = 1; n <= n_max; ++n) {
        P.apply(A.generator(y.at(n - 1)));
        if (n % stride == 0 || n == n_max)
            out << n << " " << fmt(P.log_norm() / static_cast<double>(n)) << "\n";
    }
    return out.str();
}

PlanParams plan_params(const ExperimentConfig& c) {
    PlanParams p;
    p.levels = c.levels;
    p.epsilon = c.epsilon;
    p.margin = c.margin;
    p.n_min = c.n_min;
    p.length_cap = c.length_cap;
    return p;
}

void emit_gap(std::ostringstream& out, const SpectrumGapReport& gap) {
    for (const auto& row : gap.rows) {
        out << "gap i=" << row.index;
        for (double v : row.values) out << " " << fmt(v);
        out << " min=" << fmt(row.min) << " max=" << fmt(row.max) << "\n";
    }
    out << "gap separating_index="
        << (gap.separating_index ? std::to_string(*gap.separating_index) : "none") << "\n";
}

std::string scope_line(const ExperimentConfig& c) {
    std::string s = "scope measures={";
    for (std::size_t i = 0; i < c.measures.size(); ++i)
        s += (i ? "," : "") + format_word(c.measures[i]);
    return s + "} note=spectrum-extremes-over-supplied-family-only seed=" +
           std::to_string(c.seed) + "\n";
}

} // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
    if (dynamic_cast<const NoGap*>(&e)) return kExitNoGap;
    if (dynamic_cast<const BudgetExceeded*>(&e)) return kExitBudget;
    if (dynamic_cast<const HashMismatch*>(&e) || dynamic_cast<const RecomputationMismatch*>(&e))
        return kExitMismatch;
    if (dynamic_cast<const CertificationFailed*>(&e) || dynamic_cast<const BoundViolation*>(&e) ||
        dynamic_cast<const ConeEscape*>(&e))
        return kExitCertification;
    return kExitError;
}

CommandResult cmd_spectrum(const ExperimentConfig& config) {
    std::ostringstream out;
    out << scope_line(config);
    for (const Word& w : config.measures) {
        const auto sp = periodic_spectrum(config.cocycle, w, config.space);
        for (const auto& b : sp.blocks)
            out << "spectrum measure=" << format_word(w) << " chi=" << fmt(b.chi)
                << " m=" << b.multiplicity << "\n";
        for (int i = 1; i <= config.cocycle.dimension(); ++i)
            out << "spectrum measure=" << format_word(w) << " Lambda_" << i << "="
                << fmt(sp.top_sum(i)) << "\n";
    }
    out << "summary measures=" << config.measures.size() << " ok=1\n";
    return {kExitOk, out.str()};
}

CommandResult cmd_irregular(const ExperimentConfig& config) {
    std::ostringstream out;
    out << scope_line(config);
    const SpectrumGapReport gap =
        spectrum_gap(config.cocycle, config.measures, config.space);
    emit_gap(out, gap);
    if (!gap.separating_index) {
        out << "dichotomy branch=all-supplied-measures-have-same-Lyapunov-spectrum built=0\n";
        return {kExitNoGap, out.str()};
    }

    CylinderSpec cyl{config.cylinder_word, config.cylinder_lo, config.cylinder_hi};
    if (cyl.word.empty()) {
        // default target cylinder: the high measure's fixed window at the origin
        const auto& row = gap.rows[static_cast<std::size_t>(*gap.separating_index - 1)];
        std::size_t hi_idx = 0;
        for (std::size_t k = 0; k < row.values.size(); ++k)
            if (row.values[k] > row.values[hi_idx]) hi_idx = k;
        cyl.word = config.measures[hi_idx];
        cyl.lo = 0;
        cyl.hi = 0;
    }

    const LiftResult lift = lift_to_li(config.cocycle, config.space, config.measures,
                                       config.tau, cyl.realize(config.space),
                                       plan_params(config));
    const IrregularWitness& w = *lift.witness;
    out << "witness exterior_index=" << w.exterior_index
        << (w.exterior_index > 1 ? " via=exterior-power" : " via=direct") << " a="
        << fmt(w.a) << " b=" << fmt(w.b) << " tau=" << fmt(w.tau) << "\n";
    for (const auto& lv : w.levels)
        out << "certified n1=" << lv.n1 << " avg1=" << fmt(lv.avg_n1) << " n2=" << lv.n2
            << " avg2=" << fmt(lv.avg_n2) << "\n";
    out << "oscillation_gap " << fmt(w.oscillation_gap) << "\n";
    for (std::size_t k = 0; k < lift.basis_oscillations.size(); ++k)
        out << "basis_oscillation e" << k << " " << fmt(lift.basis_oscillations[k]) << "\n";
    out << "summary levels=" << w.levels.size() << " certified=1\n";

    if (!config.out.empty()) {
        save_witness(config.out, w, cyl, config.space, config.cocycle, config.seed);
        const MatrixCocycle Ai = w.exterior_index == 1
                                     ? config.cocycle
                                     : exterior_power(config.cocycle, w.exterior_index);
        write_file(config.out + ".dat",
                   plot_data(Ai, lift.point, w.schedule.levels.back().n2));
    }
    return {kExitOk, out.str()};
}

CommandResult cmd_verify(const std::string& witness_path, const ExperimentConfig& config) {
    std::ostringstream out;
    const LoadedWitness loaded = load_witness(witness_path);
    if (loaded.space_hash != config.space.hash())
        throw HashMismatch("witness space hash " + std::to_string(loaded.space_hash) +
                           " != config space hash " + std::to_string(config.space.hash()));
    if (loaded.cocycle_hash != config.cocycle.hash())
        throw HashMismatch("witness cocycle hash " + std::to_string(loaded.cocycle_hash) +
                           " != config cocycle hash " +
                           std::to_string(config.cocycle.hash()));

    const IrregularWitness& w = loaded.witness;
    const MatrixCocycle Ai = w.exterior_index == 1
                                 ? config.cocycle
                                 : exterior_power(config.cocycle, w.exterior_index);
    const Cylinder cylinder = loaded.cylinder.realize(config.space);
    IrregularTarget target{w.schedule.high_word, w.schedule.low_word, w.a,  w.b,
                           w.tau,                cylinder,            w.exterior_index};
    const ShiftPoint y0 = build_point(w.schedule, config.space, cylinder.base());
    const IrregularWitness fresh = certify_witness(Ai, y0, w.schedule, target);

    if (fresh.levels.size() != w.levels.size())
        throw RecomputationMismatch("level count differs on recomputation");
    for (std::size_t k = 0; k < w.levels.size(); ++k) {
        const double d1 = std::abs(fresh.levels[k].avg_n1 - w.levels[k].avg_n1);
        const double d2 = std::abs(fresh.levels[k].avg_n2 - w.levels[k].avg_n2);
        if (d1 > 1e-9 || d2 > 1e-9)
            throw RecomputationMismatch(
                "level " + std::to_string(k + 1) + ": recorded averages (" +
                fmt(w.levels[k].avg_n1) + ", " + fmt(w.levels[k].avg_n2) +
                ") diverge from recomputed (" + fmt(fresh.levels[k].avg_n1) + ", " +
                fmt(fresh.levels[k].avg_n2) + ")");
        out << "verify level=" << k + 1 << " n1=" << w.levels[k].n1
            << " n2=" << w.levels[k].n2 << " match=1\n";
    }
    out << "summary levels=" << w.levels.size() << " verified=1 seed="
        << loaded.seed << "\n";
    return {kExitOk, out.str()};
}

CommandResult cmd_scan(const ExperimentConfig& config) {
    std::ostringstream out;
    out << scope_line(config);
    if (config.window > config.window_cap)
        throw BudgetExceeded("window length " + std::to_string(config.window) +
                             " exceeds the configured cap " +
                             std::to_string(config.window_cap));

    // pick the extreme measures at exterior index 1
    std::size_t hi = 0, lo = 0;
    std::vector<double> tops;
    for (const Word& w : config.measures)
        tops.push_back(periodic_spectrum(config.cocycle, w, config.space).max_exponent());
    for (std::size_t k = 0; k < tops.size(); ++k) {
        if (tops[k] > tops[hi]) hi = k;
        if (tops[k] < tops[lo]) lo = k;
    }
    const double a = tops[hi], b = tops[lo];
    const double tau = config.tau > 0 ? config.tau : (a - b) / 8.0;

    const DensityReport report =
        density_scan(config.cocycle, config.space, config.measures[hi],
                     config.measures[lo], tau, config.window, config.n,
                     plan_params(config));
    for (const auto& e : report.entries) {
        out << "cylinder word=" << format_word(e.window_word)
            << " certified=" << (e.certified ? 1 : 0);
        if (e.certified)
            out << " n1=" << e.n1 << " n2=" << e.n2
                << " window_exact=" << (e.window_exact ? 1 : 0);
        else
            out << " error=" << e.error;
        out << "\n";
    }
    out << "summary certified=" << report.certified_count << "/"
        << report.entries.size() << "\n";
    return {report.all_certified ? kExitOk : kExitCertification, out.str()};
}

CommandResult cmd_bounds(const ExperimentConfig& config) {
    std::ostringstream out;
    out << scope_line(config);
    const MatrixCocycle& A = config.cocycle;
    const ShiftSpace& space = config.space;
    bool all_pass = true;

    for (const Word& word : config.measures) {
        const std::string tag = "measure=" + format_word(word);
        try {
            const LyapunovMetric metric =
                lyapunov_gram(A, word, space, config.metric_epsilon);
            const PesinCertificate pesin = pesin_certificate(metric);
            out << "pesin " << tag << " level=" << fmt(pesin.level)
                << " drift_ok=" << (pesin.drift_ok ? 1 : 0) << "\n";

            const BoundReport bounds = verify_norm_bounds(
                A, metric, config.bound_n_lo, config.bound_n_hi, 1e-6, config.seed);
            const BoundCheck* worst = bounds.worst();
            out << "bounds " << tag << " checks=" << bounds.checks.size()
                << " pass=" << (bounds.pass ? 1 : 0);
            if (worst) out << " worst=" << worst->name << " margin=" << fmt(worst->margin);
            out << "\n";
            if (!bounds.pass) all_pass = false;

            // shadowing pair: the periodic orbit, shadowed on a window of
            // length n then diverted to another legal continuation
            const long long n = std::min<long long>(config.n, 64);
            const ShiftPoint xbar = periodic_point(word, space);
            const Word& other =
                config.measures.size() > 1
                    ? config.measures[(&word - config.measures.data() + 1) %
                                      config.measures.size()]
                    : word;
            const ShiftPoint y = splice(
                {{xbar, -4, n + 4},
                 {periodic_point(other, space), n + 4 + space.spec_gap(),
                  n + 7 + space.spec_gap()}},
                space);

            const ConeReport cone = cone_verify(A, space, word, y, n, 0.0,
                                                config.metric_epsilon, 8, config.seed);
            out << "cone " << tag << " vacuous=" << (cone.vacuous ? 1 : 0)
                << " eta=" << fmt(cone.eta) << " pass=" << (cone.pass ? 1 : 0) << "\n";
            if (!cone.pass) all_pass = false;

            const Lemma31Report lem = lemma31_verify(A, space, word, y, n,
                                                     config.metric_epsilon,
                                                     space.lambda());
            out << "shadow " << tag << " n=" << lem.n << " delta=" << fmt(lem.delta)
                << " c_min=" << fmt(lem.c_min) << " margin9=" << fmt(lem.margin9)
                << " pass9=" << (lem.pass9 ? 1 : 0)
                << " small_defect=" << (lem.small_defect ? 1 : 0) << "\n";
            if (!lem.pass9) all_pass = false;
        } catch (const Error& e) {
            out << "instance " << tag << " pass=0 error=" << e.what() << "\n";
            all_pass = false;
        }
    }
    out << "summary pass=" << (all_pass ? 1 : 0) << " seed=" << config.seed << "\n";
    return {all_pass ? kExitOk : kExitCertification, out.str()};
}

} // namespace lyap
