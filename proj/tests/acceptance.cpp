// Acceptance suite: one line per criterion, PASS/FAIL, nonzero exit on any
// failure.  Criterion 5 is run exactly as stated (5 levels, tau = 0.05,
// length cap 10^6); the informational lines after it report what the same
// pipeline certifies within the cap.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include <Eigen/SVD>

#include "lyap/commands.hpp"

using namespace lyap;

namespace {

int g_failures = 0;

void line(int k, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++g_failures;
}

void info(int k, const std::string& detail) {
    std::printf("criterion %d: INFO  %s\n", k, detail.c_str());
}

void run(int k, const std::function<void(int)>& body) {
    try {
        body(k);
    } catch (const std::exception& e) {
        line(k, false, std::string("unexpected exception: ") + e.what());
    }
}

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

Matrix random_invertible(int m, Rng& rng) {
    while (true) {
        Matrix M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) M(i, j) = rng.uniform(-2.0, 2.0);
        if (std::abs(M.determinant()) > 0.05) return M;
    }
}

Matrix diag2(double a, double d) {
    Matrix M(2, 2);
    M << a, 0, 0, d;
    return M;
}

MatrixCocycle diagonal_example() {
    return MatrixCocycle(2, {diag2(2.0, 0.5), Matrix::Identity(2, 2)});
}

MatrixCocycle triangular_example() {
    Matrix T(2, 2);
    T << 2, 1, 0, 0.5;
    return MatrixCocycle(2, {T, Matrix::Identity(2, 2)});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const double kLog2 = std::log(2.0);

// --------------------------------------------------------------------------

void criterion1(int k) {
    const auto t0 = std::chrono::steady_clock::now();
    const ShiftSpace full = ShiftSpace::full_shift(2);
    const MatrixCocycle A = diagonal_example();
    bool ok = true;

    const auto sp0 = periodic_spectrum(A, {0}, full);
    ok &= sp0.blocks.size() == 2 && sp0.blocks[0].multiplicity == 1 &&
          sp0.blocks[1].multiplicity == 1 &&
          std::abs(sp0.blocks[1].chi - kLog2) <= 1e-10 &&
          std::abs(sp0.blocks[0].chi + kLog2) <= 1e-10;
    const auto sp1 = periodic_spectrum(A, {1}, full);
    ok &= sp1.blocks.size() == 1 && sp1.blocks[0].multiplicity == 2 &&
          std::abs(sp1.blocks[0].chi) <= 1e-10;

    Matrix R(2, 2);
    R << 0, -1, 1, 0;
    const MatrixCocycle coupled(2, {diag2(2.0, 0.5), R});
    const auto sp01 = periodic_spectrum(coupled, {0, 1}, full);
    ok &= sp01.blocks.size() == 1 && sp01.blocks[0].multiplicity == 2 &&
          std::abs(sp01.blocks[0].chi) <= 1e-10;

    const double dt = seconds_since(t0);
    ok &= dt < 1.0;
    line(k, ok, "periodic spectra exact to 1e-10, runtime " + fmt(dt) + " s");
}

void criterion2(int k) {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Rng rng(2024);
    int done = 0;
    double worst = 0.0;
    while (done < 100) {
        const int m = 2 + rng.below(3);
        const int p = 1 + rng.below(6);
        const MatrixCocycle A(m, {random_invertible(m, rng), random_invertible(m, rng)});
        Word w;
        for (int i = 0; i < p; ++i) w.push_back(rng.below(2));
        try {
            const auto sp = periodic_spectrum(A, w, full);
            const double lhs = sp.sum_all();
            // oracle: det A(x,p) is the product of the generator determinants
            double log_det = 0.0;
            for (Symbol s : w) log_det += std::log(std::abs(A.generator(s).determinant()));
            const double rhs = log_det / p;
            worst = std::max(worst, std::abs(lhs - rhs));
            ++done;
        } catch (const ClusteredSpectrum&) {
            // ambiguous modulus grouping: draw another cocycle
        }
    }
    line(k, worst <= 1e-10,
         "determinant identity over 100 random cocycles, worst defect " + fmt(worst));
}

void criterion3(int k) {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    Rng rng(3033);
    double worst_law = 0.0;
    int done = 0;
    while (done < 100) {
        const int m = 2 + rng.below(3);
        const int p = 1 + rng.below(6);
        const MatrixCocycle A(m, {random_invertible(m, rng), random_invertible(m, rng)});
        Word w;
        for (int i = 0; i < p; ++i) w.push_back(rng.below(2));
        try {
            const auto sp = periodic_spectrum(A, w, full);
            for (int i = 1; i <= m; ++i) {
                const auto spi = periodic_spectrum(exterior_power(A, i), w, full);
                worst_law = std::max(worst_law,
                                     std::abs(spi.max_exponent() - sp.top_sum(i)));
            }
            ++done;
        } catch (const ClusteredSpectrum&) {
        }
    }

    double worst_cmp = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = 2 + rng.below(3);
        const Matrix B = random_invertible(m, rng);
        const Eigen::JacobiSVD<Matrix> svd(B);
        for (int i = 1; i <= m; ++i) {
            double prod = 1.0;
            for (int j = 0; j < i; ++j) prod *= svd.singularValues()(j);
            worst_cmp = std::max(worst_cmp,
                                 std::abs(operator_norm(compound_matrix(B, i)) - prod));
        }
    }
    line(k, worst_law <= 1e-9 && worst_cmp <= 1e-9,
         "exterior-power law defect " + fmt(worst_law) +
         ", compound-vs-singular-values defect " + fmt(worst_cmp) +
         " over 1000 matrices");
}

void criterion4(int k) {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    bool ok = true;
    double worst_margin = 0.0;
    for (const Word& w : {Word{0}, Word{0, 1}}) {
        for (const MatrixCocycle& A : {diagonal_example(), triangular_example()}) {
            const auto metric = lyapunov_gram(A, w, full, 0.1, 1e-10);
            const auto report = verify_norm_bounds(A, metric, -20, 20, 1e-6);
            ok &= report.pass;
            if (report.worst()) worst_margin = std::min(worst_margin, report.worst()->margin);
            ok &= pesin_certificate(metric).drift_ok;
        }
    }
    const auto metric = lyapunov_gram(diagonal_example(), {0}, full, 0.1, 1e-10);
    Vector e1(2);
    e1 << 1, 0;
    const double analytic = 2.0 / std::tanh(0.05);
    const double got = e1.dot(metric.gram[0] * e1);
    ok &= std::abs(got - analytic) <= 1e-8 * analytic;
    line(k, ok, "norm/drift bounds pass on |n|<=20 (worst margin " + fmt(worst_margin) +
         "), analytic series defect " + fmt(std::abs(got - analytic)));
}

ExperimentConfig witness_config(int levels) {
    std::istringstream in(R"({
      "space": {"text": "alphabet 2\nlambda 1\ntransitions\n1 1\n1 1\n"},
      "cocycle": {"text": "dimension 2\nsymbols 2\nsymbol 0\n2 0\n0 0.5\nsymbol 1\n1 0\n0 1\n"},
      "measures": ["0", "1"],
      "tau": 0.05,
      "length_cap": 1000000
    })");
    ExperimentConfig cfg = parse_config(in, "<acceptance>");
    cfg.levels = levels;
    return cfg;
}

void criterion5(int k) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string out =
        (std::filesystem::temp_directory_path() / "lyap_acceptance_witness.json").string();
    try {
        ExperimentConfig cfg = witness_config(5);
        cfg.out = out;
        cmd_irregular(cfg);
        const bool verified = cmd_verify(out, cfg).exit_code == kExitOk;
        const bool in_time = seconds_since(t0) < 60.0;
        line(k, verified && in_time, "5-level witness certified and re-verified in " +
             fmt(seconds_since(t0)) + " s");
    } catch (const BudgetExceeded& e) {
        line(k, false, std::string("length cap 10^6 exceeded before level 5: ") + e.what());
        // report how deep the same pipeline gets within the stated cap
        for (int levels = 4; levels >= 1; --levels) {
            try {
                ExperimentConfig cfg = witness_config(levels);
                cfg.out = out;
                cmd_irregular(cfg);
                const LoadedWitness w = load_witness(out);
                const bool verified = cmd_verify(out, cfg).exit_code == kExitOk;
                info(k, "within the cap the pipeline certifies K=" +
                     std::to_string(levels) + " levels (n2=" +
                     std::to_string(w.witness.levels.back().n2) + "), re-verification " +
                     (verified ? "passes" : "fails") + ", total " +
                     fmt(seconds_since(t0)) + " s");
                break;
            } catch (const BudgetExceeded&) {
            }
        }
        info(k, "each crossing multiplies the certified time by about "
             "(a-tau)/(b+tau) ~ 12.9, so n2 of level 5 needs ~10^10 > 10^6");
    }
    std::filesystem::remove(out);
    std::filesystem::remove(out + ".dat");
}

void criterion6(int k) {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    PlanParams p;
    const auto rep_full =
        density_scan(diagonal_example(), full, {0}, {1}, 0.1, 3, 10, p);
    bool ok = rep_full.entries.size() == 8 && rep_full.all_certified;
    for (const auto& e : rep_full.entries) ok &= e.window_exact;

    const ShiftSpace gm(2, {{1, 1}, {1, 0}});
    const auto rep_gm =
        density_scan(diagonal_example(), gm, {0}, {0, 1}, 0.04, 3, 10, p);
    bool gm_ok = rep_gm.all_certified && !rep_gm.entries.empty();
    for (const auto& e : rep_gm.entries) gm_ok &= e.window_exact && gm.legal_word(e.window_word);
    ok &= gm_ok;
    line(k, ok, "O_10 hits all " + std::to_string(rep_full.entries.size()) +
         " full-shift and all " + std::to_string(rep_gm.entries.size()) +
         " golden-mean window-3 cylinders exactly");
}

void criterion7(int k) {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    bool ok = true;

    std::istringstream in(R"({
      "space": {"text": "alphabet 2\nlambda 1\ntransitions\n1 1\n1 1\n"},
      "cocycle": {"text": "dimension 2\nsymbols 2\nsymbol 0\n2 0\n0 0.5\nsymbol 1\n2 0\n0 0.5\n"},
      "measures": ["0", "1"]
    })");
    const auto constant = cmd_irregular(parse_config(in, "<acceptance>"));
    ok &= constant.exit_code == kExitNoGap;
    ok &= constant.report.find("built=0") != std::string::npos;

    const auto single = spectrum_gap(diagonal_example(), {Word{0}}, full);
    ok &= !single.separating_index.has_value() && single.spectra_all_equal;

    const auto member = on_membership(diagonal_example(), periodic_point({0}, full),
                                      10, kLog2, 0.0, 0.05, 100000);
    ok &= !member.found;
    line(k, ok, "constant/single-measure families take the equal-spectrum branch; "
         "pure high-measure point is outside O_10 up to horizon 1e5");
}

void criterion8(int k) {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    const MatrixCocycle A(2, {diag2(2.0, 0.5), diag2(2.0, 0.25)});
    const Cylinder cyl(periodic_point({0}, full), 0, 0);
    const auto res = lift_to_li(A, full, {{0}, {1}}, 0.0, cyl, PlanParams{});
    bool ok = res.exterior_index == 2 && res.witness.has_value() &&
              res.witness->in_cylinder;
    double max_osc = 0.0;
    for (double o : res.basis_oscillations) max_osc = std::max(max_osc, o);
    ok &= res.witness && max_osc >= res.witness->tau;
    line(k, ok, "equal-Lambda_1 example routed through the 2nd exterior power, "
         "basis oscillation " + fmt(max_osc) + " >= tau " +
         fmt(res.witness ? res.witness->tau : 0.0));
}

void criterion9(int k) {
    const ShiftSpace full = ShiftSpace::full_shift(2);
    const MatrixCocycle A = diagonal_example();
    bool ok = true;

    // shadowing pair agreeing with 0-bar on [-4, n+4], then diverted
    const long long n = 14;
    const ShiftPoint xbar = periodic_point({0}, full);
    const ShiftPoint other = periodic_point({1}, full);
    const ShiftPoint y = splice({{xbar, -4, n + 4}, {other, n + 6, n + 10}}, full);

    const auto cone = cone_verify(A, full, {0}, y, n, 0.0, 0.1);
    ok &= cone.pass && cone.eta > 0.0;

    double min_margin9 = std::numeric_limits<double>::infinity();
    for (const MatrixCocycle& C : {diagonal_example(), triangular_example()}) {
        for (const Word& w : {Word{0}, Word{0, 1}}) {
            const ShiftPoint yb =
                splice({{periodic_point(w, full), -4, n + 4}, {other, n + 6, n + 10}}, full);
            const auto rep = lemma31_verify(C, full, w, yb, n, 0.1, 1.0);
            min_margin9 = std::min(min_margin9, rep.margin9);
            ok &= rep.pass9;
        }
    }
    ok &= min_margin9 > 1.0;

    // negative control: agreement only on the first half of the window
    bool escaped = false;
    try {
        const ShiftPoint trunc = splice({{xbar, -2, n / 2}, {other, n / 2 + 2, n + 6}}, full);
        cone_verify(A, full, {0}, trunc, n, 0.0, 0.1);
    } catch (const ConeEscape&) {
        escaped = true;
    }
    ok &= escaped;

    // negative control: consistently corrupted Gram matrix
    bool caught = false;
    try {
        auto metric = lyapunov_gram(triangular_example(), {0, 1}, full, 0.1, 1e-10);
        metric.gram[1] *= 10.0;
        metric.gram_sqrt[1] *= std::sqrt(10.0);
        metric.gram_inv_sqrt[1] /= std::sqrt(10.0);
        verify_norm_bounds(triangular_example(), metric, -20, 20);
    } catch (const BoundViolation&) {
        caught = true;
    }
    ok &= caught;
    line(k, ok, "cone invariance holds (eta " + fmt(cone.eta) +
         "), instance-bound margin " + fmt(min_margin9) +
         " > 1, both negative controls fail as designed");
}

} // namespace

int main() {
    run(1, criterion1);
    run(2, criterion2);
    run(3, criterion3);
    run(4, criterion4);
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(8, criterion8);
    run(9, criterion9);
    std::printf("acceptance: %d of 9 criteria pass\n", 9 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
