#pragma once

#include <iosfwd>
#include <string>

#include "lyap/irregular.hpp"

namespace lyap {

/// Shift-space text format:
///   alphabet <N>
///   lambda <x>
///   transitions
///   <row 0: N entries of 0/1>
///   ...
/// '#' starts a comment; blank lines are ignored.  Parse failures carry the
/// 1-based line number.
ShiftSpace parse_space(std::istream& in, const std::string& origin = "<stream>");
ShiftSpace load_space(const std::string& path);
std::string space_text(const ShiftSpace& space);

/// Cocycle text format:
///   dimension <m>
///   symbols <k>
///   symbol <s>
///   <m rows of m entries>
///   ...
MatrixCocycle parse_cocycle(std::istream& in, const std::string& origin = "<stream>");
MatrixCocycle load_cocycle(const std::string& path);
std::string cocycle_text(const MatrixCocycle& A);

/// One experiment description, read from a JSON file.  The space and cocycle
/// may be inlined (objects mirroring the text formats) or referenced by path.
struct ExperimentConfig {
    ShiftSpace space;
    MatrixCocycle cocycle;
    std::vector<Word> measures;

    double tau = 0.0;      // <= 0: auto (a - b) / 8
    double epsilon = 0.0;  // 0: auto tau / 4
    int levels = 1;
    double margin = 0.0;   // 0: tau / 10
    long long n_min = 0;
    long long length_cap = 1000000;
    int window = 3;        // density-scan cylinder window length
    int window_cap = 12;
    long long horizon = 100000;
    long long n = 10;      // O_n level for scans / membership
    int bound_n_lo = -20, bound_n_hi = 20;
    double metric_epsilon = 0.1;
    Word cylinder_word;    // empty: the high measure's word
    std::int64_t cylinder_lo = 0, cylinder_hi = 0;
    std::uint64_t seed = 1;
    std::string out;       // report path ("" = stdout only)

    void validate() const; // throws ParseError on insane parameters
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<stream>");

/// Cylinder description that survives serialization: the base point is the
/// periodic extension of `word`, the window is [lo, hi].
struct CylinderSpec {
    Word word;
    std::int64_t lo = 0, hi = 0;

    Cylinder realize(const ShiftSpace& space) const {
        return Cylinder(periodic_point(word, space), lo, hi);
    }
};

/// Witness file: JSON record of the schedule, certified times and averages,
/// plus hashes binding it to the space/cocycle it was produced from.
std::string witness_json(const IrregularWitness& w, const CylinderSpec& cyl,
                         const ShiftSpace& space, const MatrixCocycle& A,
                         std::uint64_t seed);
void save_witness(const std::string& path, const IrregularWitness& w,
                  const CylinderSpec& cyl, const ShiftSpace& space,
                  const MatrixCocycle& A, std::uint64_t seed);

struct LoadedWitness {
    IrregularWitness witness;
    CylinderSpec cylinder;
    std::uint64_t space_hash = 0;
    std::uint64_t cocycle_hash = 0;
    std::uint64_t seed = 0;
};

LoadedWitness parse_witness(std::istream& in, const std::string& origin = "<stream>");
LoadedWitness load_witness(const std::string& path);

std::string read_file(const std::string& path); // throws ParseError when missing
void write_file(const std::string& path, const std::string& content);

} // namespace lyap
