#include "lyap/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lyap {

namespace {

using json = nlohmann::ordered_json;

/// Line-oriented reader that keeps a 1-based line counter for error messages.
class LineReader {
public:
    LineReader(std::istream& in, std::string origin)
        : in_(in), origin_(std::move(origin)) {}

    /// Next non-blank, non-comment line; false at end of input.
    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            std::size_t i = 0;
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            std::size_t j = raw.size();
            while (j > i && std::isspace(static_cast<unsigned char>(raw[j - 1]))) --j;
            if (j == i) continue;
            out = raw.substr(i, j - i);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(origin_ + ":" + std::to_string(line_) + ": " + what);
    }

    std::string require(const std::string& what) {
        std::string s;
        if (!next(s)) fail("unexpected end of input, expected " + what);
        return s;
    }

    int line() const { return line_; }
    const std::string& origin() const { return origin_; }

private:
    std::istream& in_;
    std::string origin_;
    int line_ = 0;
};

/// "key value" line; fails naming the expected key.
std::string keyed(LineReader& r, const std::string& key) {
    const std::string s = r.require("'" + key + " ...'");
    std::istringstream ss(s);
    std::string k, rest;
    ss >> k;
    if (k != key) r.fail("expected '" + key + "', got '" + k + "'");
    std::getline(ss, rest);
    const auto pos = rest.find_first_not_of(' ');
    return pos == std::string::npos ? "" : rest.substr(pos);
}

long long parse_int(LineReader& r, const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        r.fail("expected integer " + what + ", got '" + text + "'");
    }
}

double parse_real(LineReader& r, const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        r.fail("expected number " + what + ", got '" + text + "'");
    }
}

std::vector<double> parse_row(LineReader& r, int expected, const std::string& what) {
    const std::string s = r.require(what + " row");
    std::istringstream ss(s);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) row.push_back(parse_real(r, tok, "entry " + std::to_string(row.size()) +
                                                       " of " + what + " row"));
    if (static_cast<int>(row.size()) != expected)
        r.fail(what + " row has " + std::to_string(row.size()) + " entries, expected " +
               std::to_string(expected));
    return row;
}

} // namespace

ShiftSpace parse_space(std::istream& in, const std::string& origin) {
    LineReader r(in, origin);
    const int n = static_cast<int>(parse_int(r, keyed(r, "alphabet"), "alphabet size"));
    if (n < 1 || n > 36) r.fail("alphabet size must be in 1..36");
    const double lambda = parse_real(r, keyed(r, "lambda"), "metric rate");
    if (!(lambda > 0)) r.fail("lambda must be positive");
    if (keyed(r, "transitions") != "") r.fail("unexpected text after 'transitions'");
    std::vector<std::vector<int>> T;
    for (int i = 0; i < n; ++i) {
        const auto row = parse_row(r, n, "transition");
        std::vector<int> irow;
        for (double v : row) {
            if (v != 0.0 && v != 1.0) r.fail("transition entries must be 0 or 1");
            irow.push_back(static_cast<int>(v));
        }
        T.push_back(std::move(irow));
    }
    try {
        return ShiftSpace(n, std::move(T), lambda);
    } catch (const NotPrimitive& e) {
        r.fail(e.what());
    }
}

ShiftSpace load_space(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open space file '" + path + "'");
    return parse_space(f, path);
}

std::string space_text(const ShiftSpace& space) {
    // canonical_text minus the 'transitions' header feeds the hash; re-insert
    // the header so the output parses back through parse_space
    std::string t = space.canonical_text();
    const auto second_nl = t.find('\n', t.find('\n') + 1);
    t.insert(second_nl + 1, "transitions\n");
    return t;
}

MatrixCocycle parse_cocycle(std::istream& in, const std::string& origin) {
    LineReader r(in, origin);
    const int m = static_cast<int>(parse_int(r, keyed(r, "dimension"), "dimension"));
    if (m < 1 || m > 16) r.fail("dimension must be in 1..16");
    const int k = static_cast<int>(parse_int(r, keyed(r, "symbols"), "symbol count"));
    if (k < 1 || k > 36) r.fail("symbol count must be in 1..36");
    std::vector<Matrix> gens;
    for (int s = 0; s < k; ++s) {
        const long long tag = parse_int(r, keyed(r, "symbol"), "symbol index");
        if (tag != s) r.fail("expected 'symbol " + std::to_string(s) + "'");
        Matrix M(m, m);
        for (int i = 0; i < m; ++i) {
            const auto row = parse_row(r, m, "matrix");
            for (int j = 0; j < m; ++j) M(i, j) = row[static_cast<std::size_t>(j)];
        }
        gens.push_back(std::move(M));
    }
    try {
        return MatrixCocycle(m, std::move(gens));
    } catch (const Error& e) {
        r.fail(e.what());
    }
}

MatrixCocycle load_cocycle(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open cocycle file '" + path + "'");
    return parse_cocycle(f, path);
}

std::string cocycle_text(const MatrixCocycle& A) {
    // add the 'symbols <k>' count line that the hashable canonical form omits
    std::string t = A.canonical_text();
    const auto first_nl = t.find('\n');
    t.insert(first_nl + 1, "symbols " + std::to_string(A.symbol_count()) + "\n");
    return t;
}

void ExperimentConfig::validate() const {
    if (measures.empty()) throw ParseError("config needs at least one measure word");
    for (const Word& w : measures)
        if (!space.legal_word(w, true))
            throw ParseError("measure word '" + format_word(w) + "' is not cyclically legal");
    if (tau > 0 && epsilon > 0 && epsilon >= tau / 2)
        throw ParseError("epsilon must lie in (0, tau/2)");
    if (levels < 0) throw ParseError("levels must be >= 0");
    if (window < 1) throw ParseError("window must be >= 1");
    if (horizon < 1) throw ParseError("horizon must be >= 1");
    if (length_cap < 1) throw ParseError("length cap must be >= 1");
}

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json parse_json(std::istream& in, const std::string& origin) {
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

std::string dir_of(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? "" : path.substr(0, pos + 1);
}

} // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    const json j = parse_json(in, origin);
    const std::string base = dir_of(origin);

    auto load_part = [&](const char* key, auto inline_parser, auto file_loader) {
        if (!j.contains(key)) throw ParseError(origin + ": missing '" + key + "'");
        const json& part = j.at(key);
        if (part.is_string()) {
            std::string p = part.get<std::string>();
            if (!p.empty() && p.front() != '/') p = base + p;
            return file_loader(p);
        }
        // inline object: serialize its "text" field through the text parser
        if (part.is_object() && part.contains("text")) {
            std::istringstream ss(part.at("text").get<std::string>());
            return inline_parser(ss, origin + "#" + key);
        }
        throw ParseError(origin + ": '" + std::string(key) +
                         "' must be a path or an object with a 'text' field");
    };

    ExperimentConfig cfg{
        load_part("space", [](std::istream& s, const std::string& o) { return parse_space(s, o); },
                  [](const std::string& p) { return load_space(p); }),
        load_part("cocycle",
                  [](std::istream& s, const std::string& o) { return parse_cocycle(s, o); },
                  [](const std::string& p) { return load_cocycle(p); })};

    if (!j.contains("measures")) throw ParseError(origin + ": missing 'measures'");
    for (const auto& m : j.at("measures")) cfg.measures.push_back(parse_word(m.get<std::string>()));

    maybe(j, "tau", cfg.tau);
    maybe(j, "epsilon", cfg.epsilon);
    maybe(j, "levels", cfg.levels);
    maybe(j, "margin", cfg.margin);
    maybe(j, "n_min", cfg.n_min);
    maybe(j, "length_cap", cfg.length_cap);
    maybe(j, "window", cfg.window);
    maybe(j, "window_cap", cfg.window_cap);
    maybe(j, "horizon", cfg.horizon);
    maybe(j, "n", cfg.n);
    maybe(j, "bound_n_lo", cfg.bound_n_lo);
    maybe(j, "bound_n_hi", cfg.bound_n_hi);
    maybe(j, "metric_epsilon", cfg.metric_epsilon);
    if (j.contains("cylinder")) {
        const json& c = j.at("cylinder");
        cfg.cylinder_word = parse_word(c.at("word").get<std::string>());
        cfg.cylinder_lo = c.value("lo", std::int64_t{0});
        cfg.cylinder_hi = c.value("hi", std::int64_t{0});
        if (cfg.cylinder_lo > cfg.cylinder_hi)
            throw ParseError(origin + ": cylinder lo must not exceed hi");
        if (!cfg.space.legal_word(cfg.cylinder_word, true))
            throw ParseError(origin + ": cylinder word is not cyclically legal");
    }
    maybe(j, "seed", cfg.seed);
    maybe(j, "out", cfg.out);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config file '" + path + "'");
    return parse_config(f, path);
}

std::string witness_json(const IrregularWitness& w, const CylinderSpec& cyl,
                         const ShiftSpace& space, const MatrixCocycle& A,
                         std::uint64_t seed) {
    json j;
    j["space_hash"] = space.hash();
    j["cocycle_hash"] = A.hash();
    j["seed"] = seed;
    j["exterior_index"] = w.exterior_index;
    j["a"] = w.a;
    j["b"] = w.b;
    j["tau"] = w.tau;
    j["cylinder"] = {{"word", format_word(cyl.word)}, {"lo", cyl.lo}, {"hi", cyl.hi}};
    j["scope"] = "spectrum extremes taken over the supplied measure family only";
    json s;
    s["prefix_len"] = w.schedule.prefix_len;
    s["gap"] = w.schedule.gap;
    s["high_word"] = format_word(w.schedule.high_word);
    s["low_word"] = format_word(w.schedule.low_word);
    s["margin"] = w.schedule.margin;
    s["n_min"] = w.schedule.n_min;
    s["length_cap"] = w.schedule.length_cap;
    s["levels"] = json::array();
    for (const auto& lv : w.schedule.levels)
        s["levels"].push_back({{"high_len", lv.high_len},
                               {"low_len", lv.low_len},
                               {"n1", lv.n1},
                               {"n2", lv.n2}});
    j["schedule"] = std::move(s);
    j["certified"] = json::array();
    for (const auto& lv : w.levels)
        j["certified"].push_back({{"n1", lv.n1},
                                  {"n2", lv.n2},
                                  {"avg_n1", lv.avg_n1},
                                  {"avg_n2", lv.avg_n2}});
    j["oscillation_gap"] = w.oscillation_gap;
    j["in_cylinder"] = w.in_cylinder;
    return j.dump(2) + "\n";
}

void save_witness(const std::string& path, const IrregularWitness& w,
                  const CylinderSpec& cyl, const ShiftSpace& space,
                  const MatrixCocycle& A, std::uint64_t seed) {
    write_file(path, witness_json(w, cyl, space, A, seed));
}

LoadedWitness parse_witness(std::istream& in, const std::string& origin) {
    const json j = parse_json(in, origin);
    try {
        LoadedWitness out;
        out.space_hash = j.at("space_hash").get<std::uint64_t>();
        out.cocycle_hash = j.at("cocycle_hash").get<std::uint64_t>();
        out.seed = j.value("seed", std::uint64_t{0});
        IrregularWitness& w = out.witness;
        w.exterior_index = j.at("exterior_index").get<int>();
        w.a = j.at("a").get<double>();
        w.b = j.at("b").get<double>();
        w.tau = j.at("tau").get<double>();
        const json& c = j.at("cylinder");
        out.cylinder.word = parse_word(c.at("word").get<std::string>());
        out.cylinder.lo = c.at("lo").get<std::int64_t>();
        out.cylinder.hi = c.at("hi").get<std::int64_t>();
        const json& s = j.at("schedule");
        w.schedule.prefix_len = s.at("prefix_len").get<long long>();
        w.schedule.gap = s.at("gap").get<int>();
        w.schedule.high_word = parse_word(s.at("high_word").get<std::string>());
        w.schedule.low_word = parse_word(s.at("low_word").get<std::string>());
        w.schedule.margin = s.at("margin").get<double>();
        w.schedule.n_min = s.value("n_min", 0LL);
        w.schedule.length_cap = s.value("length_cap", 0LL);
        for (const auto& lv : s.at("levels")) {
            ScheduleLevel level;
            level.high_len = lv.at("high_len").get<long long>();
            level.low_len = lv.at("low_len").get<long long>();
            level.n1 = lv.at("n1").get<long long>();
            level.n2 = lv.at("n2").get<long long>();
            w.schedule.levels.push_back(level);
        }
        for (const auto& lv : j.at("certified")) {
            LevelComparison c;
            c.n1 = lv.at("n1").get<long long>();
            c.n2 = lv.at("n2").get<long long>();
            c.avg_n1 = lv.at("avg_n1").get<double>();
            c.avg_n2 = lv.at("avg_n2").get<double>();
            w.levels.push_back(c);
        }
        w.oscillation_gap = j.at("oscillation_gap").get<double>();
        w.in_cylinder = j.value("in_cylinder", true);
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": malformed witness: " + e.what());
    }
}

LoadedWitness load_witness(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open witness file '" + path + "'");
    return parse_witness(f, path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open '" + path + "' for writing");
    f << content;
}

} // namespace lyap
