#pragma once

// File formats.
//
// Point set (text):
//     # <n> <d>
//     x_1 ... x_d          one point per line, %.17g
// The header is optional on input; without it d is taken from the first line.
//
// Generating vector (JSON):
//     {"dimension": d, "primes": [2, 3, ...], "permutations": [[0, 1], [0, 2, 1], ...]}

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stardisc/discrepancy.hpp"
#include "stardisc/error.hpp"
#include "stardisc/inverse.hpp"
#include "stardisc/optimizer.hpp"
#include "stardisc/sequence.hpp"

namespace stardisc::io {

/// Shortest %.17g rendering; round-trips every double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_point_set(std::ostream& os, const PointSet& X) {
    os << "# " << X.size() << ' ' << X.dimension() << '\n';
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t j = 0; j < X.dimension(); ++j) {
            if (j) os << ' ';
            os << format_double(X(i, j));
        }
        os << '\n';
    }
}

inline PointSet read_point_set(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_header = 0, d = 0;
    bool have_header = false;
    std::vector<double> coords;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (have_header || rows) throw ParseError("unexpected header line", line_no);
            std::istringstream hs(line.substr(first + 1));
            if (!(hs >> n_header >> d) || d == 0) throw ParseError("malformed header, expected '# n d'", line_no);
            have_header = true;
            continue;
        }
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw ParseError("not a number: '" + tok + "'", line_no);
            if (!(v >= 0.0 && v < 1.0)) throw ParseError("coordinate " + tok + " outside [0,1)", line_no);
            row.push_back(v);
        }
        if (d == 0) d = row.size();
        if (row.size() != d)
            throw ParseError("expected " + std::to_string(d) + " coordinates, found " +
                                 std::to_string(row.size()),
                             line_no);
        coords.insert(coords.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw ParseError("point set file contains no points");
    if (have_header && rows != n_header)
        throw ParseError("header announces " + std::to_string(n_header) + " points, file has " +
                         std::to_string(rows));
    return PointSet(rows, d, std::move(coords));
}

inline nlohmann::json to_json(const GeneratingVector& gv) {
    nlohmann::json perms = nlohmann::json::array();
    for (const auto& p : gv.perms()) perms.push_back(p.map());
    return {{"dimension", gv.dimension()}, {"primes", gv.primes()}, {"permutations", perms}};
}

inline void write_generating_vector(std::ostream& os, const GeneratingVector& gv) {
    os << to_json(gv).dump(2) << '\n';
}

inline GeneratingVector generating_vector_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("generating vector must be a JSON object");
    for (const char* field : {"dimension", "primes", "permutations"})
        if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
    const auto& dim = j["dimension"];
    if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0)
        throw ParseError("field 'dimension' must be a positive integer");
    const std::size_t d = dim.get<std::size_t>();
    if (d > kMaxDimension) throw ParseError("field 'dimension' exceeds " + std::to_string(kMaxDimension));
    const auto& primes = j["primes"];
    const auto& perms = j["permutations"];
    if (!primes.is_array() || primes.size() != d)
        throw ParseError("field 'primes' must be an array of " + std::to_string(d) + " integers");
    if (!perms.is_array() || perms.size() != d)
        throw ParseError("field 'permutations' must be an array of " + std::to_string(d) + " arrays");
    const auto expected = first_primes(d);
    std::vector<Permutation> out;
    for (std::size_t k = 0; k < d; ++k) {
        const std::string where = "permutations[" + std::to_string(k) + "]";
        if (!primes[k].is_number_unsigned() || primes[k].get<std::uint32_t>() != expected[k])
            throw ParseError("primes[" + std::to_string(k) + "] must be " + std::to_string(expected[k]));
        if (!perms[k].is_array()) throw ParseError("field '" + where + "' must be an array");
        std::vector<Digit> map;
        for (const auto& v : perms[k]) {
            if (!v.is_number_unsigned()) throw ParseError("field '" + where + "' must hold non-negative integers");
            map.push_back(v.get<Digit>());
        }
        try {
            out.emplace_back(expected[k], std::move(map));
        } catch (const ValidationError& e) {
            throw ValidationError("field '" + where + "': " + e.what());
        }
    }
    return GeneratingVector(std::move(out));
}

inline GeneratingVector read_generating_vector(std::istream& is) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return generating_vector_from_json(j);
}

template <class Reader>
auto read_file(const std::string& path, Reader&& reader) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return reader(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    writer(out);
    if (!out) throw Error("error while writing '" + path + "'");
}

inline PointSet load_point_set(const std::string& path) {
    return read_file(path, [](std::istream& is) { return read_point_set(is); });
}

inline GeneratingVector load_generating_vector(const std::string& path) {
    return read_file(path, [](std::istream& is) { return read_generating_vector(is); });
}

// ---------------------------------------------------------------------------
// CSV

/// Where a reported point set came from.
enum class Source { optimized, identity_halton, loaded };

inline const char* to_string(Source s) noexcept {
    switch (s) {
        case Source::optimized: return "optimized";
        case Source::identity_halton: return "identity-halton";
        case Source::loaded: return "loaded";
    }
    return "?";
}

/// One row of a results table.
struct ResultRecord {
    std::size_t d = 0;
    std::size_t n = 0;
    double value = 0.0;
    BoundKind kind = BoundKind::exact;
    Source source = Source::loaded;
};

inline void write_results_csv(std::ostream& os, const std::vector<ResultRecord>& rows) {
    os << "d,n,discrepancy,kind,source\n";
    for (const auto& r : rows)
        os << r.d << ',' << r.n << ',' << format_double(r.value) << ',' << to_string(r.kind) << ','
           << to_string(r.source) << '\n';
}

inline nlohmann::json to_json(const ResultRecord& r) {
    return {{"d", r.d}, {"n", r.n}, {"discrepancy", r.value}, {"kind", to_string(r.kind)},
            {"source", to_string(r.source)}};
}

inline nlohmann::json to_json(const DiscrepancyBound& b) {
    return {{"value", b.value}, {"kind", to_string(b.kind)}, {"evaluations", b.evaluations},
            {"runs", b.runs}, {"seed", b.seed}};
}

inline void write_history_csv(std::ostream& os, const std::vector<GenerationStats>& history) {
    os << "generation,best,mean,evaluations\n";
    for (const auto& h : history)
        os << h.generation << ',' << format_double(h.best) << ',' << format_double(h.mean) << ','
           << h.evaluations << '\n';
}

inline void write_archive_csv(std::ostream& os, const std::vector<Individual>& entries) {
    os << "rank,discrepancy,kind,runs\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& f = *entries[i].fitness;
        os << i << ',' << format_double(f.value) << ',' << to_string(f.kind) << ',' << f.runs << '\n';
    }
}

inline void write_inverse_history_csv(std::ostream& os, const std::vector<InverseGenerationStats>& history) {
    os << "generation,best_n,feasible,archive_size,evaluations\n";
    for (const auto& h : history)
        os << h.generation << ',' << h.best_n << ',' << h.feasible << ',' << h.archive_size << ','
           << h.evaluations << '\n';
}

/// Pareto archive after the final check. The first three columns are the
/// values found during the search.
inline void write_pareto_csv(std::ostream& os, const std::vector<FinalCheck>& checks) {
    os << "n,discrepancy,kind,final_discrepancy,final_kind,meets_epsilon,boundary\n";
    for (const auto& c : checks)
        os << c.entry.n << ',' << format_double(c.entry.disc.value) << ',' << to_string(c.entry.disc.kind)
           << ',' << format_double(c.final_disc.value) << ',' << to_string(c.final_disc.kind) << ','
           << (c.meets_epsilon ? 1 : 0) << ',' << (c.boundary ? 1 : 0) << '\n';
}

}  // namespace stardisc::io
