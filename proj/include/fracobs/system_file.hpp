#pragma once

// Line-oriented system description, version 1.
//
//   # comment lines and trailing comments start with '#'
//   fracplace-system 1
//   n 3
//   alpha 0.5            one value (broadcast) or n values; optional for pattern files
//   K 3                  optional horizon
//   pattern              exactly one of: dense | sparse | pattern
//   2 1                  pattern: "i j"; sparse: "i j value"; dense: n rows of n values
//   3 2
//
// Indices are 1-based in the file and 0-based in memory. The matrix block
// runs to the end of the file.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fracobs/errors.hpp"
#include "fracobs/frac_core.hpp"
#include "fracobs/pattern.hpp"
#include "fracobs/struct_graph.hpp"

namespace fracobs {

inline constexpr const char* kSystemFileMagic = "fracplace-system";
inline constexpr int kSystemFileVersion = 1;

enum class MatrixKind { Dense, Sparse, Pattern };

struct SystemFile {
    std::size_t n = 0;
    std::vector<double> alpha; // empty when the file gives none
    std::optional<std::size_t> horizon;
    MatrixKind kind = MatrixKind::Pattern;
    Matrix values;   // numeric kinds only
    Pattern pattern; // always filled

    bool numeric() const noexcept { return kind != MatrixKind::Pattern; }

    /// Pattern of the coupling matrix; numeric files are thresholded at zero_tol.
    Pattern structure(double zero_tol = kDefaultZeroTol) const {
        return numeric() ? pattern_of(values, zero_tol) : pattern;
    }

    FracSystem to_system(std::size_t k) const {
        if (!numeric()) throw ParseError("numeric values required: the file only gives a pattern");
        if (alpha.empty()) throw ParseError("numeric mode needs alpha in the system file");
        return FracSystem(values, alpha, k);
    }
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    std::string s = hash == std::string::npos ? line : line.substr(0, hash);
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

inline double parse_double(const std::string& t, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": '" + t + "' is not a number");
    }
}

inline std::size_t parse_index(const std::string& t, std::size_t line) {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("line " + std::to_string(line) + ": '" + t + "' is not a non-negative integer");
    try {
        return static_cast<std::size_t>(std::stoull(t));
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": '" + t + "' is out of range");
    }
}

} // namespace detail

inline SystemFile parse_system_file(std::istream& in) {
    using detail::parse_double;
    using detail::parse_index;
    SystemFile f;
    bool header = false, have_n = false;
    std::optional<MatrixKind> kind;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> body;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = detail::strip_comment(raw);
        if (line.empty()) continue;
        auto tok = detail::split_ws(line);
        if (!header) {
            if (tok.size() != 2 || tok[0] != kSystemFileMagic)
                throw ParseError("line " + std::to_string(lineno) + ": expected '" + kSystemFileMagic + " " +
                                 std::to_string(kSystemFileVersion) + "' header");
            if (parse_index(tok[1], lineno) != kSystemFileVersion)
                throw ParseError("unsupported system file version " + tok[1]);
            header = true;
            continue;
        }
        if (kind) {
            body.emplace_back(lineno, std::move(tok));
            continue;
        }
        const std::string& key = tok[0];
        if (key == "n") {
            if (tok.size() != 2) throw ParseError("line " + std::to_string(lineno) + ": 'n' takes one value");
            f.n = parse_index(tok[1], lineno);
            if (f.n == 0) throw ParseError("line " + std::to_string(lineno) + ": n must be positive");
            have_n = true;
        } else if (key == "alpha") {
            if (tok.size() < 2) throw ParseError("line " + std::to_string(lineno) + ": 'alpha' needs values");
            f.alpha.clear();
            for (std::size_t i = 1; i < tok.size(); ++i) f.alpha.push_back(parse_double(tok[i], lineno));
        } else if (key == "K") {
            if (tok.size() != 2) throw ParseError("line " + std::to_string(lineno) + ": 'K' takes one value");
            f.horizon = parse_index(tok[1], lineno);
        } else if (key == "dense" || key == "sparse" || key == "pattern") {
            if (tok.size() != 1) throw ParseError("line " + std::to_string(lineno) + ": '" + key + "' takes no values");
            kind = key == "dense" ? MatrixKind::Dense : key == "sparse" ? MatrixKind::Sparse : MatrixKind::Pattern;
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!header) throw ParseError("empty system file");
    if (!have_n) throw ParseError("system file does not give n");
    if (!kind) throw ParseError("system file has no dense/sparse/pattern block");
    f.kind = *kind;

    const std::size_t n = f.n;
    if (f.alpha.size() == 1) f.alpha.assign(n, f.alpha.front());
    if (!f.alpha.empty() && f.alpha.size() != n)
        throw ParseError("alpha has " + std::to_string(f.alpha.size()) + " values, expected 1 or " + std::to_string(n));
    for (double a : f.alpha)
        if (!std::isfinite(a) || a <= 0.0) throw ParseError("alpha values must be finite and positive");

    auto check_index = [&](std::size_t v, std::size_t line) {
        if (v < 1 || v > n)
            throw ParseError("line " + std::to_string(line) + ": index " + std::to_string(v) + " outside 1.." +
                             std::to_string(n));
        return v - 1;
    };

    f.pattern = Pattern(n, n);
    if (f.kind == MatrixKind::Dense) {
        if (body.size() != n)
            throw ParseError("dense block has " + std::to_string(body.size()) + " rows, expected " + std::to_string(n));
        f.values = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) {
            const auto& [line, tok] = body[r];
            if (tok.size() != n)
                throw ParseError("line " + std::to_string(line) + ": dense row has " + std::to_string(tok.size()) +
                                 " values, expected " + std::to_string(n));
            for (std::size_t c = 0; c < n; ++c)
                f.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(tok[c], line);
        }
    } else {
        const std::size_t width = f.kind == MatrixKind::Sparse ? 3 : 2;
        if (f.kind == MatrixKind::Sparse)
            f.values = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::set<Entry> seen;
        for (const auto& [line, tok] : body) {
            if (tok.size() != width)
                throw ParseError("line " + std::to_string(line) + ": expected " + std::to_string(width) + " fields");
            const std::size_t r = check_index(parse_index(tok[0], line), line);
            const std::size_t c = check_index(parse_index(tok[1], line), line);
            if (!seen.insert({r, c}).second)
                throw ParseError("line " + std::to_string(line) + ": duplicate entry (" + tok[0] + ", " + tok[1] + ")");
            if (f.kind == MatrixKind::Sparse)
                f.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(tok[2], line);
            else
                f.pattern.set(r, c);
        }
    }
    if (f.numeric()) {
        if (!f.values.allFinite()) throw ParseError("matrix values must be finite");
        f.pattern = pattern_of(f.values, 0.0);
    }
    return f;
}

inline SystemFile parse_system_file(const std::string& text) {
    std::istringstream is(text);
    return parse_system_file(is);
}

inline SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open system file '" + path + "'");
    return parse_system_file(in);
}

} // namespace fracobs
