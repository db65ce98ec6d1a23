#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "crowdcert/certify.hpp"
#include "crowdcert/core.hpp"
#include "crowdcert/error.hpp"
#include "crowdcert/simulate.hpp"

namespace crowdcert {

// 17 significant digits: enough for double round-trips in every file format.
inline std::string format_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_human(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline Verdict parse_verdict(const std::string& s) {
    for (Verdict v : {Verdict::MV_OPTIMAL, Verdict::MV_SUBOPTIMAL, Verdict::CERTIFIED_OPTIMAL_WHP,
                      Verdict::INCONCLUSIVE})
        if (s == verdict_name(v)) return v;
    throw Error(Errc::InvalidRange, "unknown verdict '" + s + "'");
}

namespace detail {

// Split on commas, keeping empty fields. No quoting: ids must not contain
// commas, which read-side validation enforces by field count.
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

// Reads the next non-empty line, tolerating CRLF input.
inline bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

inline double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw Error(Errc::InvalidRange, where + ": bad number '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw Error(Errc::InvalidRange, where + ": bad integer '" + s + "'");
    return (int)v;
}

inline void expect_header(std::istream& in, const std::string& header, const std::string& where) {
    std::string line;
    if (!next_line(in, line) || line != header)
        throw Error(Errc::InvalidRange, where + ": expected header '" + header + "'");
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidRange, "cannot open " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidRange, "cannot write " + path);
    return out;
}

} // namespace detail

inline RawAnnotations read_annotations_csv(std::istream& in, const std::string& where) {
    detail::expect_header(in, "task_id,annotator_id,label", where);
    RawAnnotations raw;
    std::string line;
    while (detail::next_line(in, line)) {
        const auto f = detail::split_csv(line);
        if (f.size() != 3)
            throw Error(Errc::InvalidRange, where + ": expected 3 fields, got '" + line + "'");
        raw.triples.emplace_back(f[0], f[1], detail::parse_int(f[2], where));
    }
    return raw;
}

inline RawAnnotations read_annotations_csv(const std::string& path) {
    auto in = detail::open_in(path);
    return read_annotations_csv(in, path);
}

inline std::vector<std::pair<std::string, int>> read_gold_csv(std::istream& in,
                                                              const std::string& where) {
    detail::expect_header(in, "task_id,label", where);
    std::vector<std::pair<std::string, int>> gold;
    std::string line;
    while (detail::next_line(in, line)) {
        const auto f = detail::split_csv(line);
        if (f.size() != 2)
            throw Error(Errc::InvalidRange, where + ": expected 2 fields, got '" + line + "'");
        gold.emplace_back(f[0], detail::parse_int(f[1], where));
    }
    return gold;
}

inline std::vector<std::pair<std::string, int>> read_gold_csv(const std::string& path) {
    auto in = detail::open_in(path);
    return read_gold_csv(in, path);
}

// Annotations plus optional gold, validated into canonical form.
inline AnnotationSet load_dataset(const std::string& annotations_path,
                                  const std::string& gold_path = "") {
    RawAnnotations raw = read_annotations_csv(annotations_path);
    if (!gold_path.empty()) raw.gold = read_gold_csv(gold_path);
    return validate_annotation_set(raw);
}

inline void write_annotations_csv(std::ostream& out, const AnnotationSet& data) {
    out << "task_id,annotator_id,label\n";
    for (int t = 0; t < data.num_tasks(); ++t)
        for (const auto& [annotator, label] : data.labels[t])
            out << data.tasks[t] << ',' << data.annotators[annotator] << ',' << label << '\n';
}

inline void write_annotations_csv(const std::string& path, const AnnotationSet& data) {
    auto out = detail::open_out(path);
    write_annotations_csv(out, data);
}

inline void write_gold_csv(std::ostream& out, const AnnotationSet& data) {
    out << "task_id,label\n";
    if (!data.has_gold()) return;
    for (int t = 0; t < data.num_tasks(); ++t)
        if (data.gold[t] >= 0) out << data.tasks[t] << ',' << data.gold[t] << '\n';
}

inline void write_gold_csv(const std::string& path, const AnnotationSet& data) {
    auto out = detail::open_out(path);
    write_gold_csv(out, data);
}

inline void write_labels_csv(std::ostream& out, const AnnotationSet& data,
                             const AggregationResult& result) {
    out << "task_id,label\n";
    for (int t = 0; t < data.num_tasks(); ++t)
        out << data.tasks[t] << ',' << result.labels[t] << '\n';
}

inline void write_labels_csv(const std::string& path, const AnnotationSet& data,
                             const AggregationResult& result) {
    auto out = detail::open_out(path);
    write_labels_csv(out, data, result);
}

// C rows of C comma-separated reals, no header.
inline TransitionMatrix read_matrix_csv(std::istream& in, const std::string& where) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (detail::next_line(in, line)) {
        const auto f = detail::split_csv(line);
        std::vector<double> row;
        row.reserve(f.size());
        for (const auto& s : f) row.push_back(detail::parse_double(s, where));
        rows.push_back(std::move(row));
    }
    return TransitionMatrix(std::move(rows));
}

inline TransitionMatrix read_matrix_csv(const std::string& path) {
    auto in = detail::open_in(path);
    return read_matrix_csv(in, path);
}

inline void write_matrix_csv(std::ostream& out, const TransitionMatrix& t) {
    for (const auto& row : t.entries) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? "," : "") << format_full(row[j]);
        out << '\n';
    }
}

inline void write_matrix_csv(const std::string& path, const TransitionMatrix& t) {
    auto out = detail::open_out(path);
    write_matrix_csv(out, t);
}

// Comma-separated simplex, e.g. "0.5,0.5".
inline ClassPrior parse_prior(const std::string& s) {
    std::vector<double> probs;
    for (const auto& f : detail::split_csv(s)) probs.push_back(detail::parse_double(f, "prior"));
    return ClassPrior(std::move(probs));
}

namespace detail {

// Errors column value: "degenerate" marks an integer A_c cell, an error
// message (commas and newlines flattened) marks a failed cell.
inline std::string cell_error_field(const SweepCell& cell) {
    std::string s;
    if (cell.degenerate) s = "degenerate";
    if (!cell.error.empty()) {
        if (!s.empty()) s += "; ";
        std::string msg = cell.error;
        for (char& ch : msg)
            if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
        s += msg;
    }
    return s;
}

} // namespace detail

inline void write_sweep_csv(std::ostream& out, const SweepGrid& grid) {
    const bool mc = grid.spec.mode == SweepMode::MONTE_CARLO;
    const bool est = grid.spec.estimated;
    out << "nu0,t00,t11,h,gap,verdict";
    if (mc) out << ",empirical_mv,empirical_map";
    if (est) out << ",estimated_verdict";
    out << ",errors\n";
    for (const SweepCell& cell : grid.cells) {
        out << format_full(cell.nu0) << ',' << format_full(cell.t00) << ','
            << format_full(cell.t11) << ',' << cell.h << ',' << format_full(cell.gap) << ','
            << verdict_name(cell.verdict);
        if (mc) {
            out << ',' << (cell.empirical_mv ? format_full(*cell.empirical_mv) : "");
            out << ',' << (cell.empirical_map ? format_full(*cell.empirical_map) : "");
        }
        if (est)
            out << ',' << (cell.estimated_verdict ? verdict_name(*cell.estimated_verdict) : "");
        out << ',' << detail::cell_error_field(cell) << '\n';
    }
}

inline void write_sweep_csv(const std::string& path, const SweepGrid& grid) {
    auto out = detail::open_out(path);
    write_sweep_csv(out, grid);
}

// Rebuilds cells and the value lists; generator settings (seed, n_samples)
// are not stored in the CSV and stay at their defaults.
inline SweepGrid read_sweep_csv(std::istream& in, const std::string& where) {
    std::string line;
    if (!detail::next_line(in, line))
        throw Error(Errc::InvalidRange, where + ": empty sweep file");
    const auto header = detail::split_csv(line);
    const std::size_t n_cols = header.size();
    bool mc = false, est = false;
    if (header.size() >= 6 && header[0] == "nu0" && header[1] == "t00" && header[2] == "t11" &&
        header[3] == "h" && header[4] == "gap" && header[5] == "verdict" &&
        header.back() == "errors") {
        mc = n_cols >= 8 && header[6] == "empirical_mv";
        est = header[n_cols - 2] == "estimated_verdict";
    } else {
        throw Error(Errc::InvalidRange, where + ": unrecognized sweep header");
    }

    SweepGrid grid;
    grid.spec.mode = mc ? SweepMode::MONTE_CARLO : SweepMode::ANALYTIC;
    grid.spec.estimated = est;
    std::set<double> nu0s, t00s, t11s;
    std::set<int> hs;
    while (detail::next_line(in, line)) {
        const auto f = detail::split_csv(line);
        if (f.size() != n_cols)
            throw Error(Errc::InvalidRange, where + ": wrong field count in '" + line + "'");
        SweepCell cell;
        cell.nu0 = detail::parse_double(f[0], where);
        cell.t00 = detail::parse_double(f[1], where);
        cell.t11 = detail::parse_double(f[2], where);
        cell.h = detail::parse_int(f[3], where);
        cell.gap = detail::parse_double(f[4], where);
        cell.verdict = parse_verdict(f[5]);
        std::size_t col = 6;
        if (mc) {
            if (!f[col].empty()) cell.empirical_mv = detail::parse_double(f[col], where);
            ++col;
            if (!f[col].empty()) cell.empirical_map = detail::parse_double(f[col], where);
            ++col;
        }
        if (est) {
            if (!f[col].empty()) cell.estimated_verdict = parse_verdict(f[col]);
            ++col;
        }
        std::string err = f[col];
        if (err == "degenerate") {
            cell.degenerate = true;
        } else if (err.rfind("degenerate; ", 0) == 0) {
            cell.degenerate = true;
            cell.error = err.substr(12);
        } else {
            cell.error = err;
        }
        nu0s.insert(cell.nu0);
        t00s.insert(cell.t00);
        t11s.insert(cell.t11);
        hs.insert(cell.h);
        grid.cells.push_back(std::move(cell));
    }
    grid.spec.nu0_values.assign(nu0s.begin(), nu0s.end());
    grid.spec.t00_values.assign(t00s.begin(), t00s.end());
    grid.spec.t11_values.assign(t11s.begin(), t11s.end());
    grid.spec.h_values.assign(hs.begin(), hs.end());
    return grid;
}

inline SweepGrid read_sweep_csv(const std::string& path) {
    auto in = detail::open_in(path);
    return read_sweep_csv(in, path);
}

} // namespace crowdcert
