#pragma once

// CSV and JSON serialization for grid functions, space-time samples and
// solver reports. Numbers are written with 17 significant digits so a
// round trip is exact.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fracrep/errors.hpp"
#include "fracrep/grid.hpp"
#include "fracrep/neumann.hpp"
#include "fracrep/pde.hpp"
#include "fracrep/series.hpp"

namespace fracrep::io {

using nlohmann::json;

[[nodiscard]] inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Writes content to path through a temporary sibling and a rename.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Two-column CSV "t,<name>".
[[nodiscard]] inline std::string grid_function_csv(const GridFunction& f, std::string_view name = "y") {
    std::string out = "t,";
    out += name;
    out += '\n';
    for (std::size_t j = 0; j < f.size(); ++j) {
        out += format_double(f.grid().node(j));
        out += ',';
        out += format_double(f[j]);
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) {
            throw std::invalid_argument(cell);
        }
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument,
                    "line " + std::to_string(line) + ": not a number: '" + cell + "'");
    }
}

// Numeric rows below a header line.
inline std::vector<std::vector<double>> parse_numeric_csv(const std::string& text,
                                                          std::vector<std::string>* header) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        auto cells = split_csv_line(line);
        if (!seen_header) {
            seen_header = true;
            if (header) {
                *header = cells;
            }
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            row.push_back(parse_cell(c, line_no));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

/// Reads a "t,value" CSV onto g; the t column must match the grid nodes.
[[nodiscard]] inline GridFunction read_grid_function_csv(const std::string& text, const Grid& g) {
    const auto rows = detail::parse_numeric_csv(text, nullptr);
    if (rows.size() != g.size()) {
        throw Error(ErrorCode::InvalidArgument, "sample file has " + std::to_string(rows.size()) +
                                                    " rows, grid has " + std::to_string(g.size()));
    }
    GridFunction f(g);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != 2) {
            throw Error(ErrorCode::InvalidArgument,
                        "sample row " + std::to_string(j + 2) + " needs exactly two columns");
        }
        if (std::abs(rows[j][0] - g.node(j)) > 1e-9 * std::max(1.0, g.horizon())) {
            throw Error(ErrorCode::InvalidArgument,
                        "sample row " + std::to_string(j + 2) + " is not at grid node t = " +
                            format_double(g.node(j)));
        }
        f[j] = rows[j][1];
    }
    return f;
}

/// Space-time CSV: header "t,<x_0>,...,<x_{M-1}>", one row per time node.
[[nodiscard]] inline std::string space_time_csv(const SpaceTimeSamples& h) {
    const auto& sg = h.space_grid();
    const auto& tg = h.time_grid();
    std::string out = "t";
    for (std::size_t xi = 0; xi < sg.size(); ++xi) {
        out += ',';
        out += format_double(sg.node(xi));
    }
    out += '\n';
    for (std::size_t ti = 0; ti < tg.size(); ++ti) {
        out += format_double(tg.node(ti));
        for (std::size_t xi = 0; xi < sg.size(); ++xi) {
            out += ',';
            out += format_double(h.at(ti, xi));
        }
        out += '\n';
    }
    return out;
}

[[nodiscard]] inline SpaceTimeSamples read_space_time_csv(const std::string& text, const Grid& tg,
                                                          const SpatialGrid1D& sg) {
    std::vector<std::string> header;
    const auto rows = detail::parse_numeric_csv(text, &header);
    if (header.size() != sg.size() + 1) {
        throw Error(ErrorCode::InvalidArgument, "space-time header needs " +
                                                    std::to_string(sg.size() + 1) + " columns");
    }
    if (rows.size() != tg.size()) {
        throw Error(ErrorCode::InvalidArgument, "space-time file has " + std::to_string(rows.size()) +
                                                    " rows, time grid has " +
                                                    std::to_string(tg.size()));
    }
    SpaceTimeSamples r(tg, sg);
    for (std::size_t ti = 0; ti < rows.size(); ++ti) {
        if (rows[ti].size() != sg.size() + 1) {
            throw Error(ErrorCode::InvalidArgument,
                        "space-time row " + std::to_string(ti + 2) + " has the wrong width");
        }
        for (std::size_t xi = 0; xi < sg.size(); ++xi) {
            r.at(ti, xi) = rows[ti][xi + 1];
        }
    }
    return r;
}

inline json timings_json(const StageTimings& t) {
    return {{"integrals", t.integrals}, {"brackets", t.brackets}, {"assembly", t.assembly},
            {"total", t.total}};
}

/// Report JSON. Wall-clock timings only appear when asked for, so the default
/// output is a pure function of the inputs.
[[nodiscard]] inline json report_json(const SolveReport& r, bool include_timings = false) {
    json j;
    j["path"] = r.path == SolvePath::Series ? "series" : "mittag-leffler";
    j["converged"] = r.converged;
    j["flags"] = {{"k_cap_hit", r.k_cap_hit}, {"n_cap_hit", r.n_cap_hit}};
    j["k_used"] = r.k_used;
    j["n_used"] = r.n_used;
    json terms = json::array();
    for (const auto& t : r.term_norms) {
        terms.push_back({{"k", t.k}, {"n", t.n}, {"norm", t.norm}});
    }
    j["term_norms"] = terms;
    j["layer_norms"] = r.layer_norms;
    json partial = json::array();
    for (const auto& p : r.partial_sums) {
        partial.push_back(p[p.size() - 1]);
    }
    j["partial_sums_at_T"] = partial;
    j["grid"] = {{"horizon", r.solution.grid().horizon()}, {"points", r.solution.size()}};
    j["solution"] = std::vector<double>(r.solution.values().begin(), r.solution.values().end());
    if (include_timings) {
        j["timings"] = timings_json(r.timings);
    }
    return j;
}

[[nodiscard]] inline json neumann_json(const NeumannResult& r) {
    return {{"k_used", r.k_used},
            {"converged", r.converged},
            {"stalled", r.stalled},
            {"term_norms", r.term_norms}};
}

[[nodiscard]] inline json pde_json(const PdeResult& r) {
    json modes = json::array();
    for (const auto& m : r.modes) {
        modes.push_back({{"mode", m.mode},
                         {"frequency", m.frequency},
                         {"solved", m.solved},
                         {"converged", m.converged},
                         {"k_used", m.k_used}});
    }
    return {{"imag_residue", r.imag_residue}, {"diverged_modes", r.diverged_modes}, {"modes", modes}};
}

/// JSON text with a trailing newline; nlohmann prints doubles round-trip exactly.
[[nodiscard]] inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace fracrep::io
