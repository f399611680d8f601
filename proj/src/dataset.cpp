#include "fcikit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "fcikit/error.hpp"

namespace fcikit {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

Dataset::Dataset(std::vector<std::string> names, int rows)
    : names_(std::move(names)),
      values_(static_cast<std::size_t>(rows) * names_.size(), 0.0),
      mask_(static_cast<std::size_t>(rows) * names_.size(), 0),
      rows_(rows) {
    for (std::size_t i = 0; i < names_.size(); ++i)
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            if (names_[i] == names_[j]) throw DuplicateNameError(names_[i]);
}

Dataset Dataset::from_columns(std::vector<std::string> names,
                              std::vector<std::vector<double>> columns) {
    if (names.size() != columns.size())
        throw Error("from_columns: name/column count mismatch");
    const int n = columns.empty() ? 0 : static_cast<int>(columns.front().size());
    for (const auto& c : columns)
        if (static_cast<int>(c.size()) != n) throw Error("from_columns: ragged columns");
    Dataset d(std::move(names), n);
    for (int c = 0; c < d.cols(); ++c)
        for (int r = 0; r < n; ++r) d.set(r, c, columns[c][r]);
    return d;
}

int Dataset::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

void Dataset::set(int row, int col, double v) {
    values_[idx(row, col)] = v;
    mask_[idx(row, col)] = 0;
}

void Dataset::set_missing(int row, int col) {
    values_[idx(row, col)] = kNan;
    mask_[idx(row, col)] = 1;
}

bool Dataset::has_missing() const {
    return std::any_of(mask_.begin(), mask_.end(), [](unsigned char m) { return m != 0; });
}

bool Dataset::row_has_missing(int row) const {
    for (int c = 0; c < cols(); ++c)
        if (is_missing(row, c)) return true;
    return false;
}

Dataset Dataset::select_columns(const std::vector<std::string>& names) const {
    Dataset out(names, rows_);
    for (int c = 0; c < out.cols(); ++c) {
        const int src = index_of(names[c]);
        if (src < 0) throw Error("select_columns: no such column: " + names[c]);
        for (int r = 0; r < rows_; ++r) {
            if (is_missing(r, src))
                out.set_missing(r, c);
            else
                out.set(r, c, at(r, src));
        }
    }
    return out;
}

Dataset Dataset::select_rows(const std::vector<int>& rows) const {
    Dataset out(names_, static_cast<int>(rows.size()));
    for (int c = 0; c < cols(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const int src = rows[r];
            if (is_missing(src, c))
                out.set_missing(static_cast<int>(r), c);
            else
                out.set(static_cast<int>(r), c, at(src, c));
        }
    }
    return out;
}

Dataset Dataset::drop_columns(const std::vector<std::string>& names) const {
    std::vector<std::string> keep;
    for (const auto& n : names_)
        if (std::find(names.begin(), names.end(), n) == names.end()) keep.push_back(n);
    return select_columns(keep);
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string Dataset::to_csv() const {
    std::string out;
    for (int c = 0; c < cols(); ++c) {
        if (c) out += ',';
        out += csv_escape(names_[c]);
    }
    out += '\n';
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols(); ++c) {
            if (c) out += ',';
            if (!is_missing(r, c)) out += format_value(at(r, c));
        }
        out += '\n';
    }
    return out;
}

Dataset Dataset::from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("from_csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> names = csv_split_line(line);

    std::vector<std::vector<double>> columns(names.size());
    std::vector<std::vector<int>> missing(names.size());
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = csv_split_line(line);
        if (cells.size() != names.size())
            throw Error("from_csv: row " + std::to_string(row + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(names.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& cell = cells[c];
            if (cell.empty() || cell == "NA" || cell == "NaN") {
                columns[c].push_back(kNan);
                missing[c].push_back(row);
                continue;
            }
            double v = 0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw Error("from_csv: non-numeric cell '" + cell + "' in column " + names[c]);
            columns[c].push_back(v);
        }
        ++row;
    }
    Dataset d = from_columns(std::move(names), std::move(columns));
    for (std::size_t c = 0; c < missing.size(); ++c)
        for (int r : missing[c]) d.set_missing(r, static_cast<int>(c));
    return d;
}

Dataset Dataset::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return from_csv(in);
}

void Dataset::write_csv_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << to_csv();
}

}  // namespace fcikit
