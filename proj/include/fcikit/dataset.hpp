#ifndef FCIKIT_DATASET_HPP
#define FCIKIT_DATASET_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace fcikit {

/// Named numeric columns over an n x p matrix with a per-cell missing mask.
/// Storage is column-major; missing cells hold NaN and a mask bit.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<std::string> names, int rows);
    static Dataset from_columns(std::vector<std::string> names,
                                std::vector<std::vector<double>> columns);

    int rows() const { return rows_; }
    int cols() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    int index_of(const std::string& name) const;  // -1 when absent

    double at(int row, int col) const { return values_[idx(row, col)]; }
    void set(int row, int col, double v);
    bool is_missing(int row, int col) const { return mask_[idx(row, col)] != 0; }
    void set_missing(int row, int col);
    bool has_missing() const;
    bool row_has_missing(int row) const;

    const double* column(int col) const { return values_.data() + static_cast<std::size_t>(col) * rows_; }

    Dataset select_columns(const std::vector<std::string>& names) const;
    Dataset select_rows(const std::vector<int>& rows) const;
    Dataset drop_columns(const std::vector<std::string>& names) const;

    std::string to_csv() const;
    static Dataset from_csv(std::istream& in);
    static Dataset from_csv_file(const std::string& path);
    void write_csv_file(const std::string& path) const;

private:
    std::size_t idx(int row, int col) const {
        return static_cast<std::size_t>(col) * rows_ + row;
    }
    std::vector<std::string> names_;
    std::vector<double> values_;
    std::vector<unsigned char> mask_;
    int rows_ = 0;
};

// Minimal CSV cell quoting shared by all writers.
std::string csv_escape(const std::string& cell);
std::vector<std::string> csv_split_line(const std::string& line);

}  // namespace fcikit

#endif
