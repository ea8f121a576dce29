#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "assom/errors.hpp"
#include "assom/linalg.hpp"
#include "assom/rng.hpp"

namespace assom {

enum class ClassLabel : std::uint8_t { majority = 0, minority = 1 };

// Synthetic rows get ids with this bit set, so they can never collide with
// the ids of loaded rows.
inline constexpr std::size_t kSyntheticIdBase = std::size_t{1} << 63;

// Parsed CSV/KEEL table with labels still in their source string form.
struct RawTable {
    std::string name;
    std::vector<std::string> feature_names;
    std::vector<Vector> features;
    std::vector<std::string> labels;

    std::size_t rows() const { return features.size(); }
    std::size_t cols() const { return feature_names.size(); }
};

// Binary dataset. row_ids preserve identity across splits and augmentation;
// synthetic rows receive ids past the original range.
struct Dataset {
    std::string name;
    std::vector<std::string> feature_names;
    std::vector<Vector> features;
    std::vector<ClassLabel> labels;
    std::vector<std::string> raw_labels;
    std::vector<std::size_t> row_ids;
    std::string minority_name; // label string written for synthetic rows

    std::size_t rows() const { return features.size(); }
    std::size_t dim() const { return feature_names.size(); }

    std::size_t count(ClassLabel which) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), which));
    }

    std::vector<std::size_t> indices_of(ClassLabel which) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == which) out.push_back(i);
        return out;
    }
};

struct NormalizationParams {
    std::vector<double> means;
    std::vector<double> stds; // clamped from below at 1e-12

    std::size_t dim() const { return means.size(); }
};

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

struct CsvOptions {
    char delimiter = ',';
    bool has_header = true;
    // Column holding the label; name requires has_header.
    std::variant<std::size_t, std::string> label_column = std::string("class");
};

namespace detail {

// Splits one file into RFC-4180 records: quoted fields may contain the
// delimiter, doubled quotes, and embedded line breaks.
inline std::vector<std::vector<std::string>> split_records(const std::string& text, char delim,
                                                           const std::string& where) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_started = false;

    auto end_field = [&] {
        fields.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
        record_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
            record_started = true;
        } else if (c == delim) {
            end_field();
            record_started = true;
        } else if (c == '\r') {
            // swallow; \r\n handled by the \n branch
        } else if (c == '\n') {
            if (record_started || field_started || !fields.empty())
                end_record();
        } else {
            field += c;
            field_started = true;
            record_started = true;
        }
    }
    if (in_quotes) throw ParseError(where + ": unterminated quoted field");
    if (record_started || !fields.empty()) end_record();
    return records;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    if (begin == end) return false;
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace detail

// Loads a CSV or KEEL-style file ("@"-prefixed metadata lines are skipped).
// Feature cells must be numeric; the label column keeps its strings.
inline RawTable load_csv(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    // Drop KEEL metadata lines before CSV parsing (those never carry quoted
    // line breaks, so a line-level pass is safe).
    std::string filtered;
    filtered.reserve(text.size());
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string line =
            text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] != '@') {
            filtered += line;
            if (eol != std::string::npos) filtered += '\n';
        }
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }

    auto records = detail::split_records(filtered, options.delimiter, path);
    if (records.empty()) throw ParseError(path + ": no data rows");

    const std::size_t width = records.front().size();
    for (std::size_t r = 0; r < records.size(); ++r)
        if (records[r].size() != width)
            throw RaggedRows(path + ": row " + std::to_string(r + 1) + " has " +
                             std::to_string(records[r].size()) + " cells, expected " +
                             std::to_string(width));
    if (width < 2) throw ParseError(path + ": need at least one feature column and a label column");

    RawTable table;
    table.name = path;

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (options.has_header) {
        header = records.front();
        for (auto& h : header) h = detail::trim(h);
        first_data = 1;
        if (records.size() < 2) throw ParseError(path + ": header but no data rows");
    } else {
        for (std::size_t c = 0; c < width; ++c) header.push_back("f" + std::to_string(c));
    }

    std::size_t label_col;
    if (std::holds_alternative<std::size_t>(options.label_column)) {
        label_col = std::get<std::size_t>(options.label_column);
        if (label_col >= width)
            throw ConfigError(path + ": label column index " + std::to_string(label_col) +
                              " out of range (width " + std::to_string(width) + ")");
    } else {
        const std::string& want = std::get<std::string>(options.label_column);
        if (!options.has_header)
            throw ConfigError(path + ": label column named '" + want + "' requires a header");
        const auto it = std::find(header.begin(), header.end(), want);
        if (it == header.end())
            throw ConfigError(path + ": no column named '" + want + "' in header");
        label_col = static_cast<std::size_t>(it - header.begin());
    }

    for (std::size_t c = 0; c < width; ++c)
        if (c != label_col) table.feature_names.push_back(header[c]);

    for (std::size_t r = first_data; r < records.size(); ++r) {
        Vector row;
        row.reserve(width - 1);
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_col) {
                table.labels.push_back(detail::trim(records[r][c]));
                continue;
            }
            double value;
            if (!detail::parse_double(records[r][c], value))
                throw ParseError(path + ": row " + std::to_string(r + 1) + ", column " +
                                 std::to_string(c + 1) + ": not a number: '" + records[r][c] + "'");
            if (!std::isfinite(value))
                throw ParseError(path + ": row " + std::to_string(r + 1) + ", column " +
                                 std::to_string(c + 1) + ": non-finite value");
            row.push_back(value);
        }
        table.features.push_back(std::move(row));
    }
    return table;
}

// Rows whose label is in positive_labels become the minority class; everyone
// else is majority. The chosen class must be strictly smaller.
inline Dataset binarize(const RawTable& table, const std::set<std::string>& positive_labels) {
    if (positive_labels.empty()) throw ConfigError("binarize: positive label set is empty");
    for (const auto& label : positive_labels)
        if (std::find(table.labels.begin(), table.labels.end(), label) == table.labels.end())
            throw UnknownLabel("binarize: label '" + label + "' does not occur in " + table.name);

    Dataset ds;
    ds.name = table.name;
    ds.feature_names = table.feature_names;
    ds.features = table.features;
    ds.raw_labels = table.labels;
    ds.minority_name = *positive_labels.begin();
    ds.labels.reserve(table.rows());
    ds.row_ids.resize(table.rows());
    std::iota(ds.row_ids.begin(), ds.row_ids.end(), std::size_t{0});

    std::size_t minority_count = 0;
    for (const auto& label : table.labels) {
        const bool positive = positive_labels.count(label) > 0;
        ds.labels.push_back(positive ? ClassLabel::minority : ClassLabel::majority);
        if (positive) ++minority_count;
    }
    if (2 * minority_count >= table.rows())
        throw NotMinority("binarize: positive class has " + std::to_string(minority_count) + " of " +
                          std::to_string(table.rows()) + " rows; it must be strictly smaller than the rest");
    return ds;
}

namespace detail {

inline Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.name = ds.name;
    out.feature_names = ds.feature_names;
    out.minority_name = ds.minority_name;
    for (std::size_t i : idx) {
        out.features.push_back(ds.features[i]);
        out.labels.push_back(ds.labels[i]);
        out.raw_labels.push_back(ds.raw_labels[i]);
        out.row_ids.push_back(ds.row_ids[i]);
    }
    return out;
}

} // namespace detail

// Ratio-preserving split: each class is shuffled with its own derived seed
// and cut at round(train_fraction * class size). Row order within each part
// follows the original dataset order.
inline std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
        throw ConfigError("stratified_split: train_fraction must be in (0,1)");

    std::vector<std::size_t> train_idx, test_idx;
    for (int cls = 0; cls < 2; ++cls) {
        const auto which = static_cast<ClassLabel>(cls);
        auto idx = ds.indices_of(which);
        if (idx.size() < 2)
            throw TooSmall("stratified_split: class " + std::to_string(cls) + " has " +
                           std::to_string(idx.size()) + " rows; need at least 2");
        Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(cls)}));
        rng.shuffle(idx);
        const auto take = static_cast<std::size_t>(
            std::round(spec.train_fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < take ? train_idx : test_idx).push_back(idx[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {detail::take_rows(ds, train_idx), detail::take_rows(ds, test_idx)};
}

// Population (1/R) standard deviation; constant features clamp to 1e-12 so
// they transform to zero and invert to the constant.
inline NormalizationParams zscore_fit(const Dataset& train) {
    if (train.rows() == 0) throw TooSmall("zscore_fit: empty dataset");
    NormalizationParams p;
    const std::size_t dim = train.dim();
    p.means.assign(dim, 0.0);
    p.stds.assign(dim, 0.0);
    const double inv_r = 1.0 / static_cast<double>(train.rows());
    for (const auto& row : train.features)
        for (std::size_t c = 0; c < dim; ++c) p.means[c] += row[c];
    for (auto& m : p.means) m *= inv_r;
    for (const auto& row : train.features)
        for (std::size_t c = 0; c < dim; ++c) {
            const double d = row[c] - p.means[c];
            p.stds[c] += d * d;
        }
    for (auto& s : p.stds) s = std::max(std::sqrt(s * inv_r), 1e-12);
    return p;
}

inline std::vector<Vector> zscore_apply(const NormalizationParams& p, const std::vector<Vector>& rows) {
    std::vector<Vector> out = rows;
    for (auto& row : out) {
        require_dim(row, p.dim(), "zscore_apply row");
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - p.means[c]) / p.stds[c];
    }
    return out;
}

inline std::vector<Vector> zscore_invert(const NormalizationParams& p, const std::vector<Vector>& rows) {
    std::vector<Vector> out = rows;
    for (auto& row : out) {
        require_dim(row, p.dim(), "zscore_invert row");
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * p.stds[c] + p.means[c];
    }
    return out;
}

namespace detail {

inline std::string csv_escape(const std::string& s, char delim) {
    const bool needs_quotes = s.find_first_of(std::string("\"\n\r") + delim) != std::string::npos;
    if (!needs_quotes) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace detail

// Writes the dataset in the input dialect: features then the label column
// (named "class" unless the source provided a header name).
inline void write_csv(const Dataset& ds, const std::string& path, char delimiter = ',',
                      const std::string& label_column_name = "class") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& name : ds.feature_names) out << detail::csv_escape(name, delimiter) << delimiter;
    out << detail::csv_escape(label_column_name, delimiter) << "\n";
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (double v : ds.features[r]) out << detail::format_double(v) << delimiter;
        out << detail::csv_escape(ds.raw_labels[r], delimiter) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace assom
