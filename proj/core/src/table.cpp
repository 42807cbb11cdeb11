#include "ethlab/table.hpp"

#include "ethlab/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

namespace ethlab {

std::string_view to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OutputFormat output_format_from_string(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw InvalidArgument("unknown output format '" + std::string(name) + "'");
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_integer(std::int64_t value) { return std::to_string(value); }
std::string format_unsigned(std::uint64_t value) { return std::to_string(value); }
std::string format_bool(bool value) { return value ? "true" : "false"; }

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (columns_[i].name == columns_[j].name) throw InvalidArgument("duplicate column " + columns_[i].name);
        }
    }
}

Table::RowBuilder::RowBuilder(const Table& table) : table_(&table), cells_(table.columns().size()) {}

Table::RowBuilder& Table::RowBuilder::put(std::string_view column, std::string text) {
    cells_[table_->column_index(column)] = std::move(text);
    return *this;
}

Table::RowBuilder& Table::RowBuilder::set(std::string_view column, double value) {
    return put(column, format_real(value));
}
Table::RowBuilder& Table::RowBuilder::set(std::string_view column, long value) {
    return put(column, format_integer(value));
}
Table::RowBuilder& Table::RowBuilder::set(std::string_view column, std::uint64_t value) {
    return put(column, format_unsigned(value));
}
Table::RowBuilder& Table::RowBuilder::set(std::string_view column, bool value) {
    return put(column, format_bool(value));
}
Table::RowBuilder& Table::RowBuilder::set(std::string_view column, std::string value) {
    return put(column, std::move(value));
}

void Table::push(RowBuilder row) {
    if (row.table_ != this && row.table_->columns() != columns_) {
        throw InvalidArgument("Table::push: row built for a different schema");
    }
    rows_.push_back(std::move(row.cells_));
}

void Table::push_cells(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw InvalidArgument("Table::push_cells: wrong cell count");
    rows_.push_back(std::move(cells));
}

void Table::append(const Table& other) {
    if (other.columns_ != columns_) throw InvalidArgument("Table::append: column mismatch");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

bool Table::has_column(std::string_view name) const noexcept {
    return std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.name == name; });
}

std::size_t Table::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    throw InvalidArgument("no column named '" + std::string(name) + "'");
}

const std::string& Table::cell(std::size_t row, std::string_view column) const {
    return rows_.at(row)[column_index(column)];
}

double Table::real(std::size_t row, std::string_view column) const {
    const std::string& text = cell(row, column);
    if (text.empty() || text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("cell '" + text + "' in column " + std::string(column) + " is not a number");
    }
    return value;
}

std::int64_t Table::integer(std::size_t row, std::string_view column) const {
    const std::string& text = cell(row, column);
    std::int64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("cell '" + text + "' in column " + std::string(column) + " is not an integer");
    }
    return value;
}

bool Table::boolean(std::size_t row, std::string_view column) const { return cell(row, column) == "true"; }

void Table::sort_rows() {
    const auto find = [&](std::string_view name) -> long {
        return has_column(name) ? static_cast<long>(column_index(name)) : -1;
    };
    const long n_col = find("N");
    const long trial_col = find("trial");
    const long kind_col = find("kind");
    const auto as_int = [](const std::string& s) {
        long v = 0;
        std::from_chars(s.data(), s.data() + s.size(), v);
        return v;
    };
    std::stable_sort(rows_.begin(), rows_.end(), [&](const auto& a, const auto& b) {
        if (n_col >= 0) {
            const long x = as_int(a[n_col]), y = as_int(b[n_col]);
            if (x != y) return x < y;
        }
        if (trial_col >= 0) {
            const long x = as_int(a[trial_col]), y = as_int(b[trial_col]);
            if (x != y) return x < y;
        }
        if (kind_col >= 0) return a[kind_col] < b[kind_col];
        return false;
    });
}

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Reads one record; returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (int ch = in.get(); ch != std::char_traits<char>::eof(); ch = in.get()) {
        any = true;
        const char c = static_cast<char>(ch);
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw InvalidArgument("CSV: unterminated quoted field");
    if (any) fields.push_back(std::move(field));
    return any;
}

} // namespace

void write_csv(const Table& table, std::ostream& out) {
    const auto& cols = table.columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_field(cols[i].name);
    out << '\n';
    for (std::size_t r = 0; r < table.size(); ++r) {
        const auto& cells = table.cells(r);
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
        out << '\n';
    }
}

void write_json(const Table& table, std::ostream& out) {
    const auto& cols = table.columns();
    out << '[';
    for (std::size_t r = 0; r < table.size(); ++r) {
        out << (r ? ",\n " : "\n ") << '{';
        const auto& cells = table.cells(r);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out << (i ? ", " : "") << nlohmann::json(cols[i].name).dump() << ": ";
            const std::string& text = cells[i];
            if (text.empty()) {
                out << "null";
            } else if (cols[i].type == ColumnType::text ||
                       (cols[i].type == ColumnType::real && (text == "nan" || text == "inf" || text == "-inf"))) {
                out << nlohmann::json(text).dump();
            } else {
                out << text;
            }
        }
        out << '}';
    }
    out << (table.empty() ? "]\n" : "\n]\n");
}

void write(const Table& table, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::csv) {
        write_csv(table, out);
    } else {
        write_json(table, out);
    }
}

void emit(const Table& table, OutputFormat format, const std::filesystem::path& path) {
    if (path == "-") {
        write(table, format, std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write(table, format, out);
    out.flush();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

Table parse_csv(std::istream& in, const std::vector<Column>& schema) {
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields)) throw InvalidArgument("CSV: missing header row");
    if (fields.size() != schema.size()) throw InvalidArgument("CSV: header does not match schema");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != schema[i].name) throw InvalidArgument("CSV: unexpected column " + fields[i]);
    }
    Table table(schema);
    while (read_csv_record(in, fields)) {
        if (fields.size() != schema.size()) throw InvalidArgument("CSV: ragged row");
        table.push_cells(fields);
    }
    return table;
}

Table parse_json(std::istream& in, const std::vector<Column>& schema) {
    const nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_array()) throw InvalidArgument("JSON table must be an array");
    Table table(schema);
    for (const auto& record : doc) {
        if (!record.is_object() || record.size() != schema.size()) {
            throw InvalidArgument("JSON row does not match schema");
        }
        std::vector<std::string> cells;
        cells.reserve(schema.size());
        for (const Column& col : schema) {
            const auto it = record.find(col.name);
            if (it == record.end()) throw InvalidArgument("JSON row lacks column " + col.name);
            const nlohmann::json& v = *it;
            if (v.is_null()) {
                cells.emplace_back();
            } else if (v.is_string()) {
                cells.push_back(v.get<std::string>());
            } else if (v.is_boolean()) {
                cells.push_back(format_bool(v.get<bool>()));
            } else if (v.is_number_unsigned()) {
                cells.push_back(format_unsigned(v.get<std::uint64_t>()));
            } else if (v.is_number_integer()) {
                cells.push_back(format_integer(v.get<std::int64_t>()));
            } else if (v.is_number_float()) {
                cells.push_back(format_real(v.get<double>()));
            } else {
                throw InvalidArgument("JSON cell for " + col.name + " is not a scalar");
            }
        }
        table.push_cells(std::move(cells));
    }
    return table;
}

Table parse(std::istream& in, OutputFormat format, const std::vector<Column>& schema) {
    return format == OutputFormat::csv ? parse_csv(in, schema) : parse_json(in, schema);
}

} // namespace ethlab
