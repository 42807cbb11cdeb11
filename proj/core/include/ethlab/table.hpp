#pragma once

// Long-format result tables. Cells are kept as their canonical text so that
// emit -> parse round trips are exact; typed accessors parse on demand.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ethlab {

enum class ColumnType { integer, real, text, boolean };

struct Column {
    std::string name;
    ColumnType type = ColumnType::real;

    friend bool operator==(const Column&, const Column&) = default;
};

enum class OutputFormat { csv, json };

[[nodiscard]] std::string_view to_string(OutputFormat format);
[[nodiscard]] OutputFormat output_format_from_string(std::string_view name);

/// Canonical cell text. Reals use 17 significant digits.
[[nodiscard]] std::string format_real(double value);
[[nodiscard]] std::string format_integer(std::int64_t value);
[[nodiscard]] std::string format_unsigned(std::uint64_t value);
[[nodiscard]] std::string format_bool(bool value);

class Table {
public:
    Table() = default;
    explicit Table(std::vector<Column> columns);

    class RowBuilder {
    public:
        RowBuilder& set(std::string_view column, double value);
        RowBuilder& set(std::string_view column, long value);
        RowBuilder& set(std::string_view column, std::uint64_t value);
        RowBuilder& set(std::string_view column, bool value);
        RowBuilder& set(std::string_view column, std::string value);
        RowBuilder& set(std::string_view column, const char* value) { return set(column, std::string(value)); }

    private:
        friend class Table;
        explicit RowBuilder(const Table& table);
        RowBuilder& put(std::string_view column, std::string text);

        const Table* table_;
        std::vector<std::string> cells_;
    };

    [[nodiscard]] RowBuilder row() const { return RowBuilder(*this); }
    void push(RowBuilder row);
    void push_cells(std::vector<std::string> cells);
    /// Appends rows of a table with identical columns.
    void append(const Table& other);

    [[nodiscard]] const std::vector<Column>& columns() const noexcept { return columns_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }
    [[nodiscard]] bool has_column(std::string_view name) const noexcept;
    [[nodiscard]] std::size_t column_index(std::string_view name) const;

    [[nodiscard]] const std::vector<std::string>& cells(std::size_t row) const { return rows_.at(row); }
    [[nodiscard]] const std::string& cell(std::size_t row, std::string_view column) const;
    /// Blank cells read as NaN.
    [[nodiscard]] double real(std::size_t row, std::string_view column) const;
    [[nodiscard]] std::int64_t integer(std::size_t row, std::string_view column) const;
    [[nodiscard]] bool boolean(std::size_t row, std::string_view column) const;

    /// Stable sort by (N, trial, kind) over whichever of those columns exist.
    void sort_rows();

    friend bool operator==(const Table&, const Table&) = default;

private:
    std::vector<Column> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// RFC-4180 CSV with a header row and LF line ends.
void write_csv(const Table& table, std::ostream& out);
/// JSON array of flat records; numbers keep their canonical text.
void write_json(const Table& table, std::ostream& out);
void write(const Table& table, OutputFormat format, std::ostream& out);
/// Writes to `path`; "-" means stdout. Throws std::runtime_error on I/O failure.
void emit(const Table& table, OutputFormat format, const std::filesystem::path& path);

/// Column types are not recoverable from CSV alone, so the schema is passed in.
[[nodiscard]] Table parse_csv(std::istream& in, const std::vector<Column>& schema);
[[nodiscard]] Table parse_json(std::istream& in, const std::vector<Column>& schema);
[[nodiscard]] Table parse(std::istream& in, OutputFormat format, const std::vector<Column>& schema);

} // namespace ethlab
