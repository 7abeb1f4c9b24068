#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace beds::ingest {

using CsvRecord = std::vector<std::string>;

/// Streaming reader for comma-separated UTF-8 with double-quote escaping.
/// Quoted fields may contain commas, doubled quotes and line breaks. CRLF and
/// LF line endings are both accepted; a leading UTF-8 BOM is skipped.
class CsvReader {
public:
    explicit CsvReader(std::istream& in);

    // Next record, or nullopt at end of input. Throws ParseError on an
    // unterminated quoted field.
    std::optional<CsvRecord> next();

    // 1-based physical line on which the last returned record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
    bool bom_checked_ = false;
};

std::vector<CsvRecord> read_csv(std::istream& in);

std::string csv_escape(std::string_view field);
void write_csv_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace beds::ingest
