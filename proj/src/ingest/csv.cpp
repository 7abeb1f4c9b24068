#include "beds/ingest/csv.hpp"

#include "beds/core/errors.hpp"

namespace beds::ingest {

CsvReader::CsvReader(std::istream& in) : in_(in) {}

std::optional<CsvRecord> CsvReader::next() {
    if (!bom_checked_) {
        bom_checked_ = true;
        if (in_.peek() == 0xEF) {
            char bom[3];
            in_.read(bom, 3);
            if (!(static_cast<unsigned char>(bom[1]) == 0xBB &&
                  static_cast<unsigned char>(bom[2]) == 0xBF)) {
                for (int i = 2; i >= 0; --i) in_.putback(bom[i]);
            }
        }
    }
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;

    record_line_ = line_;
    CsvRecord rec;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    int c;
    while ((c = in_.get()) != std::char_traits<char>::eof()) {
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field += ch;
            }
            continue;
        }
        if (ch == '"' && field.empty() && !field_was_quoted) {
            quoted = true;
            field_was_quoted = true;
        } else if (ch == ',') {
            rec.push_back(std::move(field));
            field.clear();
            field_was_quoted = false;
        } else if (ch == '\r' && in_.peek() == '\n') {
            continue;
        } else if (ch == '\n') {
            ++line_;
            rec.push_back(std::move(field));
            return rec;
        } else {
            field += ch;
        }
    }
    if (quoted)
        throw ParseError("unterminated quoted field starting on line " +
                         std::to_string(record_line_));
    rec.push_back(std::move(field));
    return rec;
}

std::vector<CsvRecord> read_csv(std::istream& in) {
    CsvReader r(in);
    std::vector<CsvRecord> out;
    while (auto rec = r.next()) out.push_back(std::move(*rec));
    return out;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

}  // namespace beds::ingest
