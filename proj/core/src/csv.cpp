#include "botsift/csv.hpp"

#include "botsift/error.hpp"

namespace botsift::csv {

void write_field(std::ostream& out, std::string_view value, bool force_quotes) {
  const bool needs = force_quotes || value.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string_view>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

std::optional<Row> Reader::next() {
  using Traits = std::char_traits<char>;
  std::streambuf* sb = in_.rdbuf();
  if (sb == nullptr || Traits::eq_int_type(sb->sgetc(), Traits::eof())) return std::nullopt;

  row_line_ = line_;
  Row row;
  Field field;
  enum class State { field_start, bare, quoted, quote_in_quoted } state = State::field_start;

  for (;;) {
    const auto ic = sb->sbumpc();
    if (Traits::eq_int_type(ic, Traits::eof())) {
      if (state == State::quoted) {
        throw FormatError("unterminated quoted field starting on line " + std::to_string(row_line_));
      }
      row.push_back(std::move(field));
      return row;
    }
    const char c = Traits::to_char_type(ic);

    switch (state) {
      case State::field_start:
        if (c == '"') {
          field.quoted = true;
          state = State::quoted;
          break;
        }
        state = State::bare;
        [[fallthrough]];
      case State::bare:
      case State::quote_in_quoted:
        if (c == ',') {
          row.push_back(std::move(field));
          field = Field{};
          state = State::field_start;
        } else if (c == '\n' || c == '\r') {
          if (c == '\r' && Traits::eq_int_type(sb->sgetc(), Traits::to_int_type('\n'))) sb->sbumpc();
          ++line_;
          row.push_back(std::move(field));
          return row;
        } else if (state == State::quote_in_quoted) {
          if (c != '"') {
            throw FormatError("unexpected character after closing quote on line " +
                              std::to_string(line_));
          }
          field.value.push_back('"');
          state = State::quoted;
        } else {
          field.value.push_back(c);
        }
        break;
      case State::quoted:
        if (c == '"') {
          state = State::quote_in_quoted;
        } else {
          if (c == '\n') ++line_;
          field.value.push_back(c);
        }
        break;
    }
  }
}

std::vector<std::string> names(const Row& row) {
  std::vector<std::string> out;
  out.reserve(row.size());
  for (const auto& f : row) out.push_back(f.value);
  return out;
}

}  // namespace botsift::csv
