#include "procause/event_log.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include "procause/csv.hpp"
#include "procause/error.hpp"

namespace procause {

namespace {

constexpr const char* kModule = "event_log";

const AttributeValue* find_in(const std::vector<Attribute>& attributes, std::string_view name) {
  for (const auto& a : attributes) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

// Reads exactly `width` digits at `pos`.
bool read_digits(std::string_view text, std::size_t& pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char ch = text[pos + i];
    if (ch < '0' || ch > '9') return false;
    value = value * 10 + (ch - '0');
  }
  pos += width;
  out = value;
  return true;
}

bool expect(std::string_view text, std::size_t& pos, char ch) {
  if (pos < text.size() && text[pos] == ch) {
    ++pos;
    return true;
  }
  return false;
}

// Consumes ".ddd..." and returns milliseconds (extra digits truncated).
int read_fraction_ms(std::string_view text, std::size_t& pos) {
  if (pos >= text.size() || (text[pos] != '.' && text[pos] != ',')) return 0;
  ++pos;
  int ms = 0;
  int digits = 0;
  const std::size_t start = pos;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    if (digits < 3) {
      ms = ms * 10 + (text[pos] - '0');
      ++digits;
    }
    ++pos;
  }
  if (pos == start) throw ParseError(kModule, fmt::format("unparseable timestamp '{}'", text));
  while (digits < 3) {
    ms *= 10;
    ++digits;
  }
  return ms;
}

Timestamp make_timestamp(int year, int month, int day, int hour, int minute, int second, int ms,
                         std::string_view literal) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
    throw ParseError(kModule, fmt::format("unparseable timestamp '{}'", literal));
  }
  return time_point_cast<milliseconds>(sys_days{ymd}) + hours{hour} + minutes{minute} +
         seconds{second} + milliseconds{ms};
}

Timestamp parse_iso8601(std::string_view text) {
  const auto fail = [&] { return ParseError(kModule, fmt::format("unparseable timestamp '{}'", text)); };
  std::size_t pos = 0;
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!read_digits(text, pos, 4, year) || !expect(text, pos, '-') ||
      !read_digits(text, pos, 2, month) || !expect(text, pos, '-') ||
      !read_digits(text, pos, 2, day)) {
    throw fail();
  }
  int ms = 0;
  std::chrono::minutes offset{0};
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') throw fail();
    ++pos;
    if (!read_digits(text, pos, 2, hour) || !expect(text, pos, ':') ||
        !read_digits(text, pos, 2, minute)) {
      throw fail();
    }
    if (expect(text, pos, ':')) {
      if (!read_digits(text, pos, 2, second)) throw fail();
      ms = read_fraction_ms(text, pos);
    }
    if (pos < text.size()) {
      const char zone = text[pos++];
      if (zone == 'Z' || zone == 'z') {
        // UTC
      } else if (zone == '+' || zone == '-') {
        int oh = 0, om = 0;
        if (!read_digits(text, pos, 2, oh)) throw fail();
        expect(text, pos, ':');
        if (pos < text.size() && !read_digits(text, pos, 2, om)) throw fail();
        offset = std::chrono::minutes{oh * 60 + om};
        if (zone == '-') offset = -offset;
      } else {
        throw fail();
      }
    }
    if (pos != text.size()) throw fail();
  }
  return make_timestamp(year, month, day, hour, minute, second, ms, text) - offset;
}

Timestamp parse_with_format(std::string_view text, std::string_view format) {
  std::istringstream in{std::string(text)};
  in.imbue(std::locale::classic());
  std::tm tm{};
  in >> std::get_time(&tm, std::string(format).c_str());
  if (in.fail()) throw ParseError(kModule, fmt::format("unparseable timestamp '{}'", text));
  std::string rest;
  std::getline(in, rest);
  std::size_t pos = 0;
  const int ms = read_fraction_ms(rest, pos);
  if (pos != rest.size()) throw ParseError(kModule, fmt::format("unparseable timestamp '{}'", text));
  return make_timestamp(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                        tm.tm_sec, ms, text);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string to_text(const AttributeValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return fmt::format("{}", v);
        }
      },
      value);
}

const AttributeValue* Event::find(std::string_view name) const { return find_in(attributes, name); }

const AttributeValue* Trace::find(std::string_view name) const { return find_in(attributes, name); }

void Trace::sort_events() {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

void EventLog::add(Trace trace) {
  if (trace.case_id.empty()) throw DataError(kModule, "trace with empty case id");
  for (const auto& e : trace.events) {
    if (e.case_id != trace.case_id) {
      throw DataError(kModule, fmt::format("event of case '{}' placed in trace '{}'", e.case_id,
                                           trace.case_id));
    }
  }
  const auto [it, inserted] = index_.emplace(trace.case_id, traces_.size());
  if (!inserted) throw DataError(kModule, fmt::format("duplicate case id '{}'", trace.case_id));
  traces_.push_back(std::move(trace));
}

const Trace* EventLog::find(std::string_view case_id) const {
  const auto it = index_.find(std::string(case_id));
  return it == index_.end() ? nullptr : &traces_[it->second];
}

std::size_t EventLog::event_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : traces_) n += t.events.size();
  return n;
}

Timestamp parse_timestamp(std::string_view text, std::string_view format) {
  const std::string trimmed = trim(text);
  if (trimmed.empty()) throw ParseError(kModule, "empty timestamp");
  if (format == "iso8601") return parse_iso8601(trimmed);
  return parse_with_format(trimmed, format);
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> tod{ts - day};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     tod.hours().count(), tod.minutes().count(), tod.seconds().count(),
                     tod.subseconds().count());
}

EventLog parse_csv(std::istream& in, const CsvColumnMap& columns) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw ParseError(kModule, "CSV input has no header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  const auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(kModule, fmt::format("missing CSV column '{}'", name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t case_col = column_index(columns.case_id);
  const std::size_t activity_col = column_index(columns.activity);
  const std::size_t time_col = column_index(columns.timestamp);
  std::vector<std::size_t> attribute_cols;
  attribute_cols.reserve(columns.attributes.size());
  for (const auto& name : columns.attributes) attribute_cols.push_back(column_index(name));

  std::vector<Trace> traces;
  std::unordered_map<std::string, std::size_t> by_case;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    const std::size_t row_number = reader.record_number();
    if (row.size() != header.size()) {
      throw ParseError(kModule, fmt::format("CSV row {} has {} fields, header has {}", row_number,
                                            row.size(), header.size()));
    }
    Event event;
    event.case_id = row[case_col];
    if (event.case_id.empty()) {
      throw DataError(kModule, fmt::format("CSV row {} has an empty case id", row_number));
    }
    event.activity = row[activity_col];
    if (event.activity.empty()) {
      throw DataError(kModule, fmt::format("CSV row {} has an empty activity", row_number));
    }
    event.timestamp = parse_timestamp(row[time_col], columns.timestamp_format);
    for (std::size_t i = 0; i < attribute_cols.size(); ++i) {
      const std::string& cell = row[attribute_cols[i]];
      if (!cell.empty()) event.attributes.push_back({columns.attributes[i], cell});
    }
    const auto [it, inserted] = by_case.emplace(event.case_id, traces.size());
    if (inserted) traces.push_back(Trace{event.case_id, {}, {}});
    traces[it->second].events.push_back(std::move(event));
  }

  EventLog log;
  for (auto& t : traces) {
    t.sort_events();
    log.add(std::move(t));
  }
  return log;
}

EventLog parse_csv_file(const std::filesystem::path& path, const CsvColumnMap& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(kModule, fmt::format("cannot open '{}'", path.string()));
  return parse_csv(in, columns);
}

void write_csv(std::ostream& out, const EventLog& log,
               const std::vector<std::string>& attribute_columns) {
  std::vector<std::string> row{"case_id", "activity", "timestamp"};
  row.insert(row.end(), attribute_columns.begin(), attribute_columns.end());
  csv::write_row(out, row);
  for (const auto& trace : log.traces()) {
    for (const auto& event : trace.events) {
      row.assign({event.case_id, event.activity, format_timestamp(event.timestamp)});
      for (const auto& name : attribute_columns) {
        const AttributeValue* v = event.find(name);
        row.push_back(v ? to_text(*v) : std::string{});
      }
      csv::write_row(out, row);
    }
  }
}

}  // namespace procause
