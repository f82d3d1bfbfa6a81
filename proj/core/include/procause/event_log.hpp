#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace procause {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using AttributeValue = std::variant<std::string, std::int64_t, double, bool>;

struct Attribute {
  std::string name;
  AttributeValue value;

  bool operator==(const Attribute&) const = default;
};

std::string to_text(const AttributeValue& value);

struct Event {
  std::string activity;
  std::string case_id;
  Timestamp timestamp{};
  std::vector<Attribute> attributes;

  const AttributeValue* find(std::string_view name) const;
  bool operator==(const Event&) const = default;
};

// Events are kept sorted by timestamp; equal timestamps keep input order.
// `attributes` holds case-level values (XES trace attributes).
struct Trace {
  std::string case_id;
  std::vector<Attribute> attributes;
  std::vector<Event> events;

  const AttributeValue* find(std::string_view name) const;
  void sort_events();
  bool operator==(const Trace&) const = default;
};

// Traces in first-seen order, unique by case id.
class EventLog {
 public:
  // Throws DataError on a duplicate case id or an event whose case id differs
  // from the trace's.
  void add(Trace trace);

  const std::vector<Trace>& traces() const noexcept { return traces_; }
  const Trace* find(std::string_view case_id) const;
  std::size_t size() const noexcept { return traces_.size(); }
  std::size_t event_count() const noexcept;
  bool empty() const noexcept { return traces_.empty(); }

 private:
  std::vector<Trace> traces_;
  std::unordered_map<std::string, std::size_t> index_;
};

// --- timestamps -------------------------------------------------------------

// Accepts ISO-8601 ("2016-01-01T10:51:15.304+01:00", "...Z", date-only) when
// `format` is "iso8601"; otherwise `format` is a std::get_time pattern,
// optionally followed in the input by ".fff" fractional seconds.
Timestamp parse_timestamp(std::string_view text, std::string_view format = "iso8601");

// UTC, millisecond precision: "2016-01-01T09:51:15.304Z".
std::string format_timestamp(Timestamp ts);

// --- XES --------------------------------------------------------------------

EventLog parse_xes(std::istream& in);
// Files ending in .gz are decompressed on the fly.
EventLog parse_xes_file(const std::filesystem::path& path);

// --- CSV --------------------------------------------------------------------

struct CsvColumnMap {
  std::string case_id = "case_id";
  std::string activity = "activity";
  std::string timestamp = "timestamp";
  std::string timestamp_format = "iso8601";
  // Columns copied into event attributes (as text). Empty cells are skipped.
  std::vector<std::string> attributes;
};

EventLog parse_csv(std::istream& in, const CsvColumnMap& columns);
EventLog parse_csv_file(const std::filesystem::path& path, const CsvColumnMap& columns);

// Writes one row per event with columns case_id, activity, timestamp followed
// by `attribute_columns`. Absent attributes become empty cells.
void write_csv(std::ostream& out, const EventLog& log,
               const std::vector<std::string>& attribute_columns);

}  // namespace procause
