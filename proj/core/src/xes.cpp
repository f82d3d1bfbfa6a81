#include <expat.h>
#include <fmt/format.h>

#include <charconv>
#include <cstring>
#include <exception>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <streambuf>
#include <zlib.h>

#include "procause/error.hpp"
#include "procause/event_log.hpp"

namespace procause {

namespace {

constexpr const char* kModule = "event_log";
constexpr std::string_view kNameKey = "concept:name";
constexpr std::string_view kTimeKey = "time:timestamp";

enum class Scope { outside, log, trace, event };

// SAX state. Only attributes that are direct children of <trace> or <event>
// are kept; nested meta-attributes and log-level declarations are skipped.
class XesHandler {
 public:
  explicit XesHandler(XML_Parser parser) : parser_(parser) {}

  void start(const char* name, const char** atts) {
    ++depth_;
    if (skip_depth_ != 0) return;
    const std::string_view tag(name);
    if (tag == "log") {
      scope_ = Scope::log;
      return;
    }
    if (tag == "trace" && scope_ == Scope::log) {
      scope_ = Scope::trace;
      trace_ = Trace{};
      trace_depth_ = depth_;
      ++trace_number_;
      return;
    }
    if (tag == "event" && scope_ == Scope::trace) {
      scope_ = Scope::event;
      event_ = Event{};
      event_time_.reset();
      event_depth_ = depth_;
      return;
    }
    const bool direct_child =
        (scope_ == Scope::trace && depth_ == trace_depth_ + 1) ||
        (scope_ == Scope::event && depth_ == event_depth_ + 1);
    if (!direct_child) {
      // global, extension, classifier and log-level attributes
      skip_depth_ = depth_;
      return;
    }
    read_attribute(tag, atts);
    skip_depth_ = depth_;  // ignore meta-attributes nested under this one
  }

  void end(const char*) {
    if (skip_depth_ == depth_) skip_depth_ = 0;
    if (skip_depth_ == 0) {
      if (scope_ == Scope::event && depth_ == event_depth_) {
        finish_event();
        scope_ = Scope::trace;
      } else if (scope_ == Scope::trace && depth_ == trace_depth_) {
        finish_trace();
        scope_ = Scope::log;
      }
    }
    --depth_;
  }

  void fail(std::exception_ptr e) {
    if (!error_) error_ = e;
    XML_StopParser(parser_, XML_FALSE);
  }

  std::exception_ptr error() const { return error_; }
  EventLog take_log() { return std::move(log_); }

 private:
  std::string trace_label() const {
    if (!trace_.case_id.empty()) return fmt::format("'{}'", trace_.case_id);
    return fmt::format("#{}", trace_number_);
  }

  void read_attribute(std::string_view type, const char** atts) {
    const char* key = nullptr;
    const char* value = nullptr;
    for (const char** a = atts; *a; a += 2) {
      if (std::strcmp(a[0], "key") == 0) key = a[1];
      if (std::strcmp(a[0], "value") == 0) value = a[1];
    }
    if (!key || !value) return;
    const std::string_view k(key);
    const std::string_view v(value);

    if (scope_ == Scope::trace) {
      if (k == kNameKey) {
        trace_.case_id = v;
        return;
      }
      trace_.attributes.push_back({std::string(k), typed_value(type, k, v)});
      return;
    }
    if (k == kNameKey) {
      event_.activity = v;
      return;
    }
    if (k == kTimeKey) {
      event_time_ = parse_timestamp(v);
      return;
    }
    for (auto& existing : event_.attributes) {
      if (existing.name == k) {
        existing.value = typed_value(type, k, v);
        return;
      }
    }
    event_.attributes.push_back({std::string(k), typed_value(type, k, v)});
  }

  AttributeValue typed_value(std::string_view type, std::string_view key, std::string_view text) {
    if (type == "int") {
      std::int64_t out = 0;
      const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || p != text.data() + text.size()) {
        throw ParseError(kModule, fmt::format("bad int value '{}' for key '{}' in trace {}", text,
                                              key, trace_label()));
      }
      return out;
    }
    if (type == "float") {
      double out = 0;
      const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || p != text.data() + text.size()) {
        throw ParseError(kModule, fmt::format("bad float value '{}' for key '{}' in trace {}", text,
                                              key, trace_label()));
      }
      return out;
    }
    if (type == "boolean") {
      if (text == "true" || text == "TRUE" || text == "True") return true;
      if (text == "false" || text == "FALSE" || text == "False") return false;
      throw ParseError(kModule, fmt::format("bad boolean value '{}' for key '{}' in trace {}", text,
                                            key, trace_label()));
    }
    return std::string(text);  // string, date, id and anything unknown
  }

  void finish_event() {
    if (event_.activity.empty()) {
      throw DataError(kModule, fmt::format("event without {} in trace {}", kNameKey, trace_label()));
    }
    if (!event_time_) {
      throw DataError(kModule, fmt::format("event '{}' without {} in trace {}", event_.activity,
                                           kTimeKey, trace_label()));
    }
    event_.timestamp = *event_time_;
    pending_.push_back(std::move(event_));
  }

  void finish_trace() {
    if (trace_.case_id.empty()) {
      throw DataError(kModule, fmt::format("trace {} has no {}", trace_label(), kNameKey));
    }
    for (auto& e : pending_) e.case_id = trace_.case_id;
    trace_.events = std::move(pending_);
    pending_.clear();
    trace_.sort_events();
    log_.add(std::move(trace_));
  }

  XML_Parser parser_;
  Scope scope_ = Scope::outside;
  int depth_ = 0;
  int skip_depth_ = 0;
  int trace_depth_ = 0;
  int event_depth_ = 0;
  std::size_t trace_number_ = 0;
  Trace trace_;
  Event event_;
  std::optional<Timestamp> event_time_;
  std::vector<Event> pending_;
  EventLog log_;
  std::exception_ptr error_;
};

void XMLCALL on_start(void* data, const char* name, const char** atts) {
  auto* h = static_cast<XesHandler*>(data);
  try {
    h->start(name, atts);
  } catch (...) {
    h->fail(std::current_exception());
  }
}

void XMLCALL on_end(void* data, const char* name) {
  auto* h = static_cast<XesHandler*>(data);
  try {
    h->end(name);
  } catch (...) {
    h->fail(std::current_exception());
  }
}

struct ParserDeleter {
  void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

}  // namespace

EventLog parse_xes(std::istream& in) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate(nullptr));
  if (!parser) throw Error(kModule, "cannot allocate XML parser");
  XesHandler handler(parser.get());
  XML_SetUserData(parser.get(), &handler);
  XML_SetElementHandler(parser.get(), on_start, on_end);

  constexpr std::size_t kChunk = 1 << 16;
  bool done = false;
  while (!done) {
    void* buffer = XML_GetBuffer(parser.get(), static_cast<int>(kChunk));
    if (!buffer) throw Error(kModule, "out of memory while parsing XES");
    in.read(static_cast<char*>(buffer), static_cast<std::streamsize>(kChunk));
    const auto got = in.gcount();
    done = got < static_cast<std::streamsize>(kChunk);
    if (XML_ParseBuffer(parser.get(), static_cast<int>(got), done) == XML_STATUS_ERROR) {
      if (handler.error()) std::rethrow_exception(handler.error());
      const auto offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
      throw ParseError(kModule,
                       fmt::format("malformed XES at byte {}: {}", offset,
                                   XML_ErrorString(XML_GetErrorCode(parser.get()))),
                       offset);
    }
  }
  return handler.take_log();
}

namespace {

// Read-only streambuf over a gzip file.
class GzipBuf : public std::streambuf {
 public:
  explicit GzipBuf(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {}
  ~GzipBuf() override {
    if (file_) gzclose(file_);
  }
  GzipBuf(const GzipBuf&) = delete;
  GzipBuf& operator=(const GzipBuf&) = delete;
  bool is_open() const { return file_ != nullptr; }

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    const int n = gzread(file_, buffer_, sizeof buffer_);
    if (n < 0) {
      int code = 0;
      throw ParseError(kModule, fmt::format("gzip error: {}", gzerror(file_, &code)));
    }
    if (n == 0) return traits_type::eof();
    setg(buffer_, buffer_, buffer_ + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  gzFile file_;
  char buffer_[1 << 16];
};

}  // namespace

EventLog parse_xes_file(const std::filesystem::path& path) {
  if (path.extension() == ".gz") {
    GzipBuf buf(path);
    if (!buf.is_open()) throw DataError(kModule, fmt::format("cannot open '{}'", path.string()));
    std::istream in(&buf);
    return parse_xes(in);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(kModule, fmt::format("cannot open '{}'", path.string()));
  return parse_xes(in);
}

}  // namespace procause
