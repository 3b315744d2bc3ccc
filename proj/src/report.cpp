#include "gaplab/report.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "gaplab/errors.hpp"

namespace gaplab::harness {

Json Json::array() {
  Json j;
  j.type_ = Type::arr_t;
  return j;
}

Json Json::object() {
  Json j;
  j.type_ = Type::obj_t;
  return j;
}

long long Json::as_int() const {
  if (type_ == Type::int_t) return int_;
  if (type_ == Type::num_t) return static_cast<long long>(num_);
  throw DomainError("Json: not a number");
}

double Json::as_double() const {
  if (type_ == Type::num_t) return num_;
  if (type_ == Type::int_t) return static_cast<double>(int_);
  if (type_ == Type::null_t) return std::nan("");
  throw DomainError("Json: not a number");
}

Json& Json::operator[](const std::string& key) {
  if (type_ == Type::null_t) type_ = Type::obj_t;
  if (type_ != Type::obj_t) throw DomainError("Json: not an object");
  return obj_[key];
}

const Json& Json::at(const std::string& key) const {
  if (type_ != Type::obj_t) throw DomainError("Json: not an object");
  const auto it = obj_.find(key);
  if (it == obj_.end()) throw DomainError("Json: missing key '" + key + "'");
  return it->second;
}

bool Json::contains(const std::string& key) const {
  return type_ == Type::obj_t && obj_.count(key) > 0;
}

void Json::push_back(Json v) {
  if (type_ == Type::null_t) type_ = Type::arr_t;
  if (type_ != Type::arr_t) throw DomainError("Json: not an array");
  arr_.push_back(std::move(v));
}

std::size_t Json::size() const {
  if (type_ == Type::arr_t) return arr_.size();
  if (type_ == Type::obj_t) return obj_.size();
  throw DomainError("Json: not a container");
}

namespace {

void escape_to(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void indent_to(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent) * depth, ' ');
}

}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
  switch (type_) {
    case Type::null_t: out += "null"; return;
    case Type::bool_t: out += bool_ ? "true" : "false"; return;
    case Type::int_t: out += std::to_string(int_); return;
    case Type::num_t: {
      if (!std::isfinite(num_)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", num_);
      out += buf;
      // bare integers would reparse with the wrong type
      if (out.find_first_of(".eE", out.size() - std::strlen(buf)) ==
          std::string::npos)
        out += ".0";
      return;
    }
    case Type::str_t: escape_to(out, str_); return;
    case Type::arr_t: {
      if (arr_.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < arr_.size(); ++i) {
        if (i) out += ',';
        indent_to(out, indent, depth + 1);
        arr_[i].dump_to(out, indent, depth + 1);
      }
      indent_to(out, indent, depth);
      out += ']';
      return;
    }
    case Type::obj_t: {
      if (obj_.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, val] : obj_) {
        if (!first) out += ',';
        first = false;
        indent_to(out, indent, depth + 1);
        escape_to(out, key);
        out += indent > 0 ? ": " : ":";
        val.dump_to(out, indent, depth + 1);
      }
      indent_to(out, indent, depth);
      out += '}';
      return;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  if (indent > 0) out += '\n';
  return out;
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("json offset " + std::to_string(pos) + ": " + what);
  }

  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\t' ||
            text[pos] == '\r'))
      ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  bool literal(const char* word) {
    const std::size_t len = std::strlen(word);
    if (text.compare(pos, len, word) == 0) {
      pos += len;
      return true;
    }
    return false;
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (pos < text.size() && text[pos] != '"') {
      char c = text[pos++];
      if (c == '\\') {
        if (pos >= text.size()) fail("dangling escape");
        const char e = text[pos++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case '/': out += '/'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case 'u': {
            if (pos + 4 > text.size()) fail("short \\u escape");
            unsigned code = 0;
            for (int i = 0; i < 4; ++i) {
              const char h = text[pos + static_cast<std::size_t>(i)];
              if (!std::isxdigit(static_cast<unsigned char>(h)))
                fail("bad \\u escape");
              code = code * 16 +
                     static_cast<unsigned>(
                         h <= '9' ? h - '0' : (h | 0x20) - 'a' + 10);
            }
            pos += 4;
            if (code > 0xff) fail("non-latin \\u escape unsupported");
            out += static_cast<char>(code);
            break;
          }
          default: fail("unknown escape");
        }
      } else {
        out += c;
      }
    }
    if (pos >= text.size()) fail("unterminated string");
    ++pos;
    return out;
  }

  Json parse_value() {
    const char c = peek();
    if (c == '{') {
      ++pos;
      Json obj = Json::object();
      if (peek() == '}') {
        ++pos;
        return obj;
      }
      while (true) {
        skip_ws();
        const std::string key = parse_string();
        expect(':');
        obj[key] = parse_value();
        const char d = peek();
        if (d == ',') {
          ++pos;
          continue;
        }
        expect('}');
        return obj;
      }
    }
    if (c == '[') {
      ++pos;
      Json arr = Json::array();
      if (peek() == ']') {
        ++pos;
        return arr;
      }
      while (true) {
        arr.push_back(parse_value());
        const char d = peek();
        if (d == ',') {
          ++pos;
          continue;
        }
        expect(']');
        return arr;
      }
    }
    if (c == '"') return Json(parse_string());
    if (literal("null")) return Json();
    if (literal("true")) return Json(true);
    if (literal("false")) return Json(false);
    // number: keep the int/float distinction the dumper draws
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '-' || text[pos] == '+' || text[pos] == '.' ||
            text[pos] == 'e' || text[pos] == 'E'))
      ++pos;
    if (pos == start) fail("unexpected character");
    const std::string tok = text.substr(start, pos - start);
    try {
      if (tok.find_first_of(".eE") == std::string::npos)
        return Json(static_cast<long long>(std::stoll(tok)));
      return Json(std::stod(tok));
    } catch (const std::exception&) {
      fail("bad number '" + tok + "'");
    }
  }
};

}  // namespace

Json Json::parse(const std::string& text) {
  Parser p{text};
  Json v = p.parse_value();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  return v;
}

std::string content_hash(const Json& report) {
  Json stripped = report;
  if (stripped.is_object()) stripped.erase("timings");
  const std::string body = stripped.dump(0);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : body) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EmitResult emit_report(const Json& report,
                       const std::map<std::string, std::string>& attachments,
                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output dir '" + out_dir + "'");

  EmitResult res;
  res.hash = content_hash(report);
  const std::string stem = "report-" + res.hash;
  res.json_path = (fs::path(out_dir) / (stem + ".json")).string();

  auto write_once = [&](const std::string& path, const std::string& body) {
    if (fs::exists(path)) return false;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << body;
    return true;
  };

  res.existed = !write_once(res.json_path, report.dump());
  for (const auto& [name, body] : attachments)
    write_once((fs::path(out_dir) / (stem + "-" + name)).string(), body);
  return res;
}

std::string plot_table(const std::vector<std::array<double, 3>>& rows) {
  std::string out = "# t value stderr\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", r[0], r[1], r[2]);
    out += buf;
  }
  return out;
}

}  // namespace gaplab::harness
