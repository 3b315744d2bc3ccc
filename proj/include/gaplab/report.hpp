#pragma once

// Self-describing experiment reports.  A report is a JSON document with
// canonical formatting: object keys sorted, floats printed to 17 significant
// digits, non-finite values emitted as null.  Emitting the same report twice
// yields byte-identical files, so filenames derived from the content hash
// never clobber earlier runs.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gaplab::harness {

class Json {
 public:
  enum class Type { null_t, bool_t, int_t, num_t, str_t, arr_t, obj_t };

  Json() = default;
  Json(bool b) : type_(Type::bool_t), bool_(b) {}
  Json(int v) : type_(Type::int_t), int_(v) {}
  Json(long v) : type_(Type::int_t), int_(v) {}
  Json(long long v) : type_(Type::int_t), int_(v) {}
  Json(unsigned long long v)
      : type_(Type::int_t), int_(static_cast<long long>(v)) {}
  Json(double v) : type_(Type::num_t), num_(v) {}
  Json(const char* s) : type_(Type::str_t), str_(s) {}
  Json(std::string s) : type_(Type::str_t), str_(std::move(s)) {}

  static Json array();
  static Json object();

  Type type() const { return type_; }
  bool is_null() const { return type_ == Type::null_t; }
  bool is_object() const { return type_ == Type::obj_t; }
  bool is_array() const { return type_ == Type::arr_t; }
  bool is_number() const {
    return type_ == Type::num_t || type_ == Type::int_t;
  }

  bool as_bool() const { return bool_; }
  long long as_int() const;
  double as_double() const;
  const std::string& as_string() const { return str_; }

  // object access; operator[] promotes null to object
  Json& operator[](const std::string& key);
  const Json& at(const std::string& key) const;
  bool contains(const std::string& key) const;
  const std::map<std::string, Json>& items() const { return obj_; }
  std::size_t erase(const std::string& key) { return obj_.erase(key); }

  // array access; push_back promotes null to array
  void push_back(Json v);
  const Json& at(std::size_t i) const { return arr_.at(i); }
  std::size_t size() const;

  std::string dump(int indent = 2) const;
  static Json parse(const std::string& text);  // throws ParseError

 private:
  void dump_to(std::string& out, int indent, int depth) const;

  Type type_ = Type::null_t;
  bool bool_ = false;
  long long int_ = 0;
  double num_ = 0.0;
  std::string str_;
  std::vector<Json> arr_;
  std::map<std::string, Json> obj_;
};

// FNV-1a over the canonical dump with the "timings" subtree removed, so a
// re-run that differs only in wall clock maps to the same filename.
std::string content_hash(const Json& report);

struct EmitResult {
  std::string json_path;
  std::string hash;
  bool existed = false;  // an identical earlier emission was left in place
};

// Writes report-<hash>.json plus one report-<hash>-<name> file per
// attachment into out_dir (created if needed).  Existing files are never
// rewritten: identical content is already there by construction.
EmitResult emit_report(const Json& report,
                       const std::map<std::string, std::string>& attachments,
                       const std::string& out_dir);

// "t value stderr" rows for gnuplot-style consumption
std::string plot_table(const std::vector<std::array<double, 3>>& rows);

}  // namespace gaplab::harness
