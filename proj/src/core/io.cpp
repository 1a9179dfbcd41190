#include "shape/io.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "shape/errors.hpp"

namespace shape {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'", line);
  return *it;
}

double as_real(const json& v, const std::string& what, std::size_t line) {
  if (!v.is_number()) throw ParseError(what + " must be a number", line);
  return v.get<double>();
}

}  // namespace

TrajectoryRecord parse_record(std::string_view line, std::size_t line_number) {
  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_number);
  }
  if (!doc.is_object()) throw ParseError("record must be a JSON object", line_number);

  TrajectoryRecord rec;
  const json& id = require(doc, "id", line_number);
  if (id.is_string()) {
    rec.id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    rec.id = std::to_string(id.get<long long>());
  } else {
    throw ParseError("'id' must be a string", line_number);
  }

  if (const auto g = doc.find("group_id"); g != doc.end() && !g->is_null()) {
    if (g->is_string()) {
      rec.group_id = g->get<std::string>();
    } else if (g->is_number_integer()) {
      rec.group_id = std::to_string(g->get<long long>());
    } else {
      throw ParseError("'group_id' must be a string", line_number);
    }
  }

  const json& outcome = require(doc, "outcome", line_number);
  if (outcome.is_boolean()) {
    rec.outcome = outcome.get<bool>() ? 1 : 0;
  } else if (outcome.is_number_integer()) {
    rec.outcome = static_cast<int>(outcome.get<long long>());
  } else if (outcome.is_number_float()) {
    const double v = outcome.get<double>();
    if (std::floor(v) != v || std::abs(v) > 1e9) {
      throw ParseError("'outcome' must be 0 or 1; partial credit is not supported", line_number);
    }
    rec.outcome = static_cast<int>(v);
  } else {
    throw ParseError("'outcome' must be 0 or 1", line_number);
  }

  const json& tokens = require(doc, "tokens", line_number);
  if (!tokens.is_array()) throw ParseError("'tokens' must be an array", line_number);
  rec.tokens.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const json& t = tokens[i];
    const std::string where = "tokens[" + std::to_string(i) + "]";
    if (!t.is_object()) throw ParseError(where + " must be an object", line_number);
    TokenInfo info;
    info.entropy = as_real(require(t, "h", line_number), where + ".h", line_number);
    if (const auto txt = t.find("t"); txt != t.end() && !txt->is_null()) {
      if (!txt->is_string()) throw ParseError(where + ".t must be a string", line_number);
      info.text = txt->get<std::string>();
    }
    if (const auto valid = t.find("valid"); valid != t.end() && !valid->is_null()) {
      if (!valid->is_boolean()) throw ParseError(where + ".valid must be a boolean", line_number);
      info.valid = valid->get<bool>();
    }
    rec.tokens.push_back(std::move(info));
  }

  if (const auto bp = doc.find("boundary_potentials"); bp != doc.end() && !bp->is_null()) {
    if (!bp->is_array()) throw ParseError("'boundary_potentials' must be an array", line_number);
    std::vector<double> values;
    values.reserve(bp->size());
    for (const auto& v : *bp) values.push_back(as_real(v, "boundary_potentials entry", line_number));
    rec.boundary_potentials = std::move(values);
  }
  return rec;
}

std::string serialize_record(const TrajectoryRecord& record) {
  json doc;
  doc["id"] = record.id;
  if (record.group_id) doc["group_id"] = *record.group_id;
  doc["outcome"] = record.outcome;
  json tokens = json::array();
  for (const auto& t : record.tokens) {
    json tok;
    tok["h"] = t.entropy;
    if (t.text) tok["t"] = *t.text;
    if (!t.valid) tok["valid"] = false;
    tokens.push_back(std::move(tok));
  }
  doc["tokens"] = std::move(tokens);
  if (record.boundary_potentials) doc["boundary_potentials"] = *record.boundary_potentials;
  return doc.dump();
}

LoadResult read_jsonl(std::istream& in, bool strict) {
  LoadResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.records.push_back(parse_record(line, line_no));
    } catch (const ParseError& e) {
      if (strict) throw;
      out.skipped.push_back({line_no, e.what()});
    }
  }
  return out;
}

LoadResult read_jsonl_file(const std::string& path, bool strict) {
  if (path == "-") return read_jsonl(std::cin, strict);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_jsonl(in, strict);
}

std::string serialize_sheet(const AdvantageSheet& sheet) {
  json doc;
  doc["id"] = sheet.id;
  doc["estimator"] = to_string(sheet.estimator);
  doc["k"] = sheet.plan.k;
  doc["boundaries"] = sheet.plan.boundaries;
  doc["potentials"] = sheet.potentials;
  doc["segment_advantages"] = sheet.segment_advantages;
  doc["token_advantages"] = sheet.token_advantages;
  json terms = json::array();
  for (const auto& t : sheet.shaping_terms) {
    terms.push_back({{"raw_gain", t.raw_gain},
                     {"tax", t.tax},
                     {"gamma", t.gamma},
                     {"length", t.length},
                     {"value", t.value}});
  }
  doc["shaping_terms"] = std::move(terms);
  return doc.dump();
}

void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
  if (path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::remove(tmp.c_str());
      throw;
    }
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace shape
