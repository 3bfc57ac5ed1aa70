#include "trapdyn/system_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "trapdyn/error.hpp"

namespace trapdyn {
namespace {

using json = nlohmann::json;

// Line and column of a byte offset, both one-based.
std::string location(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t p = 0; p < byte; ++p) {
    if (text[p] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::size_t begin = text.rfind('\n', byte == 0 ? 0 : byte - 1);
  begin = (begin == std::string_view::npos || byte == 0) ? 0 : begin + 1;
  std::size_t end = text.find('\n', begin);
  if (end == std::string_view::npos) end = text.size();
  std::ostringstream out;
  out << "line " << line << ", column " << col << ": "
      << text.substr(begin, std::min<std::size_t>(end - begin, 120));
  return out.str();
}

const json& member(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw ParseError(std::string("system file: missing field \"") + name +
                     "\"");
  }
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError("system file: " + where + " is not a number");
  return v.get<double>();
}

int index(const json& v, int n, const std::string& where) {
  if (!v.is_number_integer()) {
    throw ParseError("system file: " + where + " is not an integer");
  }
  const auto i = v.get<std::int64_t>();
  if (i < 1 || i > n) {
    throw ParseError("system file: " + where + " = " + std::to_string(i) +
                     " outside 1.." + std::to_string(n));
  }
  return static_cast<int>(i - 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) {
    s += ".0";
  }
  return s;
}

LosslessQuadraticSystem parse_system_json(
    std::string_view text, LosslessQuadraticSystem::Validation validation) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("system file: malformed JSON at ") +
                     location(text, e.byte == 0 ? 0 : e.byte - 1) + " (" +
                     e.what() + ")");
  }
  if (!doc.is_object()) throw ParseError("system file: top level must be an object");

  const json& jn = member(doc, "n");
  if (!jn.is_number_integer() || jn.get<std::int64_t>() < 1) {
    throw ParseError("system file: \"n\" must be a positive integer");
  }
  const int n = static_cast<int>(jn.get<std::int64_t>());

  const json& jc = member(doc, "c");
  if (!jc.is_array() || static_cast<int>(jc.size()) != n) {
    throw ParseError("system file: \"c\" must be an array of length n");
  }
  Vector c(n);
  for (int r = 0; r < n; ++r) c(r) = number(jc[r], "c[" + std::to_string(r) + "]");

  const json& jL = member(doc, "L");
  if (!jL.is_array() || static_cast<int>(jL.size()) != n) {
    throw ParseError("system file: \"L\" must have n rows");
  }
  Matrix L(n, n);
  for (int r = 0; r < n; ++r) {
    if (!jL[r].is_array() || static_cast<int>(jL[r].size()) != n) {
      throw ParseError("system file: row " + std::to_string(r + 1) +
                       " of \"L\" must have n entries");
    }
    for (int col = 0; col < n; ++col) {
      L(r, col) = number(jL[r][col], "L[" + std::to_string(r) + "][" +
                                         std::to_string(col) + "]");
    }
  }

  const json& jQ = member(doc, "Q");
  if (!jQ.is_array()) throw ParseError("system file: \"Q\" must be an array");
  std::vector<QuadTerm> terms;
  terms.reserve(jQ.size());
  for (std::size_t t = 0; t < jQ.size(); ++t) {
    const json& e = jQ[t];
    const std::string where = "Q[" + std::to_string(t) + "]";
    if (!e.is_object()) throw ParseError("system file: " + where + " must be an object");
    QuadTerm q;
    q.i = index(member(e, "i"), n, where + ".i");
    q.j = index(member(e, "j"), n, where + ".j");
    q.k = index(member(e, "k"), n, where + ".k");
    if (q.j > q.k) {
      throw ParseError("system file: " + where + " must satisfy j <= k");
    }
    q.value = number(member(e, "v"), where + ".v");
    terms.push_back(q);
  }
  return LosslessQuadraticSystem(std::move(c), std::move(L), std::move(terms),
                                 validation);
}

std::string system_to_json(const LosslessQuadraticSystem& sys) {
  const int n = sys.dim();
  std::ostringstream out;
  out << "{\n  \"n\": " << n << ",\n  \"c\": [";
  for (int r = 0; r < n; ++r) {
    out << (r ? ", " : "") << format_double(sys.c()(r));
  }
  out << "],\n  \"L\": [\n";
  for (int r = 0; r < n; ++r) {
    out << "    [";
    for (int col = 0; col < n; ++col) {
      out << (col ? ", " : "") << format_double(sys.L()(r, col));
    }
    out << "]" << (r + 1 < n ? "," : "") << "\n";
  }
  out << "  ],\n  \"Q\": [";
  const auto terms = sys.terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& q = terms[t];
    out << (t ? ",\n" : "\n") << "    {\"i\": " << q.i + 1
        << ", \"j\": " << q.j + 1 << ", \"k\": " << q.k + 1
        << ", \"v\": " << format_double(q.value) << "}";
  }
  out << (terms.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return out.str();
}

LosslessQuadraticSystem load_system(
    const std::filesystem::path& path,
    LosslessQuadraticSystem::Validation validation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open system file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_json(buf.str(), validation);
}

void save_system(const LosslessQuadraticSystem& sys,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write system file " + path.string());
  out << system_to_json(sys);
}

}  // namespace trapdyn
