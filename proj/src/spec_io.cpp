#include "slmulti/spec_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "slmulti/errors.hpp"

namespace slmulti {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("spec document: " + path + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing key \"") + key + "\"");
  return *it;
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) fail(path, "non-finite number");
  return x;
}

std::vector<double> number_array(const json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < value.size(); ++k) {
    out.push_back(number(value[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<std::vector<double>> number_matrix(const json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < value.size(); ++k) {
    out.push_back(number_array(value[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

PiecewisePoly pieces(const json& value, const std::string& path) {
  PiecewisePoly f;
  f.knots = number_array(member(value, "knots", path), path + ".knots");
  f.pieces = number_matrix(member(value, "coeffs", path), path + ".coeffs");
  return f;
}

MatX square(const std::vector<std::vector<double>>& rows, Eigen::Index n, const std::string& path) {
  if (static_cast<Eigen::Index>(rows.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " rows");
  }
  MatX M = MatX::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      fail(path + "[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " columns");
    }
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = rows[i][j];
  }
  return M;
}

void append_array(std::string& out, const std::vector<double>& xs) {
  out += '[';
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ", ";
    out += format_number(xs[k]);
  }
  out += ']';
}

void append_matrix(std::string& out, const std::vector<std::vector<double>>& rows,
                   const std::string& indent) {
  out += '[';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out += k ? ",\n" + indent + " " : "";
    append_array(out, rows[k]);
  }
  out += ']';
}

void append_poly(std::string& out, const PiecewisePoly& f, const std::string& indent) {
  out += "{\"knots\": ";
  append_array(out, f.knots);
  out += ", \"coeffs\": ";
  append_matrix(out, f.pieces, indent);
  out += '}';
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SpecDocument parse_spec_document(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << "spec document: JSON syntax error at line " << line << ", column " << column << ": "
        << e.what();
    throw ValidationError(msg.str());
  }

  SpecDocument doc;
  doc.problem.partition.points = number_array(member(root, "partition", "$"), "$.partition");
  const json& intervals = member(root, "intervals", "$");
  if (!intervals.is_array()) fail("$.intervals", "expected an array");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const std::string path = "$.intervals[" + std::to_string(i) + "]";
    doc.problem.coeffs.push_back({pieces(member(intervals[i], "r", path), path + ".r"),
                                  pieces(member(intervals[i], "Q", path), path + ".Q")});
  }
  const auto n = static_cast<Eigen::Index>(2 * doc.problem.partition.cells());
  const json& K = member(root, "K", "$");
  doc.K = square(number_matrix(member(K, "re", "$.K"), "$.K.re"), n, "$.K.re");
  if (K.contains("im")) {
    doc.K += cplx(0.0, 1.0) * square(number_matrix(K["im"], "$.K.im"), n, "$.K.im");
  }
  if (root.contains("sign")) {
    const json& sign = root["sign"];
    if (sign == "plus") {
      doc.sign = Sign::Plus;
    } else if (sign == "minus") {
      doc.sign = Sign::Minus;
    } else {
      fail("$.sign", "expected \"plus\" or \"minus\"");
    }
  }
  if (root.contains("k_family")) {
    const json& type = member(root["k_family"], "type", "$.k_family");
    if (type != "constant") fail("$.k_family.type", "only \"constant\" is supported");
    doc.k_family = "constant";
  }
  return doc;
}

SpecDocument load_spec_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec document " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec_document(text.str());
}

std::string dump_spec_document(const SpecDocument& doc) {
  std::string out = "{\n  \"partition\": ";
  append_array(out, doc.problem.partition.points);
  out += ",\n  \"intervals\": [";
  for (std::size_t i = 0; i < doc.problem.coeffs.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += "{\"r\": ";
    append_poly(out, doc.problem.coeffs[i].r, "      ");
    out += ",\n     \"Q\": ";
    append_poly(out, doc.problem.coeffs[i].Q, "      ");
    out += '}';
  }
  out += "\n  ],\n  \"K\": {\"re\": ";
  std::vector<std::vector<double>> re(doc.K.rows()), im(doc.K.rows());
  for (Eigen::Index i = 0; i < doc.K.rows(); ++i) {
    for (Eigen::Index j = 0; j < doc.K.cols(); ++j) {
      re[i].push_back(doc.K(i, j).real());
      im[i].push_back(doc.K(i, j).imag());
    }
  }
  append_matrix(out, re, "        ");
  out += ",\n        \"im\": ";
  append_matrix(out, im, "        ");
  out += "},\n  \"sign\": \"" + to_string(doc.sign) + "\"";
  if (doc.k_family) out += ",\n  \"k_family\": {\"type\": \"" + *doc.k_family + "\"}";
  out += "\n}\n";
  return out;
}

}  // namespace slmulti
