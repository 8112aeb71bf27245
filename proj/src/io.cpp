#include "activelad/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "activelad/error.hpp"

namespace activelad {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& path, std::size_t line_no, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_real(std::string_view tok, const std::string& path, std::size_t line_no) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(path, line_no, "cannot parse '" + std::string(tok) + "' as a real number");
  }
  if (!std::isfinite(v)) fail(path, line_no, "non-finite value");
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_label_line(std::string_view line, const std::string& path, std::size_t line_no) {
  return parse_real(line, path, line_no);
}

Matrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    for (;;) {
      const auto comma = body.find(',', start);
      const auto tok = body.substr(start, comma == std::string_view::npos ? body.size() - start
                                                                          : comma - start);
      data.push_back(parse_real(tok, path, line_no));
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      fail(path, line_no,
           "expected " + std::to_string(cols) + " columns, found " + std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw DataError(path + ": no data rows");
  return Matrix(rows, cols, std::move(data));
}

Vector read_vector(const std::string& path) {
  auto in = open_in(path);
  Vector v;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    v.push_back(parse_real(line, path, line_no));
  }
  if (v.empty()) throw DataError(path + ": no values");
  return v;
}

void write_matrix_csv(const std::string& path, const Matrix& x) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << format_double(x(i, j));
    }
    out << '\n';
  }
}

void write_vector(const std::string& path, std::span<const double> v) {
  auto out = open_out(path);
  for (double x : v) out << format_double(x) << '\n';
}

void write_json(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

Json sketch_to_json(const Sketch& s) {
  Json draws = Json::array();
  for (const auto& d : s.draws) draws.push_back({d.index, d.scale});
  return {{"n", s.source_n},   {"N", s.budget()},           {"seed", s.seed},
          {"stream", s.stream}, {"substream", s.substream}, {"draws", std::move(draws)}};
}

Sketch sketch_from_json(const Json& j) {
  try {
    Sketch s;
    s.source_n = j.at("n").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.stream = j.value("stream", std::uint64_t{0});
    s.substream = j.value("substream", std::uint64_t{0});
    for (const auto& d : j.at("draws")) {
      s.draws.push_back({d.at(0).get<std::size_t>(), d.at(1).get<double>()});
      if (s.draws.back().index >= s.source_n || !(s.draws.back().scale > 0.0)) {
        throw DataError("sketch draw out of range or with nonpositive scale");
      }
    }
    if (j.at("N").get<std::size_t>() != s.draws.size()) {
      throw DataError("sketch: N does not match the number of draws");
    }
    return s;
  } catch (const Json::exception& e) {
    throw DataError(std::string("sketch JSON: ") + e.what());
  }
}

Json weights_to_json(const WeightVector& w) {
  return {{"kind", to_string(w.kind)}, {"n", w.size()}, {"weights", w.values}};
}

WeightVector weights_from_json(const Json& j) {
  try {
    WeightVector w;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "lewis") {
      w.kind = WeightKind::lewis;
    } else if (kind == "leverage") {
      w.kind = WeightKind::leverage;
    } else if (kind == "sampling") {
      w.kind = WeightKind::sampling;
    } else {
      throw DataError("unknown weight kind '" + kind + "'");
    }
    w.values = j.at("weights").get<Vector>();
    return w;
  } catch (const Json::exception& e) {
    throw DataError(std::string("weights JSON: ") + e.what());
  }
}

Json solution_to_json(const LadSolution& s) {
  return {{"beta", s.beta},
          {"objective", s.objective},
          {"status", to_string(s.status)},
          {"iterations", s.iterations},
          {"optimality_gap_estimate", s.optimality_gap_estimate}};
}

}  // namespace activelad
