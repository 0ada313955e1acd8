#include "jmls/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jmls::io {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

Matrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& what) {
  Matrix m(rows, cols);
  if (j.is_number() && rows * cols == 1) {
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array()) throw InputError(what + ": expected an array");
  // Nested rows are accepted as well as the flat row-major form.
  std::vector<double> flat;
  for (const auto& e : j) {
    if (e.is_array()) {
      for (const auto& v : e) flat.push_back(v.get<double>());
    } else {
      flat.push_back(e.get<double>());
    }
  }
  if (static_cast<Index>(flat.size()) != rows * cols) {
    throw InputError(what + ": expected " + std::to_string(rows * cols) + " values, got " +
                     std::to_string(flat.size()));
  }
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const double v = flat[static_cast<std::size_t>(r * cols + c)];
      if (!std::isfinite(v)) throw InputError(what + ": non-finite value");
      m(r, c) = v;
    }
  }
  return m;
}

namespace {

std::size_t flat_size(const Json& j) {
  if (j.is_number()) return 1;
  if (!j.is_array()) throw InputError("expected a numeric array");
  std::size_t n = 0;
  for (const auto& e : j) n += e.is_array() ? e.size() : 1;
  return n;
}

Index square_side(const Json& j, const std::string& what) {
  const auto n = static_cast<Index>(flat_size(j));
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (side * side != n) throw InputError(what + " is not square");
  return side;
}

Index dim_or(const Json& j, const char* key, Index fallback) {
  if (j.contains(key)) return j.at(key).get<Index>();
  if (j.contains("dimensions") && j.at("dimensions").contains(key)) {
    return j.at("dimensions").at(key).get<Index>();
  }
  return fallback;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError(where + ": not a number: '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size() || !std::isfinite(v)) throw InputError(where + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

Json params_to_json(const JmlsParams& params) {
  Json j;
  const Dimensions d = params.dims();
  j["n_x"] = d.n_x;
  j["n_u"] = d.n_u;
  j["n_y"] = d.n_y;
  j["m"] = d.m;
  j["T"] = matrix_to_json(params.T.transpose());
  Json models = Json::array();
  for (const auto& m : params.models) {
    models.push_back({{"A", matrix_to_json(m.A)},
                      {"B", matrix_to_json(m.B)},
                      {"C", matrix_to_json(m.C)},
                      {"D", matrix_to_json(m.D)},
                      {"Q", matrix_to_json(m.Q)},
                      {"R", matrix_to_json(m.R)},
                      {"S", matrix_to_json(m.S)}});
  }
  j["models"] = std::move(models);
  return j;
}

JmlsParams params_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("models") || !j.contains("T")) {
      throw InputError("params: expected keys 'T' and 'models'");
    }
    const Json& models = j.at("models");
    if (!models.is_array() || models.empty()) throw InputError("params: 'models' must be a non-empty array");
    const auto m = static_cast<Index>(models.size());
    const Json& first = models.front();
    const Index n_x = dim_or(j, "n_x", square_side(first.at("A"), "A"));
    const Index n_y = dim_or(j, "n_y", square_side(first.at("R"), "R"));
    Index inferred_nu = 0;
    if (n_y > 0) {
      inferred_nu = static_cast<Index>(flat_size(first.at("D"))) / n_y;
    } else if (n_x > 0) {
      inferred_nu = static_cast<Index>(flat_size(first.at("B"))) / n_x;
    }
    const Index n_u = dim_or(j, "n_u", inferred_nu);
    if (dim_or(j, "m", m) != m) throw InputError("params: 'm' does not match the number of models");

    JmlsParams p;
    p.T = matrix_from_json(j.at("T"), m, m, "T").transpose();
    for (Index i = 0; i < m; ++i) {
      const Json& e = models.at(static_cast<std::size_t>(i));
      const std::string tag = "model " + std::to_string(i + 1) + " ";
      ModelMatrices mm;
      mm.A = matrix_from_json(e.at("A"), n_x, n_x, tag + "A");
      mm.B = matrix_from_json(e.at("B"), n_x, n_u, tag + "B");
      mm.C = matrix_from_json(e.at("C"), n_y, n_x, tag + "C");
      mm.D = matrix_from_json(e.at("D"), n_y, n_u, tag + "D");
      mm.Q = matrix_from_json(e.at("Q"), n_x, n_x, tag + "Q");
      mm.R = matrix_from_json(e.at("R"), n_y, n_y, tag + "R");
      mm.S = e.contains("S") ? matrix_from_json(e.at("S"), n_x, n_y, tag + "S")
                             : Matrix::Zero(n_x, n_y);
      p.models.push_back(std::move(mm));
    }
    return p;
  } catch (const Json::exception& e) {
    throw InputError(std::string("params: ") + e.what());
  }
}

JmlsParams read_params_file(const fs::path& path) {
  JmlsParams p = params_from_json(read_json_file(path));
  const auto problems = validate_params(p);
  if (!problems.empty()) {
    std::string msg = path.string() + ": invalid parameters";
    for (const auto& s : problems) msg += "\n  " + s;
    throw InputError(msg);
  }
  return p;
}

void write_params_file(const fs::path& path, const JmlsParams& params) {
  write_file_atomic(path, params_to_json(params).dump(2) + "\n");
}

void write_data_csv(const fs::path& path, const Dataset& data) {
  std::string out = "k";
  for (Index i = 0; i < data.n_u(); ++i) out += ",u_" + std::to_string(i + 1);
  for (Index i = 0; i < data.n_y(); ++i) out += ",y_" + std::to_string(i + 1);
  out += "\n";
  for (std::size_t k = 0; k < data.size(); ++k) {
    out += std::to_string(k + 1);
    if (!data.u.empty()) {
      for (Index i = 0; i < data.u[k].size(); ++i) out += "," + format_double(data.u[k](i));
    }
    for (Index i = 0; i < data.y[k].size(); ++i) out += "," + format_double(data.y[k](i));
    out += "\n";
  }
  write_file_atomic(path, out);
}

Dataset read_data_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty data file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.empty() || header.front() != "k") throw InputError(path.string() + ": header must start with 'k'");
  std::size_t n_u = 0, n_y = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string expect_u = "u_" + std::to_string(n_u + 1);
    const std::string expect_y = "y_" + std::to_string(n_y + 1);
    if (n_y == 0 && header[c] == expect_u) {
      ++n_u;
    } else if (header[c] == expect_y) {
      ++n_y;
    } else {
      throw InputError(path.string() + ": unexpected column '" + header[c] + "'");
    }
  }
  if (n_y == 0) throw InputError(path.string() + ": no output columns");

  Dataset data;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::string where = path.string() + ":" + std::to_string(row + 1);
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw InputError(where + ": wrong number of columns");
    if (parse_number(cells[0], where) != static_cast<double>(row)) {
      throw InputError(where + ": k must count up from 1");
    }
    Vector u(static_cast<Index>(n_u)), y(static_cast<Index>(n_y));
    for (std::size_t i = 0; i < n_u; ++i) u(static_cast<Index>(i)) = parse_number(cells[1 + i], where);
    for (std::size_t i = 0; i < n_y; ++i) y(static_cast<Index>(i)) = parse_number(cells[1 + n_u + i], where);
    data.u.push_back(std::move(u));
    data.y.push_back(std::move(y));
  }
  if (data.size() == 0) throw InputError(path.string() + ": no data rows");
  return data;
}

void write_trajectory_csv(const fs::path& path, const std::vector<Vector>& x, const std::vector<int>& z) {
  if (x.size() != z.size()) throw std::invalid_argument("trajectory: x and z lengths differ");
  std::string out = "k,z";
  const Index n_x = x.empty() ? 0 : x.front().size();
  for (Index i = 0; i < n_x; ++i) out += ",x_" + std::to_string(i + 1);
  out += "\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    out += std::to_string(k + 1) + "," + std::to_string(z[k] + 1);
    for (Index i = 0; i < x[k].size(); ++i) out += "," + format_double(x[k](i));
    out += "\n";
  }
  write_file_atomic(path, out);
}

std::string chain_record(std::size_t iteration, const JmlsParams& params) {
  Json j;
  j["iter"] = iteration;
  j["T"] = matrix_to_json(params.T.transpose());
  Json models = Json::array();
  for (const auto& m : params.models) {
    models.push_back({{"A", matrix_to_json(m.A)},
                      {"B", matrix_to_json(m.B)},
                      {"C", matrix_to_json(m.C)},
                      {"D", matrix_to_json(m.D)},
                      {"Q", matrix_to_json(m.Q)},
                      {"R", matrix_to_json(m.R)},
                      {"S", matrix_to_json(m.S)}});
  }
  j["models"] = std::move(models);
  return j.dump();
}

std::optional<ChainRecord> parse_chain_record(const std::string& line) {
  try {
    const Json j = Json::parse(line);
    ChainRecord rec;
    rec.iteration = j.at("iter").get<std::size_t>();
    rec.params = params_from_json(j);
    if (!validate_params(rec.params).empty()) return std::nullopt;
    return rec;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

ChainFile read_chain_file(const fs::path& path) {
  std::istringstream in(read_text(path));
  ChainFile out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++out.lines;
    auto rec = parse_chain_record(line);
    if (rec && !out.records.empty() && rec->params.dims() != out.records.front().params.dims()) {
      rec.reset();
    }
    if (rec) {
      out.records.push_back(std::move(*rec));
    } else {
      ++out.malformed;
    }
  }
  return out;
}

HyperParams hyper_from_json(const Json& j, Dimensions dims) {
  try {
    HyperParams h;
    if (j.contains("isotropic")) {
      const Json& iso = j.at("isotropic");
      h = HyperParams::isotropic(dims, iso.value("V", 13.0), iso.value("Lambda", 1e-10),
                                 iso.value("nu", 2.0), iso.value("alpha", 1.0));
    } else {
      const Index a = dims.n_y + dims.n_x;
      const Index b = dims.n_x + dims.n_u;
      const Json& models = j.at("models");
      if (static_cast<Index>(models.size()) != dims.m) {
        throw InputError("prior: expected " + std::to_string(dims.m) + " models");
      }
      for (Index i = 0; i < dims.m; ++i) {
        const Json& e = models.at(static_cast<std::size_t>(i));
        const std::string tag = "prior model " + std::to_string(i + 1) + " ";
        ModelHyper mh;
        mh.M = matrix_from_json(e.at("M"), a, b, tag + "M");
        mh.V = matrix_from_json(e.at("V"), b, b, tag + "V");
        mh.Lambda = matrix_from_json(e.at("Lambda"), a, a, tag + "Lambda");
        mh.nu = e.at("nu").get<double>();
        h.models.push_back(std::move(mh));
      }
      const Json& alpha = j.at("alpha");
      h.alpha = alpha.is_number() ? Matrix::Constant(dims.m, dims.m, alpha.get<double>())
                                  : Matrix(matrix_from_json(alpha, dims.m, dims.m, "alpha").transpose());
    }
    h.validate(dims);
    return h;
  } catch (const Json::exception& e) {
    throw InputError(std::string("prior: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("prior: ") + e.what());
  }
}

HybridPrior hybrid_prior_from_json(const Json& j, Dimensions dims) {
  try {
    HybridPrior p;
    for (const auto& e : j.at("components")) {
      HybridPrior::Entry entry;
      entry.model = e.at("model").get<int>() - 1;
      entry.weight = e.at("weight").get<double>();
      entry.mean = matrix_from_json(e.at("mean"), dims.n_x, 1, "state prior mean");
      entry.cov = matrix_from_json(e.at("cov"), dims.n_x, dims.n_x, "state prior cov");
      p.entries.push_back(std::move(entry));
    }
    p.validate(dims.m, dims.n_x);
    return p;
  } catch (const Json::exception& e) {
    throw InputError(std::string("state prior: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("state prior: ") + e.what());
  }
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

Json read_json_file(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace jmls::io
