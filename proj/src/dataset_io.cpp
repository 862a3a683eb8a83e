#include "kbh/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <vector>

namespace kbh {

namespace {

std::string location(const std::filesystem::path& file, long line) {
  return file.string() + ":" + std::to_string(line);
}

double parse_double(const std::string& token, const std::filesystem::path& file, long line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ParseError(location(file, line) + ": not a number: '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(location(file, line) + ": non-finite value rejected");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ifstream open_for_read(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ParseError("cannot open " + file.string());
  }
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + file.string());
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

Dataset read_dataset(const std::filesystem::path& file) {
  std::ifstream in = open_for_read(file);

  Dataset dataset;
  long declared_n = -1;
  std::vector<double> u;
  std::vector<double> y;

  std::string raw;
  long line_no = 0;
  bool saw_columns = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t pos = line.find_first_not_of("# ");
      if (pos == std::string::npos) continue;
      const std::string body = line.substr(pos);
      if (body.rfind("N=", 0) == 0) {
        declared_n = std::strtol(body.c_str() + 2, nullptr, 10);
      } else if (body.rfind("n=", 0) == 0) {
        dataset.n_hint = static_cast<int>(std::strtol(body.c_str() + 2, nullptr, 10));
      }
      continue;
    }
    if (!saw_columns) {
      if (line != "u,y") {
        throw ParseError(location(file, line_no) + ": expected column header 'u,y', got '" +
                         line + "'");
      }
      saw_columns = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2) {
      throw ParseError(location(file, line_no) + ": expected 2 columns, got " +
                       std::to_string(fields.size()));
    }
    u.push_back(parse_double(fields[0], file, line_no));
    y.push_back(parse_double(fields[1], file, line_no));
  }

  if (!saw_columns) {
    throw ParseError(file.string() + ": missing 'u,y' column header");
  }
  if (u.empty()) {
    throw ParseError(file.string() + ": no samples");
  }
  if (declared_n >= 0 && declared_n != static_cast<long>(u.size())) {
    throw ParseError(file.string() + ": header says N=" + std::to_string(declared_n) +
                     " but found " + std::to_string(u.size()) + " rows");
  }

  dataset.u = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  dataset.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return dataset;
}

void write_dataset(const std::filesystem::path& file, const Dataset& dataset) {
  if (dataset.u.size() != dataset.y.size()) {
    throw std::invalid_argument("write_dataset: u and y lengths differ");
  }
  if (!dataset.u.allFinite() || !dataset.y.allFinite()) {
    throw std::invalid_argument("write_dataset: non-finite sample");
  }
  std::ofstream out = open_for_write(file);
  out << "# kbh dataset\n";
  out << "# N=" << dataset.u.size() << "\n";
  if (dataset.n_hint > 0) out << "# n=" << dataset.n_hint << "\n";
  out << "u,y\n";
  for (Eigen::Index t = 0; t < dataset.u.size(); ++t) {
    out << format_double(dataset.u(t)) << "," << format_double(dataset.y(t)) << "\n";
  }
}

TruthFile read_truth(const std::filesystem::path& file) {
  std::ifstream in = open_for_read(file);

  std::vector<double> g;
  std::vector<double> c;
  TruthFile truth;
  bool saw_sigma2 = false;

  std::string raw;
  long line_no = 0;
  bool saw_columns = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {
      if (line != "name,index,value") {
        throw ParseError(location(file, line_no) + ": expected 'name,index,value' header");
      }
      saw_columns = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3) {
      throw ParseError(location(file, line_no) + ": expected 3 columns");
    }
    const double value = parse_double(fields[2], file, line_no);
    const long index = std::strtol(fields[1].c_str(), nullptr, 10);
    if (fields[0] == "g" || fields[0] == "c") {
      auto& vec = fields[0] == "g" ? g : c;
      if (index != static_cast<long>(vec.size()) + 1) {
        throw ParseError(location(file, line_no) + ": expected index " +
                         std::to_string(vec.size() + 1) + " for '" + fields[0] + "'");
      }
      vec.push_back(value);
    } else if (fields[0] == "sigma2") {
      truth.sigma2 = value;
      saw_sigma2 = true;
    } else {
      throw ParseError(location(file, line_no) + ": unknown entry '" + fields[0] + "'");
    }
  }

  if (g.empty() || c.empty() || !saw_sigma2) {
    throw ParseError(file.string() + ": truth file must carry g, c and sigma2");
  }
  truth.g = Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
  truth.c = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  return truth;
}

void write_truth(const std::filesystem::path& file, const TruthFile& truth) {
  std::ofstream out = open_for_write(file);
  out << "# kbh truth\n";
  out << "name,index,value\n";
  for (Eigen::Index i = 0; i < truth.g.size(); ++i) {
    out << "g," << (i + 1) << "," << format_double(truth.g(i)) << "\n";
  }
  for (Eigen::Index i = 0; i < truth.c.size(); ++i) {
    out << "c," << (i + 1) << "," << format_double(truth.c(i)) << "\n";
  }
  out << "sigma2,1," << format_double(truth.sigma2) << "\n";
}

void write_indexed_vector(const std::filesystem::path& file, const Eigen::VectorXd& values) {
  std::ofstream out = open_for_write(file);
  out << "index,value\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out << (i + 1) << "," << format_double(values(i)) << "\n";
  }
}

Eigen::VectorXd read_indexed_vector(const std::filesystem::path& file) {
  std::ifstream in = open_for_read(file);
  std::vector<double> values;
  std::string raw;
  long line_no = 0;
  bool saw_columns = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {
      if (line != "index,value") {
        throw ParseError(location(file, line_no) + ": expected 'index,value' header");
      }
      saw_columns = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2) {
      throw ParseError(location(file, line_no) + ": expected 2 columns");
    }
    values.push_back(parse_double(fields[1], file, line_no));
  }
  if (values.empty()) {
    throw ParseError(file.string() + ": no values");
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace kbh
