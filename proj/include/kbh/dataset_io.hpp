#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kbh {

// Malformed input files; the CLI maps this to its usage/parse exit code.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// On-disk dataset: '#'-prefixed header comments (N, and optionally a
// recommended impulse-response length n), a "u,y" column header, then one
// row per sample. Values are written with 17 significant digits so a write/
// read round trip reproduces every double bit-exactly. NaN or infinite
// values are rejected on both paths.
struct Dataset {
  Eigen::VectorXd u;
  Eigen::VectorXd y;
  int n_hint = 0;  // 0 when the header carries no recommendation
};

Dataset read_dataset(const std::filesystem::path& file);
void write_dataset(const std::filesystem::path& file, const Dataset& dataset);

// Ground truth lives in a sibling file with "name,index,value" rows (names
// g, c, sigma2; indices 1-based) so an estimator can never pick it up by
// accident when reading the dataset itself.
struct TruthFile {
  Eigen::VectorXd g;
  Eigen::VectorXd c;
  double sigma2 = 0.0;
};

TruthFile read_truth(const std::filesystem::path& file);
void write_truth(const std::filesystem::path& file, const TruthFile& truth);

// "index,value" vectors (1-based indices), used for estimate outputs.
void write_indexed_vector(const std::filesystem::path& file, const Eigen::VectorXd& values);
Eigen::VectorXd read_indexed_vector(const std::filesystem::path& file);

// Shortest-exact formatting used by every writer (17 significant digits).
std::string format_double(double value);

}  // namespace kbh
