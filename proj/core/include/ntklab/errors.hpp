#pragma once

#include <stdexcept>
#include <string>

namespace ntklab {

// psd_solve gave up even after the eigendecomposition fallback.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double smallest_pivot)
      : std::runtime_error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

// Malformed on-disk data (IDX files, checkpoints). Message names the byte
// offset where parsing failed.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SGD hit a non-finite loss or an exploding score.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// A per-class statistic was requested for a class with too few samples.
class InsufficientDataError : public std::runtime_error {
 public:
  InsufficientDataError(const std::string& what, int label)
      : std::runtime_error(what), label_(label) {}
  int label() const { return label_; }

 private:
  int label_;
};

}  // namespace ntklab
