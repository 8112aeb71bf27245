#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "activelad/linalg.hpp"

namespace activelad {

/// The only access path to the labels y. Every query is logged and counted;
/// answers for a given index never change.
class LabelOracle {
 public:
  virtual ~LabelOracle() = default;

  double query(std::size_t i);

  virtual std::size_t size() const = 0;
  std::size_t query_count() const noexcept { return log_.size(); }
  const std::vector<std::size_t>& query_log() const noexcept { return log_; }

 protected:
  virtual double fetch(std::size_t i) = 0;

 private:
  std::vector<std::size_t> log_;
};

/// Labels held in memory, for experiments.
class VectorOracle final : public LabelOracle {
 public:
  explicit VectorOracle(Vector labels) : labels_(std::move(labels)) {}
  std::size_t size() const override { return labels_.size(); }

 protected:
  double fetch(std::size_t i) override;

 private:
  Vector labels_;
};

/// Labels stored one per line in a text file. Construction only indexes line
/// offsets; a label line is read and parsed only when that row is queried.
class FileOracle final : public LabelOracle {
 public:
  explicit FileOracle(const std::string& path);
  std::size_t size() const override { return offsets_.size(); }
  /// Number of label lines actually read and parsed so far.
  std::size_t lines_read() const noexcept { return lines_read_; }

 protected:
  double fetch(std::size_t i) override;

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::size_t> line_numbers_;
  std::size_t lines_read_ = 0;
};

}  // namespace activelad
