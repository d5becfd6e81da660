#ifndef STM_IO_HPP
#define STM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stm/sampler.hpp"
#include "stm/summary.hpp"

namespace stm {

/// Binary volume container, little-endian throughout:
///   "STMV" | u32 version = 1 | u8 ndim | ndim x u32 dims | u32 n_subjects |
///   n_subjects x prod(dims) f64, subject-major, voxels in lattice scan order.
struct VolumeFile {
  static constexpr std::uint32_t kVersion = 1;

  std::vector<std::uint32_t> dims;
  std::uint32_t n_subjects = 0;
  MatrixXd data;  // n_subjects x prod(dims)

  std::size_t voxels() const;
  bool operator==(const VolumeFile&) const = default;
};

VolumeFile make_volume(const Lattice& lattice, MatrixXd data);
Lattice volume_lattice(const VolumeFile& v);

std::string encode_volume(const VolumeFile& v);
VolumeFile decode_volume(const std::string& bytes);
void write_volume(const std::filesystem::path& path, const VolumeFile& v);
VolumeFile read_volume(const std::filesystem::path& path);

/// CSV with a header row and numeric cells. The intercept is not stored in the
/// file; the loader prepends a column of ones.
MatrixXd load_covariates(const std::filesystem::path& path);
MatrixXd parse_covariates(const std::string& text);
/// Writes X without its intercept column.
void write_covariates(const std::filesystem::path& path, const MatrixXd& X);

/// Chain directory: one volume per parameter block per checkpoint and an
/// index.json listing them. Retained draws are split into checkpoints of at
/// most `checkpoint_draws` (0 means a single checkpoint).
void write_chain(const std::filesystem::path& dir, const Chain& chain, const Lattice& lattice,
                 Index checkpoint_draws = 0);
Chain read_chain(const std::filesystem::path& dir, Lattice* lattice = nullptr);

void write_summary(const std::filesystem::path& dir, const SummaryMaps& maps, const Lattice& lattice);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stm

#endif  // STM_IO_HPP
