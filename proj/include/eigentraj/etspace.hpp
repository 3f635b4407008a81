#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eigentraj/dataset.hpp"
#include "eigentraj/matrix.hpp"
#include "eigentraj/types.hpp"

namespace eigentraj::etspace {

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i is the unit eigenvector for values[i]
  int sweeps = 0;
};

// Cyclic Jacobi eigensolver for a real symmetric matrix. Converges when the
// off-diagonal Frobenius norm drops below 1e-12 * ||G||_F; gives up with
// Error(numeric) after 100 sweeps. Equal eigenvalues keep the solver's order.
EigenDecomposition symmetric_eigendecomposition(const Matrix& g);

// Coordinate frame the stacked trajectories are expressed in before the SVD.
//   absolute:      raw world coordinates
//   last_observed: both segments translated so obs.back() is the origin
enum class Frame { absolute, last_observed };

std::string_view to_string(Frame frame);
Frame parse_frame(std::string_view text);

struct Coefficients {
  std::vector<double> values;
  Segment segment = Segment::observation;
};

// Rank-k left singular vectors of one stacked segment, plus the full singular spectrum.
class ETBasis {
 public:
  ETBasis() = default;
  // `vectors` is k x L: row i holds u_i. `mean` is empty unless the fit was centered.
  ETBasis(Matrix vectors, std::vector<double> singular_values, Segment segment, Layout layout,
          std::vector<double> mean = {});

  std::size_t rank() const { return vectors_.rows(); }
  std::size_t dim() const { return vectors_.cols(); }
  std::size_t frames() const { return vectors_.cols() / 2; }
  Segment segment() const { return segment_; }
  Layout layout() const { return layout_; }
  bool centered() const { return !mean_.empty(); }

  std::span<const double> vector(std::size_t i) const { return vectors_.row(i); }
  const Matrix& vectors() const { return vectors_; }
  // U_k as an L x k matrix.
  Matrix u() const { return vectors_.transposed(); }
  const std::vector<double>& singular_values() const { return singular_values_; }
  const std::vector<double>& mean() const { return mean_; }

  // The leading `k` vectors of this basis. Throws Error(argument) if k > rank().
  ETBasis truncated(std::size_t k) const;

  friend bool operator==(const ETBasis&, const ETBasis&) = default;

 private:
  Matrix vectors_;
  std::vector<double> singular_values_;
  Segment segment_ = Segment::observation;
  Layout layout_ = Layout::interleaved;
  std::vector<double> mean_;
};

struct FitOptions {
  bool center = false;  // subtract the per-row mean before decomposing
};

// Rank-k basis of the stacked matrix via the eigendecomposition of A * A^T.
// Each vector is negated if its largest-magnitude entry is negative (first such
// entry on ties). Eigenvalues below 1e-12 * lambda_max are clamped to zero.
ETBasis fit_descriptor(const dataset::TrajectoryMatrix& matrix, std::size_t k, const FitOptions& options = {});

// c = U_k^T (segment - mean)
Coefficients project(const ETBasis& basis, std::span<const double> segment);
// U_k c + mean
std::vector<double> reconstruct(const ETBasis& basis, std::span<const double> coefficients);
std::vector<double> reconstruct(const ETBasis& basis, const Coefficients& c);

Coefficients project_path(const ETBasis& basis, const Path& path);
Path reconstruct_path(const ETBasis& basis, std::span<const double> coefficients);

struct DescriptorPair {
  ETBasis obs;
  ETBasis pred;
  Frame frame = Frame::last_observed;
  std::string provenance;

  friend bool operator==(const DescriptorPair&, const DescriptorPair&) = default;
};

struct PairOptions {
  std::size_t k = 6;
  Frame frame = Frame::last_observed;
  Layout layout = Layout::interleaved;
  bool center = false;
};

// Expresses a tracklet in the frame the descriptor pair was fitted in.
Tracklet to_frame(const Tracklet& tracklet, Frame frame);

// Fits both segment bases on one training corpus. k is clamped per segment to
// min(L, N) only when `clamp_k` is set; otherwise an out-of-range k throws.
DescriptorPair fit_pair(std::span<const Tracklet> train, const PairOptions& options, std::string provenance,
                        bool clamp_k = false);

DescriptorPair truncated(const DescriptorPair& pair, std::size_t k);

struct ApproximationError {
  double obs_mm = 0.0;
  double pred_mm = 0.0;
};

// Mean per-timestep reconstruction distance after project + reconstruct, averaged
// over tracklets, in millimeters.
ApproximationError approximation_error(const DescriptorPair& pair, std::span<const Tracklet> tracklets);

}  // namespace eigentraj::etspace
