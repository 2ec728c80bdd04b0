#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "critsoup/grid.hpp"
#include "critsoup/random.hpp"

namespace critsoup {

enum class FieldRole { kGff, kWickSquare, kOccupation, kShiftedSquare };

std::string_view to_string(FieldRole role);

/// One real value per interior vertex.
struct ScalarField {
  FieldRole role = FieldRole::kGff;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Zero-boundary discrete GFF sampler. The Cholesky factor of G is computed
/// once and shared read-only; sample() may be called concurrently with
/// distinct streams.
class GffSampler {
 public:
  explicit GffSampler(const GreenMatrix& G);

  ScalarField sample(RandomStream& rng) const;
  std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }

 private:
  Eigen::MatrixXd factor_;  // lower triangular, factor * factor^T = G
};

/// One-shot convenience wrapper; factors G on every call.
ScalarField sample_gff(const DomainGraph& g, const GreenMatrix& G, RandomStream& rng);

/// phi(x)^2 - G(x,x).
ScalarField wick_square(const ScalarField& phi, const GreenMatrix& G);

/// wick_square(phi) + 2 u phi.
ScalarField shifted_square(const ScalarField& phi, double u, const GreenMatrix& G);

/// Writes "x,y,value" lines with a header.
void write_field_csv(std::ostream& out, const ScalarField& field, const DomainGraph& g);

}  // namespace critsoup
