#include "critsoup/gff.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace critsoup {

std::string_view to_string(FieldRole role) {
  switch (role) {
    case FieldRole::kGff:
      return "gff";
    case FieldRole::kWickSquare:
      return "wick_square";
    case FieldRole::kOccupation:
      return "occupation";
    case FieldRole::kShiftedSquare:
      return "shifted_square";
  }
  return "unknown";
}

GffSampler::GffSampler(const GreenMatrix& G) {
  if (G.size() == 0) return;
  Eigen::LLT<Eigen::MatrixXd> llt(G.values);
  if (llt.info() != Eigen::Success) throw std::runtime_error("GffSampler: Green matrix is not positive definite");
  factor_ = llt.matrixL();
}

ScalarField GffSampler::sample(RandomStream& rng) const {
  const auto n = factor_.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  const Eigen::VectorXd phi = factor_.triangularView<Eigen::Lower>() * z;
  ScalarField out{FieldRole::kGff, std::vector<double>(phi.data(), phi.data() + n)};
  return out;
}

ScalarField sample_gff(const DomainGraph& g, const GreenMatrix& G, RandomStream& rng) {
  if (G.size() != g.size()) throw std::invalid_argument("sample_gff: Green matrix does not match graph");
  return GffSampler(G).sample(rng);
}

ScalarField wick_square(const ScalarField& phi, const GreenMatrix& G) {
  if (phi.size() != G.size()) throw std::invalid_argument("wick_square: size mismatch");
  ScalarField out{FieldRole::kWickSquare, phi.values};
  for (std::size_t x = 0; x < out.size(); ++x) {
    const int i = static_cast<int>(x);
    out[x] = phi[x] * phi[x] - G(i, i);
  }
  return out;
}

ScalarField shifted_square(const ScalarField& phi, double u, const GreenMatrix& G) {
  ScalarField out = wick_square(phi, G);
  out.role = FieldRole::kShiftedSquare;
  for (std::size_t x = 0; x < out.size(); ++x) out[x] += 2.0 * u * phi[x];
  return out;
}

void write_field_csv(std::ostream& out, const ScalarField& field, const DomainGraph& g) {
  if (field.size() != g.size()) throw std::invalid_argument("write_field_csv: size mismatch");
  out << "x,y,value\n" << std::setprecision(17);
  for (std::size_t v = 0; v < field.size(); ++v) {
    const Coord& c = g.coord(static_cast<int>(v));
    out << c.x << ',' << c.y << ',' << field[v] << '\n';
  }
}

}  // namespace critsoup
