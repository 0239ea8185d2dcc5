#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmem {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Errors. Each maps to one failure class of the public operations.
struct LabelingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidSequence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidState : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedEncoding : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A product-basis label |m_S, m_I>. Quantum numbers are stored doubled so
// half-integers compare exactly.
struct Level {
  int twice_ms = 0;
  int twice_mi = 0;

  static Level of(double ms, double mi);

  double ms() const { return 0.5 * twice_ms; }
  double mi() const { return 0.5 * twice_mi; }

  auto operator<=>(const Level&) const = default;
};

std::string to_string(const Level& level);

// An ordered list of product-basis levels; state vectors and density
// matrices are expressed over one of these.
class LevelView {
 public:
  LevelView() = default;
  LevelView(std::initializer_list<Level> levels);
  explicit LevelView(std::vector<Level> levels);

  std::size_t size() const { return levels_.size(); }
  const Level& operator[](std::size_t i) const { return levels_[i]; }
  const std::vector<Level>& levels() const { return levels_; }
  std::optional<std::size_t> index_of(const Level& level) const;
  bool contains(const Level& level) const { return index_of(level).has_value(); }

  // {|-1/2,-3/2>, |-1/2,-1/2>, |-1/2,+1/2>, |-1/2,+3/2>, |+1/2,-1/2>}
  static const LevelView& experiment();
  // m_I = -3/2..+3/2 inside m_S = -1/2.
  static const LevelView& nuclear();
  // m_S = -1/2, +1/2 (outer) x m_I = -3/2..+3/2 (inner).
  static const LevelView& qudit();

 private:
  std::vector<Level> levels_;
};

// Embeds a state given on `from` into `to` (levels absent from `to` must
// carry zero amplitude).
CVector embed(const CVector& state, const LevelView& from, const LevelView& to);

}  // namespace qmem
