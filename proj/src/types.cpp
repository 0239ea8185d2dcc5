#include "qmem/types.hpp"

#include <cmath>
#include <sstream>

namespace qmem {

namespace {

int doubled(double q) {
  const double two_q = 2.0 * q;
  const double rounded = std::round(two_q);
  if (!std::isfinite(q) || std::abs(two_q - rounded) > 1e-9) {
    throw std::invalid_argument("quantum number must be a multiple of 1/2");
  }
  return static_cast<int>(rounded);
}

std::string half_integer(int twice) {
  std::ostringstream out;
  if (twice % 2 == 0) {
    out << (twice >= 0 ? "+" : "") << twice / 2;
  } else {
    out << (twice >= 0 ? "+" : "-") << std::abs(twice) << "/2";
  }
  return out.str();
}

}  // namespace

Level Level::of(double ms, double mi) { return Level{doubled(ms), doubled(mi)}; }

std::string to_string(const Level& level) {
  return "|" + half_integer(level.twice_ms) + "," + half_integer(level.twice_mi) + ">";
}

LevelView::LevelView(std::initializer_list<Level> levels) : levels_(levels) {}
LevelView::LevelView(std::vector<Level> levels) : levels_(std::move(levels)) {}

std::optional<std::size_t> LevelView::index_of(const Level& level) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] == level) return i;
  }
  return std::nullopt;
}

const LevelView& LevelView::experiment() {
  static const LevelView view{Level{-1, -3}, Level{-1, -1}, Level{-1, 1}, Level{-1, 3},
                              Level{1, -1}};
  return view;
}

const LevelView& LevelView::nuclear() {
  static const LevelView view{Level{-1, -3}, Level{-1, -1}, Level{-1, 1}, Level{-1, 3}};
  return view;
}

const LevelView& LevelView::qudit() {
  static const LevelView view{Level{-1, -3}, Level{-1, -1}, Level{-1, 1}, Level{-1, 3},
                              Level{1, -3},  Level{1, -1},  Level{1, 1},  Level{1, 3}};
  return view;
}

CVector embed(const CVector& state, const LevelView& from, const LevelView& to) {
  if (static_cast<std::size_t>(state.size()) != from.size()) {
    throw std::invalid_argument("embed: state size does not match source view");
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(to.size()));
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto j = to.index_of(from[i]);
    if (j) {
      out(static_cast<Eigen::Index>(*j)) = state(static_cast<Eigen::Index>(i));
    } else if (std::abs(state(static_cast<Eigen::Index>(i))) > 0.0) {
      throw std::invalid_argument("embed: populated level " + to_string(from[i]) +
                                  " missing from target view");
    }
  }
  return out;
}

}  // namespace qmem
