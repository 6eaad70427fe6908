#pragma once

// Uncertain plant families: a nominal plant plus a nonnegative absolute
// uncertainty per packed coefficient (numerator first, then denominator).
//
// Two enclosures are derived from a family at a plant precision <Ip,Fp>:
//   * the rational box  [c - d - 2^-Fp, c + d + 2^-Fp], a superset of every
//     real member and of every member's FWL quantization (sound);
//   * the grid box, the <Ip,Fp> raw integers between floor(c - d) and
//     ceil(c + d), which is where counterexample plants are drawn from.

#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/interval.hpp"
#include "fwlsynth/poly.hpp"
#include "fwlsynth/rational.hpp"
#include "fwlsynth/transfer.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fwlsynth {

class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class PlantFamily {
public:
  PlantFamily(TransferFunction nominal, std::vector<Rational> delta, FixedPointFormat plant_format)
      : nominal_(std::move(nominal)), delta_(std::move(delta)), plant_format_(plant_format) {
    if (!nominal_.is_proper()) throw ValidationError("plant must satisfy N_G >= M_G");
    if (delta_.size() != nominal_.num().size() + nominal_.den().size()) {
      throw ValidationError("uncertainty vector has " + std::to_string(delta_.size()) +
                            " entries, plant has " +
                            std::to_string(nominal_.num().size() + nominal_.den().size()) + " coefficients");
    }
    for (const auto& d : delta_) {
      if (d < 0) throw ValidationError("uncertainty magnitudes must be nonnegative");
    }
  }

  static PlantFamily point(TransferFunction nominal, FixedPointFormat plant_format) {
    std::vector<Rational> zeros(nominal.num().size() + nominal.den().size(), Rational{0});
    return PlantFamily(std::move(nominal), std::move(zeros), plant_format);
  }

  const TransferFunction& nominal() const { return nominal_; }
  const std::vector<Rational>& delta() const { return delta_; }
  const FixedPointFormat& plant_format() const { return plant_format_; }
  std::size_t num_len() const { return nominal_.num().size(); }
  std::size_t coefficient_count() const { return delta_.size(); }

  PlantFamily with_format(FixedPointFormat f) const { return PlantFamily(nominal_, delta_, f); }

private:
  TransferFunction nominal_;
  std::vector<Rational> delta_;
  FixedPointFormat plant_format_;
};

struct IntervalPlant {
  IntervalPoly num;
  IntervalPoly den;
};

/// Coefficient boxes [c - d - 2^-Fp, c + d + 2^-Fp]; without a grid the
/// 2^-Fp term is dropped.
inline IntervalPlant family_to_interval_poly(const PlantFamily& family,
                                             std::optional<FixedPointFormat> grid) {
  const std::vector<Rational> packed = pack_coefficients(family.nominal());
  const Rational ulp = grid ? grid->step() : Rational{0};
  std::vector<RationalInterval> boxes;
  boxes.reserve(packed.size());
  for (std::size_t i = 0; i < packed.size(); ++i) {
    const Rational spread = family.delta()[i] + ulp;
    boxes.emplace_back(packed[i] - spread, packed[i] + spread);
  }
  const auto split = boxes.begin() + static_cast<std::ptrdiff_t>(family.num_len());
  return {IntervalPoly(std::vector<RationalInterval>(boxes.begin(), split)),
          IntervalPoly(std::vector<RationalInterval>(split, boxes.end()))};
}

inline IntervalPlant family_to_interval_poly(const PlantFamily& family) {
  return family_to_interval_poly(family, family.plant_format());
}

/// A plant whose coefficients lie on the <Ip,Fp> grid, stored as raw integers
/// in packed order.
struct GridPlant {
  FixedPointFormat format;
  std::size_t num_len = 0;
  std::vector<std::int64_t> raw;

  std::vector<FixedPointValue> num() const { return slice(0, num_len); }
  std::vector<FixedPointValue> den() const { return slice(num_len, raw.size()); }

  TransferFunction transfer_function() const {
    return TransferFunction{to_rational(Poly<FixedPointValue>(num())), to_rational(Poly<FixedPointValue>(den()))};
  }

  friend bool operator==(const GridPlant&, const GridPlant&) = default;

private:
  std::vector<FixedPointValue> slice(std::size_t from, std::size_t to) const {
    std::vector<FixedPointValue> out;
    out.reserve(to - from);
    for (std::size_t i = from; i < to; ++i) out.push_back(FixedPointValue::from_raw(raw[i], format));
    return out;
  }
};

/// Raw-integer bounds of the family on the <Ip,Fp> grid.
struct GridBox {
  FixedPointFormat format;
  std::size_t num_len = 0;
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;

  std::size_t size() const { return lo.size(); }

  GridPlant plant(std::vector<std::int64_t> raw) const { return GridPlant{format, num_len, std::move(raw)}; }
  GridPlant center() const {
    std::vector<std::int64_t> raw(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) raw[i] = lo[i] + (hi[i] - lo[i]) / 2;
    return plant(std::move(raw));
  }
  bool contains(const GridPlant& p) const {
    if (p.raw.size() != lo.size() || !(p.format == format)) return false;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (p.raw[i] < lo[i] || p.raw[i] > hi[i]) return false;
    }
    return true;
  }

  /// Interval enclosure of the grid box with fixed-point endpoints.
  std::pair<Poly<FixedInterval>, Poly<FixedInterval>> fixed_intervals() const {
    std::vector<FixedInterval> n, d;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      FixedInterval iv{FixedPointValue::from_raw(lo[i], format), FixedPointValue::from_raw(hi[i], format)};
      (i < num_len ? n : d).push_back(iv);
    }
    return {Poly<FixedInterval>(std::move(n)), Poly<FixedInterval>(std::move(d))};
  }
};

inline GridBox grid_box(const PlantFamily& family, FixedPointFormat fmt) {
  const std::vector<Rational> packed = pack_coefficients(family.nominal());
  GridBox box{fmt, family.num_len(), {}, {}};
  for (std::size_t i = 0; i < packed.size(); ++i) {
    box.lo.push_back(quantize(packed[i] - family.delta()[i], fmt, Rounding::Floor).raw());
    box.hi.push_back(quantize(packed[i] + family.delta()[i], fmt, Rounding::Ceiling).raw());
  }
  return box;
}

/// Corners of the grid box; coordinates with lo == hi contribute one value.
inline std::vector<GridPlant> vertices(const GridBox& box) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (box.lo[i] != box.hi[i]) free.push_back(i);
  }
  if (free.size() > 20) throw std::length_error("too many uncertain coefficients to enumerate vertices");
  std::vector<GridPlant> out;
  out.reserve(std::size_t{1} << free.size());
  for (std::size_t mask = 0; mask < (std::size_t{1} << free.size()); ++mask) {
    std::vector<std::int64_t> raw = box.lo;
    for (std::size_t k = 0; k < free.size(); ++k) {
      if (mask & (std::size_t{1} << k)) raw[free[k]] = box.hi[free[k]];
    }
    out.push_back(box.plant(std::move(raw)));
  }
  return out;
}

/// Uniformly random grid point of the box.
template <typename Rng>
GridPlant random_member(const GridBox& box, Rng& rng) {
  std::vector<std::int64_t> raw(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    raw[i] = std::uniform_int_distribution<std::int64_t>(box.lo[i], box.hi[i])(rng);
  }
  return box.plant(std::move(raw));
}

/// Point intervals of a controller's coefficients.
inline std::pair<IntervalPoly, IntervalPoly> controller_intervals(const Controller& c) {
  return {to_interval(c.numerator_poly()), to_interval(c.denominator_poly())};
}

/// Interval characteristic polynomial over the whole rational box.
inline IntervalPoly family_char_poly(const Controller& controller, const IntervalPlant& plant) {
  const auto [cn, cd] = controller_intervals(controller);
  return char_poly_generic(cn, cd, plant.num, plant.den);
}

/// Fixed-point interval characteristic polynomial over a grid box, in the
/// working format of controller and box.
inline Poly<FixedInterval> family_char_poly_fixed(const Controller& controller, const GridBox& box) {
  const FixedPointFormat w = working_format(controller.format, box.format);
  std::vector<FixedInterval> cn, cd, gn, gd;
  for (const auto& c : controller.num) cn.emplace_back(c.rescale(w));
  for (const auto& c : controller.den) cd.emplace_back(c.rescale(w));
  for (std::size_t i = 0; i < box.size(); ++i) {
    FixedInterval iv{FixedPointValue::from_raw(box.lo[i], box.format).rescale(w),
                     FixedPointValue::from_raw(box.hi[i], box.format).rescale(w)};
    (i < box.num_len ? gn : gd).push_back(iv);
  }
  return char_poly_generic(Poly<FixedInterval>(std::move(cn)), Poly<FixedInterval>(std::move(cd)),
                           Poly<FixedInterval>(std::move(gn)), Poly<FixedInterval>(std::move(gd)));
}

}  // namespace fwlsynth
