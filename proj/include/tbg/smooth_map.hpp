#pragma once

#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tbg/jet.hpp"

namespace tbg {

inline std::string format_point(std::span<const double> p) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

/// A smooth map R^in -> R^out given by a jet-polymorphic evaluator: the rule
/// is written once in jet arithmetic and therefore carries exact derivatives
/// to whatever order its inputs hold (capped by max_order).
class SmoothMap {
 public:
  using Evaluator = std::function<std::vector<Jet>(std::span<const Jet>)>;

  SmoothMap() = default;
  SmoothMap(int arity_in, int arity_out, Evaluator evaluator,
            int max_order = Jet::kMaxOrder,
            std::optional<int> declared_rank = std::nullopt)
      : arity_in_(arity_in),
        arity_out_(arity_out),
        max_order_(max_order),
        declared_rank_(declared_rank),
        evaluator_(std::move(evaluator)) {
    if (arity_in <= 0 || arity_out <= 0)
      throw std::invalid_argument("SmoothMap: arities must be positive");
    if (max_order < 0 || max_order > Jet::kMaxOrder)
      throw std::invalid_argument("SmoothMap: max order outside 0..3");
  }

  int arity_in() const { return arity_in_; }
  int arity_out() const { return arity_out_; }
  int max_order() const { return max_order_; }
  std::optional<int> declared_rank() const { return declared_rank_; }

  SmoothMap with_rank(int rank) const {
    SmoothMap m = *this;
    m.declared_rank_ = rank;
    return m;
  }

  std::vector<Jet> eval(std::span<const Jet> in) const {
    if (static_cast<int>(in.size()) != arity_in_)
      throw std::invalid_argument("SmoothMap: expected " + std::to_string(arity_in_) +
                                  " inputs, got " + std::to_string(in.size()));
    for (const Jet& j : in)
      if (j.order() > max_order_)
        throw std::invalid_argument("SmoothMap: input order " + std::to_string(j.order()) +
                                    " exceeds declared smooth order " +
                                    std::to_string(max_order_));
    std::vector<Jet> out = evaluator_(in);
    if (static_cast<int>(out.size()) != arity_out_)
      throw std::logic_error("SmoothMap: evaluator produced " + std::to_string(out.size()) +
                             " outputs, declared " + std::to_string(arity_out_));
    return out;
  }

  /// Identity on R^n.
  static SmoothMap identity(int n) {
    return SmoothMap(n, n, [](std::span<const Jet> in) {
      return std::vector<Jet>(in.begin(), in.end());
    });
  }

  /// Map defined by pointwise Taylor data: `taylor(point, order)` returns the
  /// output jets in the map's own input variables at that point. Arbitrary
  /// input jets are then chained through by Taylor composition, so the result
  /// composes exactly like an evaluator written directly in jet arithmetic.
  static SmoothMap from_pointwise_jets(
      int arity_in, int arity_out,
      std::function<std::vector<Jet>(std::span<const double>, int)> taylor,
      int max_order = Jet::kMaxOrder) {
    auto ev = [arity_in, arity_out, taylor = std::move(taylor)](std::span<const Jet> in) {
      std::vector<double> point(in.size());
      for (size_t i = 0; i < in.size(); ++i) point[i] = in[i].value();
      const int order = in[0].order();
      std::vector<Jet> local = taylor(point, order);
      if (static_cast<int>(local.size()) != arity_out)
        throw std::logic_error("pointwise taylor rule produced wrong output count");
      std::vector<Jet> out;
      out.reserve(local.size());
      for (const Jet& l : local) {
        if (l.nvars() != arity_in || l.order() < order)
          throw std::logic_error("pointwise taylor rule produced wrong jet shape");
        out.push_back(compose(l.truncated(order), in));
      }
      return out;
    };
    return SmoothMap(arity_in, arity_out, std::move(ev), max_order);
  }

 private:
  int arity_in_ = 0;
  int arity_out_ = 0;
  int max_order_ = Jet::kMaxOrder;
  std::optional<int> declared_rank_;
  Evaluator evaluator_;
};

/// Composition g after f; derivatives chain exactly because f's output jets
/// feed straight into g's evaluator.
inline SmoothMap compose(const SmoothMap& g, const SmoothMap& f) {
  if (f.arity_out() != g.arity_in())
    throw std::invalid_argument("compose: inner map produces " + std::to_string(f.arity_out()) +
                                " values, outer expects " + std::to_string(g.arity_in()));
  const int order = std::min(f.max_order(), g.max_order());
  return SmoothMap(f.arity_in(), g.arity_out(),
                   [g, f](std::span<const Jet> in) { return g.eval(f.eval(in)); }, order);
}

/// All partial derivatives of the map at `point` up to `order`.
inline std::vector<Jet> jet_eval(const SmoothMap& map, std::span<const double> point, int order) {
  if (static_cast<int>(point.size()) != map.arity_in())
    throw std::invalid_argument("jet_eval: point dimension " + std::to_string(point.size()) +
                                " does not match arity " + std::to_string(map.arity_in()));
  if (order < 0 || order > map.max_order())
    throw std::invalid_argument("jet_eval: order " + std::to_string(order) + " outside 0.." +
                                std::to_string(map.max_order()));
  try {
    return map.eval(seed_point(point, order));
  } catch (const std::domain_error& e) {
    throw std::domain_error(std::string(e.what()) + " at point " + format_point(point));
  }
}

inline std::vector<double> point_eval(const SmoothMap& map, std::span<const double> point) {
  std::vector<Jet> jets = jet_eval(map, point, 0);
  std::vector<double> out(jets.size());
  for (size_t i = 0; i < jets.size(); ++i) out[i] = jets[i].value();
  return out;
}

/// First-partials matrix; rows index output components, columns input
/// variables. Enforces the declared immersion rank when one is present.
inline Eigen::MatrixXd jacobian(const SmoothMap& map, std::span<const double> point) {
  std::vector<Jet> jets = jet_eval(map, point, 1);
  Eigen::MatrixXd J(map.arity_out(), map.arity_in());
  for (int r = 0; r < map.arity_out(); ++r)
    for (int c = 0; c < map.arity_in(); ++c) J(r, c) = jets[static_cast<size_t>(r)].d1(c);
  if (map.declared_rank()) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    qr.setThreshold(1e-10);
    if (qr.rank() < *map.declared_rank())
      throw std::domain_error("degenerate immersion: jacobian rank " + std::to_string(qr.rank()) +
                              " below declared rank " + std::to_string(*map.declared_rank()) +
                              " at point " + format_point(point));
  }
  return J;
}

}  // namespace tbg
